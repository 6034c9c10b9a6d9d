#include "doctest.h"
#include "json.hpp"

#include "clinichat/exporter.hpp"
#include "support/fixtures.hpp"

using namespace clinichat;
using clinichat::testing::make_dialogue;
using nlohmann::json;

namespace {

recon::DialogueRecord record_of(const recon::Dialogue& d, const std::string& id) {
  recon::DialogueRecord r;
  r.case_id = id;
  r.dialogue = d;
  r.knowledge = testing::golden_bundle();
  return r;
}

}  // namespace

TEST_SUITE_BEGIN("exporter");

TEST_CASE("a dialogue with three physician utterances yields three samples") {
  recon::Dialogue d;
  d.turns = {{recon::Speaker::physician, "first question here"},
             {recon::Speaker::patient, "first answer"},
             {recon::Speaker::physician, "second question here"},
             {recon::Speaker::patient, "second answer"},
             {recon::Speaker::physician, "closing words"}};
  std::vector<recon::DialogueRecord> records = {record_of(d, "c1")};
  auto result = exporter::export_finetune(records);
  REQUIRE(result.samples.size() == 3);
  CHECK(result.stats.candidates == 3);
  CHECK(result.stats.kept == 3);

  // sample k's history is the first k-1 exchange pairs
  CHECK(result.samples[0].history.empty());
  CHECK(result.samples[0].target == "first question here");
  REQUIRE(result.samples[1].history.size() == 1);
  CHECK(result.samples[1].history[0].first == "first question here");
  CHECK(result.samples[1].history[0].second == "first answer");
  REQUIRE(result.samples[2].history.size() == 2);
  CHECK(result.samples[2].target == "closing words");
  CHECK(result.samples[2].utterance_index == 4);

  // the rendered context ends with the physician cue
  CHECK(result.samples[2].context.rfind("Physician:") ==
        result.samples[2].context.size() - 10);
}

TEST_CASE("empty record list exports nothing with zeroed stats") {
  std::vector<recon::DialogueRecord> none;
  auto result = exporter::export_finetune(none);
  CHECK(result.samples.empty());
  CHECK(result.stats.candidates == 0);
  CHECK(result.stats.kept == 0);
  CHECK(result.stats.dropped_target == 0);
}

TEST_CASE("over-long targets are dropped and counted") {
  recon::Dialogue d = make_dialogue(2, 10, 5);
  std::string long_utterance;
  for (int i = 0; i < 200; ++i) long_utterance += "w" + std::to_string(i) + " ";
  d.turns[2].text = long_utterance;  // second physician utterance, 200 tokens

  exporter::ExportConfig cfg;
  cfg.max_target_length = 128;
  std::vector<recon::DialogueRecord> records = {record_of(d, "c1")};
  auto result = exporter::export_finetune(records, cfg);
  CHECK(result.stats.candidates == 2);
  CHECK(result.stats.dropped_target == 1);
  CHECK(result.stats.kept == 1);
  REQUIRE(result.samples.size() == 1);
  CHECK(result.samples[0].utterance_index == 0);
}

TEST_CASE("over-long sources drop oldest pairs but keep the latest pair") {
  recon::Dialogue d = make_dialogue(6, 10, 10);
  exporter::ExportConfig cfg;
  cfg.max_source_length = 45;  // roughly two pairs of context
  cfg.max_target_length = 128;
  std::vector<recon::DialogueRecord> records = {record_of(d, "c1")};
  auto result = exporter::export_finetune(records, cfg);
  CHECK(result.stats.kept == result.stats.candidates);
  CHECK(result.stats.truncated > 0);
  for (const auto& s : result.samples) {
    CHECK(s.source_len <= cfg.max_source_length);
    if (s.utterance_index >= 2) {
      REQUIRE_FALSE(s.history.empty());
      // the pair immediately before the target always survives
      CHECK(s.history.back().first == d.turns[s.utterance_index - 2].text);
      CHECK(s.history.back().second == d.turns[s.utterance_index - 1].text);
    }
  }
}

TEST_CASE("a source over budget even with one pair left is dropped and counted") {
  recon::Dialogue d = make_dialogue(3, 40, 40);
  exporter::ExportConfig cfg;
  cfg.max_source_length = 10;  // can't fit even one pair
  cfg.max_target_length = 128;
  std::vector<recon::DialogueRecord> records = {record_of(d, "c1")};
  auto result = exporter::export_finetune(records, cfg);
  // the first sample (no history) fits: its context is just the cue
  CHECK(result.stats.dropped_source == 2);
  CHECK(result.stats.kept == 1);
}

TEST_CASE("verify_export passes a clean export and counts the totals") {
  std::vector<recon::DialogueRecord> records;
  size_t physician_total = 0;
  for (int i = 0; i < 10; ++i) {
    recon::Dialogue d = make_dialogue(3 + i % 4, 6, 5);
    if (i % 2) d.turns.push_back({recon::Speaker::physician, "one more question"});
    records.push_back(record_of(d, "case-" + std::to_string(i)));
    physician_total += d.count_role(recon::Speaker::physician);
  }
  auto result = exporter::export_finetune(records);
  CHECK(result.samples.size() == physician_total);
  auto verify = exporter::verify_export(result.samples, records, result.stats);
  CHECK(verify.ok());
  CHECK(verify.samples_checked == physician_total);
  CHECK(verify.expected_samples == physician_total);
}

TEST_CASE("verify_export flags a patient utterance used as a target") {
  recon::Dialogue d = make_dialogue(3, 6, 5);
  std::vector<recon::DialogueRecord> records = {record_of(d, "c1")};
  auto result = exporter::export_finetune(records);
  REQUIRE(result.samples.size() == 3);
  // tamper: point a sample at a patient utterance
  result.samples[1].utterance_index = 1;
  result.samples[1].target = d.turns[1].text;
  auto verify = exporter::verify_export(result.samples, records, result.stats);
  CHECK_FALSE(verify.ok());
  bool flagged = false;
  for (const auto& v : verify.violations) {
    if (v.find("patient utterance") != std::string::npos) flagged = true;
  }
  CHECK(flagged);
}

TEST_CASE("verify_export flags non-verbatim targets and broken history") {
  recon::Dialogue d = make_dialogue(3, 6, 5);
  std::vector<recon::DialogueRecord> records = {record_of(d, "c1")};
  auto result = exporter::export_finetune(records);

  auto tampered_text = result.samples;
  tampered_text[2].target += " extra words";
  CHECK_FALSE(exporter::verify_export(tampered_text, records, result.stats).ok());

  auto tampered_history = result.samples;
  tampered_history[2].history[0].first = "rewritten";
  CHECK_FALSE(exporter::verify_export(tampered_history, records, result.stats).ok());
}

TEST_CASE("export is deterministic") {
  std::vector<recon::DialogueRecord> records;
  for (int i = 0; i < 5; ++i) {
    records.push_back(record_of(make_dialogue(4 + i, 7, 6), "case-" + std::to_string(i)));
  }
  auto a = exporter::export_finetune(records);
  auto b = exporter::export_finetune(records);
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(json(a.samples[i]).dump() == json(b.samples[i]).dump());
  }
}

TEST_CASE("training samples serialize to the loader format") {
  recon::Dialogue d = make_dialogue(2, 4, 3);
  std::vector<recon::DialogueRecord> records = {record_of(d, "c1")};
  auto result = exporter::export_finetune(records);
  json j = result.samples[1];
  CHECK(j.contains("history"));
  CHECK(j.contains("prompt"));
  CHECK(j.contains("response"));
  CHECK(j["meta"]["case_id"] == "c1");
  CHECK(j["history"].is_array());
  CHECK(j["history"][0].is_array());
  auto back = j.get<exporter::TrainingSample>();
  CHECK(back.target == result.samples[1].target);
  CHECK(back.history == result.samples[1].history);
}

TEST_SUITE_END();
