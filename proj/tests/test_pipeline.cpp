#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "json.hpp"

#include "clinichat/config.hpp"
#include "clinichat/jsonl.hpp"
#include "clinichat/pipeline.hpp"

using namespace clinichat;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("clinichat-pipe-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

json offline_config(const std::string& cassette_path, const std::string& mode) {
  return json{
      {"providers", {{"simulated", {{"kind", "simulated"}}}}},
      {"default_provider", "simulated"},
      {"models",
       {{"generator", "sim-generator"},
        {"judge", "sim-judge"},
        {"patient", "sim-patient"},
        {"classifier", ""}}},
      {"cassette", {{"path", cassette_path}, {"mode", mode}}},
      {"concurrency", 2},
      {"retry", {{"max_attempts", 3}, {"backoff_ms", 1}}},
      {"generation", {{"temperature", 0.3}, {"min_dialogue_pairs", 10}}},
      {"success_floor", 0.9},
  };
}

cli::RunConfig make_config(const TempDir& tmp, const std::string& mode) {
  return cli::RunConfig::from_json(offline_config(tmp.file("cassette.jsonl"), mode),
                                   tmp.path.string());
}

std::string fixture_corpus() { return std::string(FIXTURES_DIR) + "/corpus5.jsonl"; }

}  // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("config validation catches common mistakes") {
  TempDir tmp;
  SUBCASE("unknown cassette mode") {
    json j = offline_config("c.jsonl", "sometimes");
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, tmp.path.string()), Error);
  }
  SUBCASE("missing asset file") {
    json j = offline_config("c.jsonl", "record");
    j["assets"] = {{"rubric", "does-not-exist.json"}};
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, tmp.path.string()), Error);
  }
  SUBCASE("bad concurrency") {
    json j = offline_config("c.jsonl", "record");
    j["concurrency"] = 0;
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, tmp.path.string()), Error);
  }
  SUBCASE("model routed to an undefined provider") {
    json j = offline_config("c.jsonl", "record");
    j["model_providers"] = {{"gpt-x", "nonexistent"}};
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, tmp.path.string()), Error);
  }
  SUBCASE("success floor out of range") {
    json j = offline_config("c.jsonl", "record");
    j["success_floor"] = 1.5;
    CHECK_THROWS_AS(cli::RunConfig::from_json(j, tmp.path.string()), Error);
  }
}

TEST_CASE("ingest enriches every case with spans, eligibility, and departments") {
  TempDir tmp;
  cli::RunConfig cfg = make_config(tmp, "record");
  cli::IngestArgs args;
  args.corpus_path = fixture_corpus();
  args.out_dir = tmp.file("out");
  CHECK(cli::cmd_ingest(cfg, args) == 0);

  auto rows = jsonl::read_file(tmp.file("out/enriched.jsonl"));
  REQUIRE(rows.size() == 5);
  for (const auto& row : rows) {
    CHECK(row.contains("soap"));
    CHECK(row["eligible"] == true);
    CHECK(row.contains("department"));
  }
  // rules place the chest-pain case in cardiology
  CHECK(rows[1]["department"] == "Cardiology");

  auto manifest = json::parse(jsonl::read_text_file(tmp.file("out/manifest_ingest.json")));
  CHECK(manifest["stages"]["parse"]["succeeded"] == 5);
  CHECK(manifest["stages"]["classify"]["succeeded"] == 5);
}

TEST_CASE("reconstruct, evaluate, stats, and export run end to end offline") {
  TempDir tmp;

  // record pass
  cli::RunConfig record_cfg = make_config(tmp, "record");
  cli::ReconstructArgs rec;
  rec.corpus_path = fixture_corpus();
  rec.out_dir = tmp.file("rec");
  REQUIRE(cli::cmd_reconstruct(record_cfg, rec) == 0);
  auto records = jsonl::read_file(tmp.file("rec/records.jsonl"));
  REQUIRE(records.size() == 5);
  auto manifest = json::parse(jsonl::read_text_file(tmp.file("rec/manifest_reconstruct.json")));
  CHECK(manifest["stages"]["reconstruct"]["succeeded"] == 5);
  CHECK(manifest["stages"]["reconstruct"]["failed"] == 0);

  cli::EvaluateArgs ev;
  ev.input_path = tmp.file("rec/records.jsonl");
  ev.corpus_path = fixture_corpus();
  ev.out_dir = tmp.file("eval");
  REQUIRE(cli::cmd_evaluate(record_cfg, ev) == 0);
  auto results = jsonl::read_file(tmp.file("eval/eval_results.jsonl"));
  CHECK(results.size() == 5);
  auto report = json::parse(jsonl::read_text_file(tmp.file("eval/report.json")));
  CHECK(report["methods"]["columns"][0] == "Avg. Turns");

  // replay pass is byte-identical
  cli::RunConfig replay_cfg = make_config(tmp, "replay");
  cli::ReconstructArgs rec2 = rec;
  rec2.out_dir = tmp.file("rec2");
  REQUIRE(cli::cmd_reconstruct(replay_cfg, rec2) == 0);
  CHECK(jsonl::read_text_file(tmp.file("rec2/records.jsonl")) ==
        jsonl::read_text_file(tmp.file("rec/records.jsonl")));

  cli::EvaluateArgs ev2 = ev;
  ev2.out_dir = tmp.file("eval2");
  REQUIRE(cli::cmd_evaluate(replay_cfg, ev2) == 0);
  CHECK(jsonl::read_text_file(tmp.file("eval2/eval_results.jsonl")) ==
        jsonl::read_text_file(tmp.file("eval/eval_results.jsonl")));
  CHECK(jsonl::read_text_file(tmp.file("eval2/report.json")) ==
        jsonl::read_text_file(tmp.file("eval/report.json")));

  // stats and export on the records
  cli::StatsArgs st;
  st.input_path = tmp.file("rec/records.jsonl");
  st.out_dir = tmp.file("stats");
  REQUIRE(cli::cmd_stats(replay_cfg, st) == 0);
  auto stats = json::parse(jsonl::read_text_file(tmp.file("stats/stats.json")));
  CHECK(stats["n_dialogues"] == 5);
  CHECK(stats["min_turns"].get<int>() >= 10);

  cli::ExportArgs ex;
  ex.records_path = tmp.file("rec/records.jsonl");
  ex.out_dir = tmp.file("export");
  REQUIRE(cli::cmd_export(replay_cfg, ex) == 0);
  auto export_report =
      json::parse(jsonl::read_text_file(tmp.file("export/export_report.json")));
  CHECK(export_report["verification"]["ok"] == true);
  auto samples = jsonl::read_file(tmp.file("export/finetune.jsonl"));
  CHECK(samples.size() == export_report["stats"]["kept"].get<size_t>());
}

TEST_CASE("replay misses fail isolated cases and trip the floor exit") {
  TempDir tmp;
  // an empty cassette file: every case will miss
  std::ofstream(tmp.file("cassette.jsonl")).close();
  cli::RunConfig cfg = make_config(tmp, "replay");
  cli::ReconstructArgs rec;
  rec.corpus_path = fixture_corpus();
  rec.out_dir = tmp.file("out");
  CHECK(cli::cmd_reconstruct(cfg, rec) == 2);  // below the success floor
  auto manifest = json::parse(jsonl::read_text_file(tmp.file("out/manifest_reconstruct.json")));
  CHECK(manifest["stages"]["reconstruct"]["failed"] == 5);
  CHECK(manifest["failures"].size() == 5);
  // the batch still wrote its (empty) output instead of aborting
  CHECK(jsonl::read_file(tmp.file("out/records.jsonl")).empty());
}

TEST_CASE("interact produces transcripts that evaluate cleanly") {
  TempDir tmp;
  cli::RunConfig cfg = make_config(tmp, "record");
  cli::InteractArgs args;
  args.corpus_path = fixture_corpus();
  args.physician_model = "sim-physician";
  args.out_dir = tmp.file("out");
  args.subset = 3;
  args.seed = 7;
  REQUIRE(cli::cmd_interact(cfg, args) == 0);
  auto transcripts = jsonl::read_file(tmp.file("out/transcripts.jsonl"));
  REQUIRE(transcripts.size() == 3);
  for (const auto& t : transcripts) {
    CHECK(t["schema_version"] == "transcript/v1");
    CHECK(t["termination"] == "marker");
    CHECK(t["pairs"].get<int>() >= 1);
  }

  // same subset again is deterministic
  cli::InteractArgs again = args;
  again.out_dir = tmp.file("out-replay");
  cli::RunConfig replay_cfg = make_config(tmp, "replay");
  REQUIRE(cli::cmd_interact(replay_cfg, again) == 0);
  CHECK(jsonl::read_text_file(tmp.file("out-replay/transcripts.jsonl")) ==
        jsonl::read_text_file(tmp.file("out/transcripts.jsonl")));

  cli::EvaluateArgs ev;
  ev.input_path = tmp.file("out/transcripts.jsonl");
  ev.corpus_path = fixture_corpus();
  ev.out_dir = tmp.file("eval");
  cli::RunConfig record_cfg = make_config(tmp, "record");
  REQUIRE(cli::cmd_evaluate(record_cfg, ev) == 0);
  CHECK(jsonl::read_file(tmp.file("eval/eval_results.jsonl")).size() == 3);
}

TEST_CASE("compare ranks methods and rejects unknown ones") {
  TempDir tmp;
  cli::RunConfig cfg = make_config(tmp, "record");

  SUBCASE("unknown method is a typed error") {
    cli::CompareArgs bad;
    bad.corpus_path = fixture_corpus();
    bad.methods = "clini_recon,telepathy";
    bad.out_dir = tmp.file("out");
    try {
      cli::cmd_compare(cfg, bad);
      FAIL("expected UnknownMethod");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::unknown_method);
    }
  }

  SUBCASE("two methods produce a ranked comparison") {
    cli::CompareArgs args;
    args.corpus_path = fixture_corpus();
    args.methods = "clini_recon,direct_roleplay:sim-baseline";
    args.out_dir = tmp.file("out");
    args.subset = 3;
    REQUIRE(cli::cmd_compare(cfg, args) == 0);
    auto comparison = json::parse(jsonl::read_text_file(tmp.file("out/comparison.json")));
    REQUIRE(comparison["table"]["rows"].size() == 2);
    // every metric column has exactly one rank-1 and one rank-2 row
    for (const char* metric : {"history", "techniques", "total"}) {
      std::vector<int> ranks;
      for (const auto& row : comparison["table"]["rows"]) {
        if (row["metrics"][metric].contains("rank")) {
          ranks.push_back(row["metrics"][metric]["rank"].get<int>());
        }
      }
      std::sort(ranks.begin(), ranks.end());
      CHECK(ranks == std::vector<int>{1, 2});
    }
    CHECK(fs::exists(tmp.file("out/dialogues_clini_recon.jsonl")));
    CHECK(fs::exists(tmp.file("out/dialogues_direct_roleplay_sim-baseline.jsonl")));
    CHECK(fs::exists(tmp.file("out/comparison.txt")));
  }

  SUBCASE("a single method has no rank markers") {
    cli::CompareArgs args;
    args.corpus_path = fixture_corpus();
    args.methods = "direct_roleplay:sim-baseline";
    args.out_dir = tmp.file("single");
    args.subset = 2;
    REQUIRE(cli::cmd_compare(cfg, args) == 0);
    auto comparison = json::parse(jsonl::read_text_file(tmp.file("single/comparison.json")));
    REQUIRE(comparison["table"]["rows"].size() == 1);
    for (const auto& [id, metric] : comparison["table"]["rows"][0]["metrics"].items()) {
      CHECK_FALSE(metric.contains("rank"));
    }
  }
}

TEST_CASE("report re-renders with baseline deltas and grouping") {
  TempDir tmp;
  cli::RunConfig cfg = make_config(tmp, "record");

  // build two result sets: records evaluated twice against different judges
  cli::ReconstructArgs rec;
  rec.corpus_path = fixture_corpus();
  rec.out_dir = tmp.file("rec");
  REQUIRE(cli::cmd_reconstruct(cfg, rec) == 0);

  cli::EvaluateArgs ev;
  ev.input_path = tmp.file("rec/records.jsonl");
  ev.corpus_path = fixture_corpus();
  ev.out_dir = tmp.file("eval-a");
  REQUIRE(cli::cmd_evaluate(cfg, ev) == 0);

  // enrich to get departments for grouping
  cli::IngestArgs ing;
  ing.corpus_path = fixture_corpus();
  ing.out_dir = tmp.file("ingest");
  REQUIRE(cli::cmd_ingest(cfg, ing) == 0);

  cli::ReportArgs rep;
  rep.results_path = tmp.file("eval-a/eval_results.jsonl");
  rep.records_path = tmp.file("rec/records.jsonl");
  rep.baseline_path = tmp.file("eval-a/eval_results.jsonl");  // self-baseline: 0% deltas
  rep.corpus_path = tmp.file("ingest/enriched.jsonl");
  rep.group_by = "department";
  rep.out_dir = tmp.file("report");
  REQUIRE(cli::cmd_report(cfg, rep) == 0);

  auto report = json::parse(jsonl::read_text_file(tmp.file("report/report.json")));
  CHECK(report["methods"]["rows"][0]["metrics"]["total"]["delta_pct"] == 0);
  CHECK(report["departments"]["rows"].size() >= 1);
  std::string text = jsonl::read_text_file(tmp.file("report/report.txt"));
  CHECK(text.find("(+0%)") != std::string::npos);
  CHECK(text.find("Department") != std::string::npos);
}

TEST_SUITE_END();
