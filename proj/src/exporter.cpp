#include "clinichat/exporter.hpp"

#include <map>

#include "clinichat/text.hpp"

namespace clinichat::exporter {

using nlohmann::json;
using recon::Speaker;

namespace {

// "Physician: .../Patient: ..." lines for each history pair, then a bare
// "Physician:" cue for the utterance being predicted.
std::string render_context(const std::vector<std::pair<std::string, std::string>>& history) {
  std::string out;
  for (const auto& [phys, pat] : history) {
    out += "Physician: " + phys + "\n";
    out += "Patient: " + pat + "\n";
  }
  out += "Physician:";
  return out;
}

}  // namespace

void to_json(json& j, const TrainingSample& s) {
  json history = json::array();
  for (const auto& [phys, pat] : s.history) history.push_back({phys, pat});
  j = json{{"history", history},
           {"prompt", s.context},
           {"response", s.target},
           {"meta",
            {{"case_id", s.case_id},
             {"utterance_index", s.utterance_index},
             {"source_len", s.source_len},
             {"target_len", s.target_len}}}};
}

void from_json(const json& j, TrainingSample& s) {
  s.history.clear();
  for (const auto& pair : j.at("history")) {
    s.history.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
  }
  s.context = j.at("prompt").get<std::string>();
  s.target = j.at("response").get<std::string>();
  const json& meta = j.at("meta");
  s.case_id = meta.at("case_id").get<std::string>();
  s.utterance_index = meta.at("utterance_index").get<size_t>();
  s.source_len = meta.value("source_len", 0L);
  s.target_len = meta.value("target_len", 0L);
}

void to_json(json& j, const ExportStats& s) {
  j = json{{"candidates", s.candidates},
           {"kept", s.kept},
           {"dropped_target", s.dropped_target},
           {"dropped_source", s.dropped_source},
           {"truncated", s.truncated}};
}

ExportResult export_finetune(std::span<const recon::DialogueRecord> records,
                             const ExportConfig& cfg) {
  if (cfg.max_source_length <= 0 || cfg.max_target_length <= 0) {
    throw Error(ErrorKind::config_error, "export length limits must be positive");
  }
  ExportResult out;
  for (const auto& record : records) {
    const auto& turns = record.dialogue.turns;
    std::vector<std::pair<std::string, std::string>> pairs_before;  // full prefix so far
    for (size_t i = 0; i < turns.size(); ++i) {
      if (turns[i].role != Speaker::physician) continue;
      ++out.stats.candidates;

      TrainingSample s;
      s.case_id = record.case_id;
      s.utterance_index = i;
      s.target = turns[i].text;
      s.target_len = text::word_count(s.target);
      s.history = pairs_before;

      // Maintain the prefix for the next candidate before any drop decision:
      // the pair formed by this physician utterance and its patient reply.
      if (i + 1 < turns.size() && turns[i + 1].role == Speaker::patient) {
        pairs_before.emplace_back(turns[i].text, turns[i + 1].text);
      }

      if (s.target_len > cfg.max_target_length) {
        ++out.stats.dropped_target;
        continue;
      }

      s.context = render_context(s.history);
      s.source_len = text::word_count(s.context);
      bool lost_history = false;
      while (s.source_len > cfg.max_source_length && s.history.size() > 1) {
        s.history.erase(s.history.begin());  // drop the oldest pair
        lost_history = true;
        s.context = render_context(s.history);
        s.source_len = text::word_count(s.context);
      }
      if (s.source_len > cfg.max_source_length) {
        ++out.stats.dropped_source;
        continue;
      }
      if (lost_history) ++out.stats.truncated;
      ++out.stats.kept;
      out.samples.push_back(std::move(s));
    }
  }
  return out;
}

void to_json(json& j, const VerifyReport& r) {
  j = json{{"samples_checked", r.samples_checked},
           {"expected_samples", r.expected_samples},
           {"violations", r.violations},
           {"ok", r.ok()}};
}

VerifyReport verify_export(std::span<const TrainingSample> samples,
                           std::span<const recon::DialogueRecord> records,
                           const ExportStats& stats) {
  VerifyReport report;
  std::map<std::string, const recon::DialogueRecord*> by_id;
  size_t physician_utterances = 0;
  for (const auto& r : records) {
    by_id[r.case_id] = &r;
    physician_utterances += r.dialogue.count_role(Speaker::physician);
  }
  report.expected_samples =
      physician_utterances - stats.dropped_target - stats.dropped_source;

  for (const auto& s : samples) {
    ++report.samples_checked;
    auto it = by_id.find(s.case_id);
    if (it == by_id.end()) {
      report.violations.push_back("sample references unknown case " + s.case_id);
      continue;
    }
    const auto& turns = it->second->dialogue.turns;
    std::string where = s.case_id + "[" + std::to_string(s.utterance_index) + "]";
    if (s.utterance_index >= turns.size()) {
      report.violations.push_back(where + ": target index out of range");
      continue;
    }
    const recon::Utterance& target = turns[s.utterance_index];
    if (target.role != Speaker::physician) {
      report.violations.push_back(where + ": target is a patient utterance");
      continue;
    }
    if (target.text != s.target) {
      report.violations.push_back(where + ": target is not the verbatim physician utterance");
      continue;
    }
    // History must be the contiguous pair slice that ends right before the
    // target: pair p of the sample maps to utterances (base+2p, base+2p+1).
    size_t pairs = s.history.size();
    if (2 * pairs > s.utterance_index) {
      report.violations.push_back(where + ": history longer than the dialogue prefix");
      continue;
    }
    size_t base = s.utterance_index - 2 * pairs;
    bool aligned = (base % 2 == 0);
    for (size_t p = 0; aligned && p < pairs; ++p) {
      const auto& phys = turns[base + 2 * p];
      const auto& pat = turns[base + 2 * p + 1];
      aligned = phys.role == Speaker::physician && pat.role == Speaker::patient &&
                phys.text == s.history[p].first && pat.text == s.history[p].second;
    }
    if (!aligned) {
      report.violations.push_back(where + ": history does not match the source dialogue slice");
    }
  }

  if (report.samples_checked != report.expected_samples) {
    report.violations.push_back(
        "sample count " + std::to_string(report.samples_checked) + " != physician utterances " +
        std::to_string(physician_utterances) + " minus drops " +
        std::to_string(stats.dropped_target + stats.dropped_source));
  }
  return report;
}

}  // namespace clinichat::exporter
