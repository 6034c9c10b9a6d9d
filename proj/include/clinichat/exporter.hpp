#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "clinichat/recon.hpp"

namespace clinichat::exporter {

// One supervised fine-tuning sample. Only physician utterances are targets;
// the history is the contiguous run of exchange pairs immediately before
// the target (a prefix of the dialogue unless length truncation dropped the
// oldest pairs).
struct TrainingSample {
  std::string case_id;
  size_t utterance_index = 0;  // position of the target in the source dialogue
  std::vector<std::pair<std::string, std::string>> history;  // (physician, patient)
  std::string context;  // rendered source text fed to the model
  std::string target;   // one physician utterance, verbatim
  long source_len = 0;  // whitespace-estimated tokens
  long target_len = 0;
};

void to_json(nlohmann::json& j, const TrainingSample& s);
void from_json(const nlohmann::json& j, TrainingSample& s);

struct ExportConfig {
  long max_source_length = 2048;
  long max_target_length = 128;
};

struct ExportStats {
  size_t candidates = 0;      // one per physician utterance
  size_t kept = 0;
  size_t dropped_target = 0;  // target exceeded max_target_length
  size_t dropped_source = 0;  // still over budget with only the latest pair left
  size_t truncated = 0;       // kept, but lost at least one oldest history pair
};

void to_json(nlohmann::json& j, const ExportStats& s);

struct ExportResult {
  std::vector<TrainingSample> samples;
  ExportStats stats;
};

// A dialogue with N physician utterances yields exactly N candidates.
// Over-long targets are dropped and counted; over-long sources drop oldest
// history pairs (never the latest pair, never the target) until they fit.
// Deterministic: same records and config give byte-identical output.
ExportResult export_finetune(std::span<const recon::DialogueRecord> records,
                             const ExportConfig& cfg = {});

struct VerifyReport {
  size_t samples_checked = 0;
  size_t expected_samples = 0;  // physician utterances minus documented drops
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

void to_json(nlohmann::json& j, const VerifyReport& r);

// Re-checks the export against its sources: every target is verbatim the
// physician utterance at its index (never a patient utterance), history
// pairs align with the dialogue slice right before the target, and the
// sample count matches the stats.
VerifyReport verify_export(std::span<const TrainingSample> samples,
                           std::span<const recon::DialogueRecord> records,
                           const ExportStats& stats);

}  // namespace clinichat::exporter
