#pragma once

#include <cstdint>
#include <string>

#include "clinichat/config.hpp"

namespace clinichat::cli {

// Exit codes: 0 success, 1 hard error, 2 batch success rate below the
// configured floor. Batch commands isolate per-case failures and always
// write a run manifest.

struct IngestArgs {
  std::string corpus_path;
  std::string out_dir;
  bool no_classify = false;
};

struct ReconstructArgs {
  std::string corpus_path;
  std::string out_dir;
  long limit = 0;  // 0 = all eligible cases
  uint64_t seed = 0;
};

struct StatsArgs {
  std::string input_path;  // records or transcripts
  std::string out_dir;
};

struct EvaluateArgs {
  std::string input_path;  // records or transcripts
  std::string corpus_path;
  std::string out_dir;
  std::string group_by;        // "" or "department"
  std::string baseline_path;   // optional eval_results.jsonl to diff against
  std::string method_label = "evaluated";
};

struct InteractArgs {
  std::string corpus_path;
  std::string physician_model;
  std::string physician_kind = "prompted";  // "prompted" | "external"
  std::string out_dir;
  long subset = 70;
  uint64_t seed = 0;
};

struct CompareArgs {
  std::string corpus_path;
  std::string methods;  // comma list: clini_recon, direct_roleplay:<m>, interactive_roleplay:<m>
  std::string out_dir;
  long subset = 0;
  uint64_t seed = 0;
};

struct ExportArgs {
  std::string records_path;
  std::string out_dir;
};

struct ReportArgs {
  std::string results_path;
  std::string records_path;   // optional, enables the statistical columns
  std::string baseline_path;  // optional eval_results.jsonl
  std::string corpus_path;    // needed for group_by
  std::string group_by;
  std::string out_dir;
  std::string method_label = "evaluated";
};

int cmd_ingest(const RunConfig& cfg, const IngestArgs& args);
int cmd_reconstruct(const RunConfig& cfg, const ReconstructArgs& args);
int cmd_stats(const RunConfig& cfg, const StatsArgs& args);
int cmd_evaluate(const RunConfig& cfg, const EvaluateArgs& args);
int cmd_interact(const RunConfig& cfg, const InteractArgs& args);
int cmd_compare(const RunConfig& cfg, const CompareArgs& args);
int cmd_export(const RunConfig& cfg, const ExportArgs& args);
int cmd_report(const RunConfig& cfg, const ReportArgs& args);

}  // namespace clinichat::cli
