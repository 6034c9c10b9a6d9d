#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "clinichat/errors.hpp"
#include "clinichat/pipeline.hpp"

namespace {

using clinichat::cli::RunConfig;

struct GlobalArgs {
  std::string config_path;
  std::string cassette_mode;
  std::string cassette_path;
  std::string out_dir;
};

void add_common(CLI::App* cmd, GlobalArgs& g) {
  cmd->add_option("--config", g.config_path, "Run configuration file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", g.out_dir, "Output directory (overrides the config)");
  cmd->add_option("--cassette-mode", g.cassette_mode,
                  "Override the cassette mode: record | replay | passthrough");
  cmd->add_option("--cassette", g.cassette_path, "Override the cassette file path");
}

RunConfig load_config(const GlobalArgs& g) {
  RunConfig cfg = RunConfig::load(g.config_path);
  if (!g.cassette_mode.empty()) {
    cfg.cassette_mode = clinichat::gateway::cassette_mode_from_string(g.cassette_mode);
  }
  if (!g.cassette_path.empty()) cfg.cassette_path = g.cassette_path;
  if (!g.out_dir.empty()) cfg.output_dir = g.out_dir;
  return cfg;
}

std::string out_dir(const GlobalArgs& g, const RunConfig& cfg) {
  return g.out_dir.empty() ? cfg.output_dir : g.out_dir;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clinichat - clinical interview dialogue reconstruction and evaluation"};
  app.require_subcommand(1);

  GlobalArgs g;

  auto* ingest = app.add_subcommand(
      "ingest", "Parse a case corpus, add note spans, departments, and eligibility");
  clinichat::cli::IngestArgs ingest_args;
  add_common(ingest, g);
  ingest->add_option("--corpus", ingest_args.corpus_path, "Case corpus (JSON lines)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_flag("--no-classify", ingest_args.no_classify, "Skip department classification");

  auto* reconstruct =
      app.add_subcommand("reconstruct", "Generate interview dialogues from eligible cases");
  clinichat::cli::ReconstructArgs recon_args;
  add_common(reconstruct, g);
  reconstruct->add_option("--corpus", recon_args.corpus_path, "Case corpus (JSON lines)")
      ->required()
      ->check(CLI::ExistingFile);
  reconstruct->add_option("--limit", recon_args.limit, "Use at most N eligible cases");
  reconstruct->add_option("--seed", recon_args.seed, "Seed for the case sample");

  auto* stats = app.add_subcommand("stats", "Dataset statistics for dialogues or transcripts");
  clinichat::cli::StatsArgs stats_args;
  add_common(stats, g);
  stats->add_option("--records", stats_args.input_path, "records.jsonl or transcripts.jsonl")
      ->required()
      ->check(CLI::ExistingFile);

  auto* evaluate = app.add_subcommand("evaluate", "Two-phase judged evaluation of dialogues");
  clinichat::cli::EvaluateArgs eval_args;
  add_common(evaluate, g);
  evaluate->add_option("--records", eval_args.input_path, "records.jsonl or transcripts.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--corpus", eval_args.corpus_path, "Case corpus the dialogues came from")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--group-by", eval_args.group_by, "Bucket the report (department)");
  evaluate->add_option("--baseline", eval_args.baseline_path,
                       "Baseline eval_results.jsonl for percentage deltas");
  evaluate->add_option("--label", eval_args.method_label, "Row label in the report");

  auto* interact =
      app.add_subcommand("interact", "Dynamic physician-patient interactions over a corpus");
  clinichat::cli::InteractArgs interact_args;
  add_common(interact, g);
  interact->add_option("--corpus", interact_args.corpus_path, "Case corpus (JSON lines)")
      ->required()
      ->check(CLI::ExistingFile);
  interact->add_option("--physician-model", interact_args.physician_model,
                       "Model id playing the physician")
      ->required();
  interact->add_option("--physician-kind", interact_args.physician_kind,
                       "prompted (general model) or external (interview model)");
  interact->add_option("--subset", interact_args.subset, "Evaluate N eligible cases");
  interact->add_option("--seed", interact_args.seed, "Seed for the case sample");

  auto* compare = app.add_subcommand("compare", "Generate and judge several methods side by side");
  clinichat::cli::CompareArgs compare_args;
  add_common(compare, g);
  compare->add_option("--corpus", compare_args.corpus_path, "Case corpus (JSON lines)")
      ->required()
      ->check(CLI::ExistingFile);
  compare
      ->add_option("--methods", compare_args.methods,
                   "Comma list: clini_recon, direct_roleplay:<model>, "
                   "interactive_roleplay:<model>")
      ->required();
  compare->add_option("--subset", compare_args.subset, "Use N eligible cases");
  compare->add_option("--seed", compare_args.seed, "Seed for the case sample");

  auto* exporter = app.add_subcommand("export", "Build fine-tuning samples from dialogue records");
  clinichat::cli::ExportArgs export_args;
  add_common(exporter, g);
  exporter->add_option("--records", export_args.records_path, "records.jsonl")
      ->required()
      ->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "Re-render evaluation reports from saved results");
  clinichat::cli::ReportArgs report_args;
  add_common(report, g);
  report->add_option("--results", report_args.results_path, "eval_results.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--records", report_args.records_path,
                     "Matching dialogues, for the statistical columns");
  report->add_option("--baseline", report_args.baseline_path,
                     "Baseline eval_results.jsonl for percentage deltas");
  report->add_option("--corpus", report_args.corpus_path, "Corpus file (needed for group-by)");
  report->add_option("--group-by", report_args.group_by, "Bucket the report (department)");
  report->add_option("--label", report_args.method_label, "Row label in the report");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(g);
    if (ingest->parsed()) {
      ingest_args.out_dir = out_dir(g, cfg);
      return clinichat::cli::cmd_ingest(cfg, ingest_args);
    }
    if (reconstruct->parsed()) {
      recon_args.out_dir = out_dir(g, cfg);
      return clinichat::cli::cmd_reconstruct(cfg, recon_args);
    }
    if (stats->parsed()) {
      stats_args.out_dir = out_dir(g, cfg);
      return clinichat::cli::cmd_stats(cfg, stats_args);
    }
    if (evaluate->parsed()) {
      eval_args.out_dir = out_dir(g, cfg);
      return clinichat::cli::cmd_evaluate(cfg, eval_args);
    }
    if (interact->parsed()) {
      interact_args.out_dir = out_dir(g, cfg);
      return clinichat::cli::cmd_interact(cfg, interact_args);
    }
    if (compare->parsed()) {
      compare_args.out_dir = out_dir(g, cfg);
      return clinichat::cli::cmd_compare(cfg, compare_args);
    }
    if (exporter->parsed()) {
      export_args.out_dir = out_dir(g, cfg);
      return clinichat::cli::cmd_export(cfg, export_args);
    }
    if (report->parsed()) {
      report_args.out_dir = out_dir(g, cfg);
      return clinichat::cli::cmd_report(cfg, report_args);
    }
  } catch (const clinichat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
