#include "clinichat/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include "clinichat/jsonl.hpp"
#include "clinichat/report.hpp"
#include "clinichat/text.hpp"

namespace clinichat::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct StageCounts {
  size_t attempted = 0;
  size_t succeeded = 0;
  size_t failed = 0;
};

struct CaseFailure {
  std::string case_id;
  std::string error;
};

// Collects everything a run manifest reports; written once per command.
class ManifestBuilder {
 public:
  ManifestBuilder(std::string command, const RunConfig& cfg)
      : command_(std::move(command)), cfg_(cfg),
        start_(std::chrono::steady_clock::now()) {}

  void add_input(const std::string& label, const std::string& path) {
    if (path.empty() || !fs::exists(path)) return;
    inputs_[label] = json{{"path", path}, {"digest", jsonl::file_digest(path)}};
  }

  StageCounts& stage(const std::string& name) { return stages_[name]; }

  void add_failure(const std::string& case_id, const std::string& error) {
    failures_.push_back({case_id, error});
  }

  double success_rate() const {
    size_t attempted = 0, succeeded = 0;
    for (const auto& [name, s] : stages_) {
      attempted += s.attempted;
      succeeded += s.succeeded;
    }
    return attempted == 0 ? 1.0 : static_cast<double>(succeeded) / attempted;
  }

  void write(const std::string& out_dir, const gateway::Gateway* gw) const {
    json m;
    m["command"] = command_;
    m["config"] = cfg_.raw;
    m["inputs"] = inputs_;
    json stages = json::object();
    for (const auto& [name, s] : stages_) {
      stages[name] = json{{"attempted", s.attempted},
                          {"succeeded", s.succeeded},
                          {"failed", s.failed}};
    }
    m["stages"] = stages;
    json failures = json::array();
    for (const auto& f : failures_) {
      failures.push_back({{"case_id", f.case_id}, {"error", f.error}});
    }
    m["failures"] = failures;
    m["success_rate"] = success_rate();

    if (gw) {
      auto log = gw->usage_log();
      long prompt = 0, completion = 0;
      for (const auto& e : log) {
        prompt += e.usage.prompt;
        completion += e.usage.completion;
      }
      m["usage"] = json{{"calls", log.size()},
                        {"prompt_tokens", prompt},
                        {"completion_tokens", completion}};
      gateway::CostModel prices = cfg_.cost_model();
      std::vector<gateway::UsageEvent> priced;
      std::vector<std::string> unpriced;
      for (const auto& e : log) {
        if (prices.has(e.model_id)) {
          priced.push_back(e);
        } else if (std::find(unpriced.begin(), unpriced.end(), e.model_id) == unpriced.end()) {
          unpriced.push_back(e.model_id);
        }
      }
      gateway::CostBreakdown cost = gateway::estimate_cost(priced, prices);
      m["cost"] = json{{"total", cost.total},
                       {"per_tag", cost.per_tag},
                       {"per_model", cost.per_model},
                       {"unpriced_models", unpriced}};
    }
    auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start_);
    m["wall_ms"] = wall.count();
    jsonl::write_text_file(out_dir + "/manifest_" + command_ + ".json", m.dump(2) + "\n");
  }

 private:
  std::string command_;
  const RunConfig& cfg_;
  std::map<std::string, json> inputs_;
  std::map<std::string, StageCounts> stages_;
  std::vector<CaseFailure> failures_;
  std::chrono::steady_clock::time_point start_;
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::config_error, "cannot create output dir " + dir);
}

// Index-sharded worker pool; fn must handle its own exceptions.
template <typename Fn>
void parallel_for(size_t n, int workers, Fn&& fn) {
  size_t k = std::min<size_t>(std::max(workers, 1), n);
  if (k <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(k);
  for (size_t w = 0; w < k; ++w) {
    threads.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

struct LoadedCase {
  corpus::CaseStudyQuestion question;
  json raw;
};

std::vector<LoadedCase> load_cases(const std::string& path, ManifestBuilder& manifest,
                                   const std::string& stage_name) {
  auto rows = jsonl::read_file(path);
  std::vector<LoadedCase> cases;
  StageCounts& stage = manifest.stage(stage_name);
  for (const auto& row : rows) {
    ++stage.attempted;
    try {
      cases.push_back({corpus::parse_case(row), row});
      ++stage.succeeded;
    } catch (const Error& e) {
      ++stage.failed;
      manifest.add_failure(row.is_object() ? row.value("id", "?") : "?", e.what());
    }
  }
  return cases;
}

std::map<std::string, corpus::CaseStudyQuestion> case_index(const std::vector<LoadedCase>& cases) {
  std::map<std::string, corpus::CaseStudyQuestion> out;
  for (const auto& c : cases) out[c.question.id] = c.question;
  return out;
}

// Deterministic sample of k indices (input order preserved).
std::vector<size_t> choose_subset(size_t n, long k, uint64_t seed) {
  std::vector<size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  if (k <= 0 || static_cast<size_t>(k) >= n) return indices;
  std::mt19937_64 rng(seed);
  std::shuffle(indices.begin(), indices.end(), rng);
  indices.resize(static_cast<size_t>(k));
  std::sort(indices.begin(), indices.end());
  return indices;
}

int exit_for_floor(const RunConfig& cfg, const ManifestBuilder& manifest) {
  if (manifest.success_rate() < cfg.success_floor) {
    std::cerr << "success rate " << manifest.success_rate() << " is below the floor "
              << cfg.success_floor << "\n";
    return 2;
  }
  return 0;
}

struct InputDialogue {
  std::string case_id;
  recon::Dialogue dialogue;
};

// records.jsonl and transcripts.jsonl both carry {case_id, dialogue}.
std::vector<InputDialogue> load_dialogues(const std::string& path) {
  std::vector<InputDialogue> out;
  for (const auto& row : jsonl::read_file(path)) {
    InputDialogue d;
    d.case_id = row.at("case_id").get<std::string>();
    d.dialogue = row.at("dialogue").get<recon::Dialogue>();
    out.push_back(std::move(d));
  }
  if (out.empty()) throw Error(ErrorKind::empty_corpus, "no dialogues in " + path);
  return out;
}

std::map<std::string, std::string> department_buckets(
    const std::vector<LoadedCase>& cases) {
  std::map<std::string, std::string> buckets;
  for (const auto& c : cases) {
    if (c.question.department) {
      buckets[c.question.id] = *c.question.department;
    } else if (c.raw.contains("department") && c.raw["department"].is_string()) {
      buckets[c.question.id] = c.raw["department"].get<std::string>();
    }
  }
  return buckets;
}

evalx::EvalReport aggregate_baseline(const std::string& path, const evalx::Rubric& rubric,
                                     const std::map<std::string, std::string>* buckets) {
  std::vector<evalx::EvalResult> results;
  for (const auto& row : jsonl::read_file(path)) {
    results.push_back(row.get<evalx::EvalResult>());
  }
  evalx::AggregateOptions opts;
  opts.bucket_of = buckets;
  return evalx::aggregate(results, rubric, opts);
}

std::string sanitize_filename(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_ingest(const RunConfig& cfg, const IngestArgs& args) {
  ensure_dir(args.out_dir);
  ManifestBuilder manifest("ingest", cfg);
  manifest.add_input("corpus", args.corpus_path);

  auto cases = load_cases(args.corpus_path, manifest, "parse");
  auto taxonomy = cfg.load_taxonomy();
  std::unique_ptr<gateway::Gateway> gw;
  std::optional<corpus::DepartmentClassifier> classifier;
  if (!args.no_classify) {
    if (!cfg.classifier_model.empty()) {
      gw = cfg.build_gateway();
      corpus::ClassifierOptions copts;
      copts.model_id = cfg.classifier_model;
      classifier.emplace(taxonomy, gw.get(), copts);
    } else {
      classifier.emplace(taxonomy);
    }
  }

  std::vector<json> rows(cases.size());
  StageCounts& enrich = manifest.stage("enrich");
  enrich.attempted = enrich.succeeded = cases.size();
  StageCounts& classify = manifest.stage("classify");
  std::atomic<size_t> classified{0}, unclassified{0};
  std::mutex mu;
  parallel_for(cases.size(), cfg.concurrency, [&](size_t i) {
    const auto& c = cases[i].question;
    json row = cases[i].raw;
    corpus::SoapView soap = corpus::segment_soap(c);
    row["soap"] = json{{"subjective", soap.subjective},
                       {"objective", soap.objective},
                       {"query", soap.assessment_plan_query}};
    corpus::Eligibility elig = corpus::filter_eligible(c);
    row["eligible"] = elig.pass;
    row["ineligibility_reasons"] = elig.reasons;
    if (classifier) {
      try {
        row["department"] = classifier->classify(c);
        ++classified;
      } catch (const Error& e) {
        ++unclassified;
        std::lock_guard lock(mu);
        manifest.add_failure(c.id, e.what());
      }
    }
    rows[i] = std::move(row);
  });
  if (classifier) {
    classify.attempted = cases.size();
    classify.succeeded = classified;
    classify.failed = unclassified;
  }

  jsonl::write_file(args.out_dir + "/enriched.jsonl", rows);
  manifest.write(args.out_dir, gw.get());
  return exit_for_floor(cfg, manifest);
}

int cmd_reconstruct(const RunConfig& cfg, const ReconstructArgs& args) {
  ensure_dir(args.out_dir);
  ManifestBuilder manifest("reconstruct", cfg);
  manifest.add_input("corpus", args.corpus_path);
  if (cfg.cassette_mode == gateway::CassetteMode::replay) {
    manifest.add_input("cassette", cfg.resolve(cfg.cassette_path));
  }

  auto cases = load_cases(args.corpus_path, manifest, "parse");
  std::vector<size_t> eligible;
  for (size_t i = 0; i < cases.size(); ++i) {
    if (corpus::filter_eligible(cases[i].question).pass) eligible.push_back(i);
  }
  auto picked = choose_subset(eligible.size(), args.limit, args.seed);

  auto tpl = cfg.load_template();
  auto roles = cfg.load_roles();
  auto gw = cfg.build_gateway();

  StageCounts& stage = manifest.stage("reconstruct");
  stage.attempted = picked.size();
  std::vector<std::optional<json>> rows(picked.size());
  std::mutex mu;
  parallel_for(picked.size(), cfg.concurrency, [&](size_t i) {
    const auto& c = cases[eligible[picked[i]]].question;
    try {
      recon::DialogueRecord record = recon::reconstruct(c, tpl, roles, *gw, cfg.generation);
      rows[i] = json(record);
    } catch (const Error& e) {
      std::lock_guard lock(mu);
      manifest.add_failure(c.id, e.what());
    }
  });

  std::vector<json> out;
  for (const auto& row : rows) {
    if (row) {
      out.push_back(*row);
      ++stage.succeeded;
    } else {
      ++stage.failed;
    }
  }
  jsonl::write_file(args.out_dir + "/records.jsonl", out);
  manifest.write(args.out_dir, gw.get());
  return exit_for_floor(cfg, manifest);
}

int cmd_stats(const RunConfig& cfg, const StatsArgs& args) {
  ensure_dir(args.out_dir);
  ManifestBuilder manifest("stats", cfg);
  manifest.add_input("input", args.input_path);

  auto inputs = load_dialogues(args.input_path);
  std::vector<recon::Dialogue> dialogues;
  dialogues.reserve(inputs.size());
  for (auto& d : inputs) dialogues.push_back(std::move(d.dialogue));
  corpus::DatasetStats stats = corpus::compute_stats(dialogues);

  StageCounts& stage = manifest.stage("stats");
  stage.attempted = stage.succeeded = dialogues.size();
  jsonl::write_text_file(args.out_dir + "/stats.json", json(stats).dump(2) + "\n");
  jsonl::write_text_file(args.out_dir + "/stats.txt", report::stats_table_text(stats));
  manifest.write(args.out_dir, nullptr);
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, const EvaluateArgs& args) {
  ensure_dir(args.out_dir);
  ManifestBuilder manifest("evaluate", cfg);
  manifest.add_input("input", args.input_path);
  manifest.add_input("corpus", args.corpus_path);
  if (!args.baseline_path.empty()) manifest.add_input("baseline", args.baseline_path);
  if (cfg.cassette_mode == gateway::CassetteMode::replay) {
    manifest.add_input("cassette", cfg.resolve(cfg.cassette_path));
  }

  auto cases = load_cases(args.corpus_path, manifest, "parse");
  auto by_id = case_index(cases);
  auto inputs = load_dialogues(args.input_path);
  auto rubric = cfg.load_rubric();
  auto gw = cfg.build_gateway();
  evalx::DemoCache demo_cache;

  StageCounts& stage = manifest.stage("evaluate");
  stage.attempted = inputs.size();
  std::vector<std::optional<evalx::EvalResult>> slots(inputs.size());
  std::mutex mu;
  parallel_for(inputs.size(), cfg.concurrency, [&](size_t i) {
    const auto& input = inputs[i];
    try {
      auto case_it = by_id.find(input.case_id);
      if (case_it == by_id.end()) {
        throw Error(ErrorKind::missing_field,
                    "case " + input.case_id + " not found in the corpus");
      }
      slots[i] = evalx::evaluate(case_it->second, input.dialogue, *gw, rubric, cfg.judge,
                                 &demo_cache);
    } catch (const Error& e) {
      std::lock_guard lock(mu);
      manifest.add_failure(input.case_id, e.what());
    }
  });

  std::vector<evalx::EvalResult> results;
  std::vector<json> rows;
  std::vector<recon::Dialogue> evaluated_dialogues;
  for (size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) {
      results.push_back(*slots[i]);
      rows.push_back(json(*slots[i]));
      evaluated_dialogues.push_back(inputs[i].dialogue);
      ++stage.succeeded;
    } else {
      ++stage.failed;
    }
  }
  jsonl::write_file(args.out_dir + "/eval_results.jsonl", rows);
  if (results.empty()) {
    manifest.write(args.out_dir, gw.get());
    std::cerr << "no dialogues were evaluated\n";
    return 1;
  }

  std::map<std::string, std::string> buckets = department_buckets(cases);
  evalx::AggregateOptions agg_opts;
  if (args.group_by == "department") agg_opts.bucket_of = &buckets;
  std::optional<evalx::EvalReport> baseline;
  if (!args.baseline_path.empty()) {
    baseline = aggregate_baseline(args.baseline_path, rubric,
                                  args.group_by == "department" ? &buckets : nullptr);
    agg_opts.baseline = &*baseline;
  }
  evalx::EvalReport eval_report = evalx::aggregate(results, rubric, agg_opts);

  report::MethodRow row;
  row.method = args.method_label;
  row.stats = corpus::compute_stats(evaluated_dialogues);
  row.eval = eval_report;

  json report_json;
  report_json["schema_version"] = "eval-report/v1";
  report_json["methods"] = report::method_table_json({row}, rubric);
  std::string report_text = report::method_table_text({row}, rubric);
  if (args.group_by == "department") {
    report_json["departments"] = report::department_table_json({row}, rubric);
    report_text += "\n" + report::department_table_text({row}, rubric);
  }
  report_json["aggregate"] = eval_report;
  jsonl::write_text_file(args.out_dir + "/report.json", report_json.dump(2) + "\n");
  jsonl::write_text_file(args.out_dir + "/report.txt", report_text);
  manifest.write(args.out_dir, gw.get());
  return exit_for_floor(cfg, manifest);
}

int cmd_interact(const RunConfig& cfg, const InteractArgs& args) {
  ensure_dir(args.out_dir);
  ManifestBuilder manifest("interact", cfg);
  manifest.add_input("corpus", args.corpus_path);
  if (cfg.cassette_mode == gateway::CassetteMode::replay) {
    manifest.add_input("cassette", cfg.resolve(cfg.cassette_path));
  }

  harness::AgentKind kind;
  if (args.physician_kind == "prompted") {
    kind = harness::AgentKind::prompted_general;
  } else if (args.physician_kind == "external") {
    kind = harness::AgentKind::external_model;
  } else {
    throw Error(ErrorKind::config_error,
                "physician kind must be 'prompted' or 'external', got " + args.physician_kind);
  }
  if (args.physician_model.empty()) {
    throw Error(ErrorKind::config_error, "a physician model id is required");
  }

  auto cases = load_cases(args.corpus_path, manifest, "parse");
  std::vector<size_t> eligible;
  for (size_t i = 0; i < cases.size(); ++i) {
    if (corpus::filter_eligible(cases[i].question).pass) eligible.push_back(i);
  }
  auto picked = choose_subset(eligible.size(), args.subset, args.seed);

  auto pack = cfg.load_prompt_pack();
  auto gw = cfg.build_gateway();
  harness::AgentSpec physician =
      harness::make_physician_agent(args.physician_model, kind, pack, cfg.interaction);

  StageCounts& stage = manifest.stage("interact");
  stage.attempted = picked.size();
  std::vector<std::optional<json>> rows(picked.size());
  std::mutex mu;
  parallel_for(picked.size(), cfg.concurrency, [&](size_t i) {
    const auto& c = cases[eligible[picked[i]]].question;
    try {
      harness::AgentSpec patient = harness::make_patient_agent(c, cfg.patient_model, pack);
      harness::InteractionResult r =
          harness::run_interaction(c, physician, patient, cfg.interaction, *gw);
      json row{{"schema_version", "transcript/v1"},
               {"case_id", c.id},
               {"dialogue", r.dialogue},
               {"physician",
                {{"kind", args.physician_kind}, {"model_id", args.physician_model}}},
               {"patient",
                {{"kind", "prompted"}, {"model_id", cfg.patient_model}}},
               {"pack_version", pack.version},
               {"termination", harness::to_string(r.reason)},
               {"pairs", r.dialogue.turn_count()},
               {"fingerprints", r.fingerprints}};
      if (r.reason == harness::TerminationReason::agent_error) {
        row["error"] = r.error_detail;
        std::lock_guard lock(mu);
        manifest.add_failure(c.id, r.error_detail);
      }
      rows[i] = std::move(row);
    } catch (const Error& e) {
      std::lock_guard lock(mu);
      manifest.add_failure(c.id, e.what());
    }
  });

  std::vector<json> out;
  for (auto& row : rows) {
    if (row && !row->contains("error")) {
      ++stage.succeeded;
    } else {
      ++stage.failed;
    }
    if (row) out.push_back(std::move(*row));
  }
  jsonl::write_file(args.out_dir + "/transcripts.jsonl", out);
  manifest.write(args.out_dir, gw.get());
  return exit_for_floor(cfg, manifest);
}

int cmd_compare(const RunConfig& cfg, const CompareArgs& args) {
  ensure_dir(args.out_dir);
  ManifestBuilder manifest("compare", cfg);
  manifest.add_input("corpus", args.corpus_path);
  if (cfg.cassette_mode == gateway::CassetteMode::replay) {
    manifest.add_input("cassette", cfg.resolve(cfg.cassette_path));
  }

  std::vector<std::string> methods;
  for (const auto& part : text::split_lines(text::replace_all(args.methods, ",", "\n"))) {
    std::string m = text::trim(part);
    if (!m.empty()) methods.push_back(m);
  }
  if (methods.empty()) throw Error(ErrorKind::unknown_method, "no methods given");
  for (const auto& m : methods) {
    bool ok = m == "clini_recon" || m.rfind("direct_roleplay:", 0) == 0 ||
              m.rfind("interactive_roleplay:", 0) == 0;
    if (!ok) throw Error(ErrorKind::unknown_method, m);
  }

  auto cases = load_cases(args.corpus_path, manifest, "parse");
  std::vector<size_t> eligible;
  for (size_t i = 0; i < cases.size(); ++i) {
    if (corpus::filter_eligible(cases[i].question).pass) eligible.push_back(i);
  }
  auto picked = choose_subset(eligible.size(), args.subset, args.seed);

  auto tpl = cfg.load_template();
  auto roles = cfg.load_roles();
  auto pack = cfg.load_prompt_pack();
  auto rubric = cfg.load_rubric();
  auto gw = cfg.build_gateway();
  evalx::DemoCache demo_cache;  // one demo per case, shared across methods

  std::vector<report::MethodRow> table_rows;
  for (const auto& method : methods) {
    StageCounts& gen_stage = manifest.stage("generate:" + method);
    gen_stage.attempted = picked.size();
    std::vector<std::optional<recon::Dialogue>> dialogues(picked.size());
    std::mutex mu;
    parallel_for(picked.size(), cfg.concurrency, [&](size_t i) {
      const auto& c = cases[eligible[picked[i]]].question;
      try {
        if (method == "clini_recon") {
          dialogues[i] = recon::reconstruct(c, tpl, roles, *gw, cfg.generation).dialogue;
        } else if (method.rfind("direct_roleplay:", 0) == 0) {
          dialogues[i] = harness::direct_roleplay_generate(
              c, method.substr(16), *gw, pack, cfg.generation.temperature);
        } else {
          dialogues[i] = harness::interactive_roleplay_generate(
                             c, method.substr(21), cfg.interaction, *gw, pack,
                             cfg.generation.temperature)
                             .dialogue;
        }
      } catch (const Error& e) {
        std::lock_guard lock(mu);
        manifest.add_failure(c.id + " [" + method + "]", e.what());
      }
    });

    StageCounts& eval_stage = manifest.stage("evaluate:" + method);
    std::vector<std::optional<evalx::EvalResult>> slots(picked.size());
    parallel_for(picked.size(), cfg.concurrency, [&](size_t i) {
      if (!dialogues[i]) return;
      const auto& c = cases[eligible[picked[i]]].question;
      try {
        slots[i] = evalx::evaluate(c, *dialogues[i], *gw, rubric, cfg.judge, &demo_cache);
      } catch (const Error& e) {
        std::lock_guard lock(mu);
        manifest.add_failure(c.id + " [" + method + "]", e.what());
      }
    });

    std::vector<json> dialogue_rows;
    std::vector<json> result_rows;
    std::vector<evalx::EvalResult> results;
    std::vector<recon::Dialogue> kept_dialogues;
    for (size_t i = 0; i < picked.size(); ++i) {
      const auto& c = cases[eligible[picked[i]]].question;
      if (dialogues[i]) {
        ++gen_stage.succeeded;
        dialogue_rows.push_back(json{{"schema_version", "transcript/v1"},
                                     {"case_id", c.id},
                                     {"method", method},
                                     {"dialogue", *dialogues[i]}});
      } else {
        ++gen_stage.failed;
      }
      if (dialogues[i]) ++eval_stage.attempted;
      if (slots[i]) {
        ++eval_stage.succeeded;
        results.push_back(*slots[i]);
        result_rows.push_back(json(*slots[i]));
        kept_dialogues.push_back(*dialogues[i]);
      } else if (dialogues[i]) {
        ++eval_stage.failed;
      }
    }
    std::string stem = sanitize_filename(method);
    jsonl::write_file(args.out_dir + "/dialogues_" + stem + ".jsonl", dialogue_rows);
    jsonl::write_file(args.out_dir + "/eval_results_" + stem + ".jsonl", result_rows);
    if (!results.empty()) {
      report::MethodRow row;
      row.method = method;
      row.stats = corpus::compute_stats(kept_dialogues);
      row.eval = evalx::aggregate(results, rubric, {});
      table_rows.push_back(std::move(row));
    }
  }

  json comparison;
  comparison["schema_version"] = "comparison/v1";
  comparison["table"] = report::method_table_json(table_rows, rubric);
  jsonl::write_text_file(args.out_dir + "/comparison.json", comparison.dump(2) + "\n");
  jsonl::write_text_file(args.out_dir + "/comparison.txt",
                         report::method_table_text(table_rows, rubric));
  manifest.write(args.out_dir, gw.get());
  return exit_for_floor(cfg, manifest);
}

int cmd_export(const RunConfig& cfg, const ExportArgs& args) {
  ensure_dir(args.out_dir);
  ManifestBuilder manifest("export", cfg);
  manifest.add_input("records", args.records_path);

  std::vector<recon::DialogueRecord> records;
  for (const auto& row : jsonl::read_file(args.records_path)) {
    records.push_back(row.get<recon::DialogueRecord>());
  }
  exporter::ExportResult result = exporter::export_finetune(records, cfg.export_cfg);
  exporter::VerifyReport verify =
      exporter::verify_export(result.samples, records, result.stats);

  std::vector<json> rows;
  rows.reserve(result.samples.size());
  for (const auto& s : result.samples) rows.push_back(json(s));
  jsonl::write_file(args.out_dir + "/finetune.jsonl", rows);
  json report_json{{"stats", result.stats}, {"verification", verify}};
  jsonl::write_text_file(args.out_dir + "/export_report.json", report_json.dump(2) + "\n");

  StageCounts& stage = manifest.stage("export");
  stage.attempted = result.stats.candidates;
  stage.succeeded = result.stats.kept;
  stage.failed = result.stats.candidates - result.stats.kept;
  manifest.write(args.out_dir, nullptr);
  if (!verify.ok()) {
    std::cerr << "export verification failed with " << verify.violations.size()
              << " violation(s)\n";
    return 1;
  }
  return 0;
}

int cmd_report(const RunConfig& cfg, const ReportArgs& args) {
  ensure_dir(args.out_dir);
  ManifestBuilder manifest("report", cfg);
  manifest.add_input("results", args.results_path);
  if (!args.records_path.empty()) manifest.add_input("records", args.records_path);
  if (!args.baseline_path.empty()) manifest.add_input("baseline", args.baseline_path);

  auto rubric = cfg.load_rubric();
  std::vector<evalx::EvalResult> results;
  for (const auto& row : jsonl::read_file(args.results_path)) {
    results.push_back(row.get<evalx::EvalResult>());
  }

  std::map<std::string, std::string> buckets;
  if (args.group_by == "department") {
    if (args.corpus_path.empty()) {
      throw Error(ErrorKind::config_error, "--group-by department needs --corpus");
    }
    auto cases = load_cases(args.corpus_path, manifest, "parse");
    buckets = department_buckets(cases);
  }

  evalx::AggregateOptions agg_opts;
  if (args.group_by == "department") agg_opts.bucket_of = &buckets;
  std::optional<evalx::EvalReport> baseline;
  if (!args.baseline_path.empty()) {
    baseline = aggregate_baseline(args.baseline_path, rubric,
                                  args.group_by == "department" ? &buckets : nullptr);
    agg_opts.baseline = &*baseline;
  }

  report::MethodRow row;
  row.method = args.method_label;
  row.eval = evalx::aggregate(results, rubric, agg_opts);
  if (!args.records_path.empty()) {
    auto inputs = load_dialogues(args.records_path);
    std::vector<recon::Dialogue> dialogues;
    for (auto& d : inputs) dialogues.push_back(std::move(d.dialogue));
    row.stats = corpus::compute_stats(dialogues);
  }

  json report_json;
  report_json["schema_version"] = "eval-report/v1";
  report_json["methods"] = report::method_table_json({row}, rubric);
  std::string report_text = report::method_table_text({row}, rubric);
  if (args.group_by == "department") {
    report_json["departments"] = report::department_table_json({row}, rubric);
    report_text += "\n" + report::department_table_text({row}, rubric);
  }
  report_json["aggregate"] = row.eval;
  jsonl::write_text_file(args.out_dir + "/report.json", report_json.dump(2) + "\n");
  jsonl::write_text_file(args.out_dir + "/report.txt", report_text);

  StageCounts& stage = manifest.stage("report");
  stage.attempted = stage.succeeded = results.size();
  manifest.write(args.out_dir, nullptr);
  return 0;
}

}  // namespace clinichat::cli
