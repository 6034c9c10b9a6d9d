// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Everything runs offline; the end-to-end criterion shells out to
// the real CLI binary.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "clinichat/config.hpp"
#include "clinichat/corpus.hpp"
#include "clinichat/evalx.hpp"
#include "clinichat/exporter.hpp"
#include "clinichat/gateway.hpp"
#include "clinichat/harness.hpp"
#include "clinichat/jsonl.hpp"
#include "clinichat/recon.hpp"
#include "clinichat/report.hpp"
#include "clinichat/text.hpp"
#include "support/fixtures.hpp"
#include "support/providers.hpp"

using namespace clinichat;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw CheckFailure(what);
}

template <typename A, typename B>
void require_eq(const A& a, const B& b, const std::string& what) {
  if (!(a == b)) {
    std::ostringstream os;
    os << what << " (got " << a << ", want " << b << ")";
    throw CheckFailure(os.str());
  }
}

void require_near(double a, double b, double tol, const std::string& what) {
  if (std::abs(a - b) > tol) {
    std::ostringstream os;
    os << what << " (got " << a << ", want " << b << " within " << tol << ")";
    throw CheckFailure(os.str());
  }
}

struct TempTree {
  fs::path root;
  explicit TempTree(const std::string& stem) {
    root = fs::temp_directory_path() / (stem + "-" + std::to_string(std::random_device{}()));
    fs::create_directories(root);
  }
  ~TempTree() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
  std::string file(const std::string& name) const { return (root / name).string(); }
};

int run_cli(const std::string& args) {
  std::string cmd = std::string(CLINICHAT_BIN) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

// --- criterion 1 ---------------------------------------------------------

void rubric_fidelity() {
  auto rubric = evalx::Rubric::canonical();
  require_eq(rubric.groups().size(), size_t{6}, "rubric must have six groups");
  const std::vector<double> expected = {45, 25, 4, 10, 10, 6};
  double sum = 0;
  for (size_t i = 0; i < expected.size(); ++i) {
    require_eq(rubric.groups()[i].max_points, expected[i],
               "group maximum for " + rubric.groups()[i].id);
    sum += rubric.groups()[i].max_points;
  }
  require_eq(sum, 100.0, "group maxima must sum to 100");
  const auto* hpi = rubric.find_node("history.hpi");
  require(hpi != nullptr, "the HPI block must exist");
  double hpi_sum = 0;
  for (const auto& leaf : hpi->children) hpi_sum += leaf.max_points;
  require_eq(hpi_sum, 19.0, "HPI leaf maxima must sum to 19");
  require_eq(hpi->max_points, 19.0, "HPI block maximum must be 19");
  require_eq(rubric.leaves().size(), size_t{34}, "rubric must have 34 scored leaves");
}

// --- criterion 2 ---------------------------------------------------------

void scorecard_arithmetic() {
  auto rubric = evalx::Rubric::canonical();
  auto leaves = rubric.leaves();
  std::mt19937_64 rng(20240817);
  auto start = std::chrono::steady_clock::now();
  for (int iter = 0; iter < 1000; ++iter) {
    json scores = json::object();
    std::map<std::string, double> group_oracle;
    double total_oracle = 0;
    for (const auto* leaf : leaves) {
      double v = std::uniform_real_distribution<double>(0.0, leaf->max_points)(rng);
      v = std::round(v * 100) / 100;
      scores[leaf->id] = v;
      group_oracle[rubric.group_of(leaf->id)->id] += v;
      total_oracle += v;
    }
    auto card = evalx::parse_scorecard(
        json{{"subjective_assessment", "x"}, {"scores", scores}}.dump(), rubric);
    for (const auto& [gid, expected] : group_oracle) {
      require_near(card.per_group.at(gid), expected, 1e-9, "per-group sum for " + gid);
    }
    require_near(card.total, total_oracle, 1e-9, "scorecard total");
  }
  // out-of-range leaves are rejected, not clamped
  json bad = json::object();
  for (const auto* leaf : leaves) bad[leaf->id] = leaf->max_points;
  bad[leaves[0]->id] = leaves[0]->max_points + 0.5;
  bool rejected = false;
  try {
    evalx::parse_scorecard(json{{"scores", bad}}.dump(), rubric);
  } catch (const Error& e) {
    rejected = e.kind() == ErrorKind::malformed_scorecard;
  }
  require(rejected, "an out-of-range leaf must be rejected");
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  require(elapsed.count() < 1000, "1000 scorecards must validate in under 1s, took " +
                                      std::to_string(elapsed.count()) + "ms");
}

// --- criterion 3 ---------------------------------------------------------

void dialogue_invariants() {
  std::mt19937_64 rng(7);
  const std::vector<std::string> vocab = {"pain",  "sleep", "since", "today", "better",
                                          "worse", "chest", "often", "mild",  "severe"};
  auto utterance = [&](size_t max_words) {
    std::string s;
    size_t n = 1 + rng() % max_words;
    for (size_t i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += vocab[rng() % vocab.size()];
    }
    return s;
  };
  for (int iter = 0; iter < 1000; ++iter) {
    recon::Dialogue d;
    size_t pairs = 1 + rng() % 12;
    for (size_t p = 0; p < pairs; ++p) {
      d.turns.push_back({recon::Speaker::physician, utterance(8)});
      d.turns.push_back({recon::Speaker::patient, utterance(8)});
    }
    if (rng() % 2) d.turns.push_back({recon::Speaker::physician, utterance(8)});

    require(d.invariant_violations().empty(), "generated dialogue must satisfy invariants");
    auto parsed = recon::parse_dialogue(recon::serialize_dialogue(d));
    require(parsed.dialogue.turns == d.turns, "serialize-then-parse must be the identity");
    require(parsed.dialogue.turns.front().role == recon::Speaker::physician,
            "parsed dialogues are physician-first");
    for (size_t i = 1; i < parsed.dialogue.turns.size(); ++i) {
      require(parsed.dialogue.turns[i].role != parsed.dialogue.turns[i - 1].role,
              "parsed dialogues alternate strictly");
    }
    for (const auto& u : parsed.dialogue.turns) {
      require(u.text.find("{{") == std::string::npos, "no unresolved markers");
    }
  }
}

// --- criterion 4 ---------------------------------------------------------

json offline_config(const std::string& cassette, const std::string& mode) {
  return json{
      {"providers", {{"simulated", {{"kind", "simulated"}}}}},
      {"default_provider", "simulated"},
      {"models",
       {{"generator", "sim-generator"}, {"judge", "sim-judge"}, {"patient", "sim-patient"}}},
      {"cassette", {{"path", cassette}, {"mode", mode}}},
      {"concurrency", 2},
      {"generation", {{"temperature", 0.3}}},
      {"success_floor", 1.0},
  };
}

void replay_determinism() {
  auto start = std::chrono::steady_clock::now();
  TempTree tmp("clinichat-accept");
  std::string corpus = std::string(FIXTURES_DIR) + "/corpus5.jsonl";
  require(fs::exists(corpus), "fixture corpus must exist");
  require(fs::exists(CLINICHAT_BIN), "the CLI binary must exist");

  jsonl::write_text_file(tmp.file("record.json"),
                         offline_config(tmp.file("cassette.jsonl"), "record").dump());
  jsonl::write_text_file(tmp.file("replay.json"),
                         offline_config(tmp.file("cassette.jsonl"), "replay").dump());

  // record once
  require_eq(run_cli("reconstruct --config " + tmp.file("record.json") + " --corpus " + corpus +
                     " --out " + tmp.file("seed")),
             0, "recording reconstruct run must succeed");
  require_eq(run_cli("evaluate --config " + tmp.file("record.json") + " --records " +
                     tmp.file("seed/records.jsonl") + " --corpus " + corpus + " --out " +
                     tmp.file("seed-eval")),
             0, "recording evaluate run must succeed");

  // two full replay passes: reconstruct -> evaluate -> report
  for (const char* run : {"a", "b"}) {
    std::string r(run);
    require_eq(run_cli("reconstruct --config " + tmp.file("replay.json") + " --corpus " +
                       corpus + " --out " + tmp.file(r)),
               0, "replay reconstruct " + r);
    require_eq(run_cli("evaluate --config " + tmp.file("replay.json") + " --records " +
                       tmp.file(r + "/records.jsonl") + " --corpus " + corpus + " --out " +
                       tmp.file(r + "-eval")),
               0, "replay evaluate " + r);
    require_eq(run_cli("report --config " + tmp.file("replay.json") + " --results " +
                       tmp.file(r + "-eval/eval_results.jsonl") + " --records " +
                       tmp.file(r + "/records.jsonl") + " --out " + tmp.file(r + "-report")),
               0, "replay report " + r);
  }

  for (const auto& [a, b] : std::vector<std::pair<std::string, std::string>>{
           {"a/records.jsonl", "b/records.jsonl"},
           {"a-eval/eval_results.jsonl", "b-eval/eval_results.jsonl"},
           {"a-eval/report.json", "b-eval/report.json"},
           {"a-eval/report.txt", "b-eval/report.txt"},
           {"a-report/report.json", "b-report/report.json"},
           {"a-report/report.txt", "b-report/report.txt"}}) {
    require(jsonl::read_text_file(tmp.file(a)) == jsonl::read_text_file(tmp.file(b)),
            "replay outputs must be byte-identical: " + a);
  }
  require(jsonl::read_file(tmp.file("a/records.jsonl")).size() == 5,
          "all five fixture cases must reconstruct");

  auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
      std::chrono::steady_clock::now() - start);
  require(elapsed.count() < 30,
          "offline end-to-end must finish in under 30s, took " +
              std::to_string(elapsed.count()) + "s");
}

// --- criterion 5 ---------------------------------------------------------

void statistics_oracle() {
  // ten hand-labeled dialogues; every expected value below is hand-computed
  const std::vector<size_t> pairs = {19, 23, 25, 28, 30, 32, 34, 36, 40, 53};
  const std::vector<int> phys_words = {12, 13, 14, 15, 16, 14, 15, 16, 15, 18};
  const std::vector<int> pat_words = {10, 11, 12, 12, 12, 11, 12, 13, 12, 12};
  std::vector<recon::Dialogue> dialogues;
  for (size_t i = 0; i < pairs.size(); ++i) {
    dialogues.push_back(testing::make_dialogue(pairs[i], phys_words[i], pat_words[i]));
  }
  auto stats = corpus::compute_stats(dialogues);
  require_eq(stats.n_dialogues, size_t{10}, "dialogue count");
  require_eq(stats.max_turns, size_t{53}, "max turns");
  require_eq(stats.min_turns, size_t{19}, "min turns");
  require_near(stats.avg_turns, 32.0, 5e-4, "average turns");                    // 320/10
  require_near(stats.avg_words_physician, 15.203125, 5e-4, "physician words");   // 4865/320
  require_near(stats.avg_words_patient, 11.821875, 5e-4, "patient words");       // 3783/320
  // MedQA-Dialog corpus not available offline; the Table-1 comparison
  // (67 / 19 / 32 / 11.7 / 14.8) applies only when it is obtained.
}

// --- criterion 6 ---------------------------------------------------------

void export_labeling() {
  std::vector<recon::DialogueRecord> records;
  size_t physician_utterances = 0;
  std::mt19937_64 rng(99);
  for (int i = 0; i < 12; ++i) {
    recon::Dialogue d = testing::make_dialogue(10 + rng() % 10, 6 + rng() % 6, 5 + rng() % 5);
    if (rng() % 2) d.turns.push_back({recon::Speaker::physician, "one closing question"});
    recon::DialogueRecord r;
    r.case_id = "case-" + std::to_string(i);
    r.dialogue = d;
    records.push_back(r);
    physician_utterances += d.count_role(recon::Speaker::physician);
  }
  exporter::ExportConfig cfg;
  cfg.max_source_length = 260;  // forces truncation on long dialogues
  auto result = exporter::export_finetune(records, cfg);
  auto verify = exporter::verify_export(result.samples, records, result.stats);
  require(verify.ok(), "verify_export must find zero violations: " +
                           (verify.violations.empty() ? "" : verify.violations[0]));
  require_eq(result.samples.size(),
             physician_utterances - result.stats.dropped_target - result.stats.dropped_source,
             "sample count must equal physician utterances minus documented drops");
  for (const auto& s : result.samples) {
    const auto& turns = records[std::stoul(s.case_id.substr(5))].dialogue.turns;
    require(turns[s.utterance_index].role == recon::Speaker::physician,
            "every target must be a physician utterance");
    require(turns[s.utterance_index].text == s.target, "targets are verbatim");
  }
}

// --- criterion 7 ---------------------------------------------------------

void report_layout() {
  auto rubric = evalx::Rubric::canonical();
  auto columns = report::table_columns(rubric);
  const std::vector<std::string> expected = {
      "Avg. Turns",       "Avg. Words Phys. / Pt.", "Medical History",
      "Interview Techniques", "Medical Exam",       "Diagnosis Result",
      "Diagnosis Basis",  "Confirm. Tests",         "Total Score"};
  require(columns == expected, "evaluation table columns must follow the published order");

  require_eq(evalx::percent_delta(34.81, 20.38).value(), 71,
             "the 20.38 -> 34.81 delta must round to +71%");

  // a two-row table with a baseline: deltas annotate history and total
  report::MethodRow ours;
  ours.method = "clini_recon";
  ours.eval.n = 7;
  ours.eval.rubric_version = rubric.version();
  ours.eval.means = {{"history", 34.81}, {"techniques", 23.87}, {"exam", 3.57},
                     {"diagnosis", 8.89}, {"basis", 8.59},      {"tests", 5.20},
                     {"total", 84.93}};
  ours.eval.deltas_pct = {{"history", evalx::percent_delta(34.81, 20.38).value()},
                          {"techniques", evalx::percent_delta(23.87, 18.72).value()},
                          {"total", evalx::percent_delta(84.93, 60.82).value()}};
  report::MethodRow baseline;
  baseline.method = "direct_roleplay";
  baseline.eval.n = 7;
  baseline.eval.rubric_version = rubric.version();
  baseline.eval.means = {{"history", 20.38}, {"techniques", 18.72}, {"exam", 3.15},
                         {"diagnosis", 7.78}, {"basis", 7.26},      {"tests", 3.53},
                         {"total", 60.82}};

  std::string text = report::method_table_text({baseline, ours}, rubric);
  require(text.find("34.81 (+71%)") != std::string::npos,
          "the history column must render 34.81 (+71%)");
  require(text.find("84.93 (+40%)") != std::string::npos,
          "the total column must render its delta");
  require(text.find("**34.81 (+71%)**") != std::string::npos,
          "the best history value must carry the best-rank marker");
  require(text.find("_20.38_") != std::string::npos,
          "the second-best history value must carry the second-rank marker");

  json table = report::method_table_json({baseline, ours}, rubric);
  require(table["columns"].get<std::vector<std::string>>() == expected,
          "JSON layout must carry the same column order");
  require_eq(table["rows"][1]["metrics"]["history"]["delta_pct"].get<int>(), 71,
             "JSON delta for history");
}

// --- criterion 8 ---------------------------------------------------------

void harness_termination() {
  std::mt19937_64 rng(31337);
  auto pack = harness::PromptPack::english();
  corpus::CaseStudyQuestion c = testing::fixture_case();
  size_t marker_runs = 0, limit_runs = 0, error_runs = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    auto provider = std::make_shared<testing::RandomAgentProvider>(rng(), 0.25, 0.05);
    gateway::Gateway gw(provider, nullptr);
    harness::InteractionLimits limits;
    limits.max_pairs = static_cast<int>(rng() % 9);
    auto physician =
        harness::make_physician_agent("m", harness::AgentKind::prompted_general, pack, limits);
    auto patient = harness::make_patient_agent(c, "m", pack);
    auto result = harness::run_interaction(c, physician, patient, limits, gw);

    require(result.dialogue.turn_count() <= static_cast<size_t>(limits.max_pairs),
            "interactions must stay within max_pairs");
    require(result.dialogue.invariant_violations().empty(),
            "emitted dialogues must satisfy the structural invariants");
    switch (result.reason) {
      case harness::TerminationReason::marker: ++marker_runs; break;
      case harness::TerminationReason::limit: ++limit_runs; break;
      case harness::TerminationReason::agent_error: ++error_runs; break;
    }
    for (const auto& req : provider->requests()) {
      if (req.tag != "harness.physician") continue;
      for (const auto& m : req.messages) {
        require(m.text.find(c.answer_text) == std::string::npos,
                "the physician context must never contain the answer");
        require(m.text.find(c.vignette) == std::string::npos,
                "the physician context must never contain the case note");
        for (const auto& opt : c.options) {
          require(m.text.find(opt.text) == std::string::npos,
                  "the physician context must never contain option text");
        }
      }
    }
  }
  require(marker_runs > 0 && limit_runs > 0 && error_runs > 0,
          "the randomized runs must exercise every termination reason");
}

// --- criterion 9 ---------------------------------------------------------

// Records the scripted exchange to a cassette, replays it, and checks that
// both passes raise the same typed error after exactly one re-prompt.
template <typename Fn>
void roundtrip_failure(const std::string& name, std::vector<std::string> replies,
                       ErrorKind expected_kind, size_t expected_calls, Fn&& drive) {
  TempTree tmp("clinichat-robust");
  std::string cassette_path = tmp.file(name + ".jsonl");
  {
    auto provider = std::make_shared<testing::ScriptedProvider>(replies);
    auto cassette =
        std::make_shared<gateway::Cassette>(gateway::CassetteMode::record, cassette_path);
    gateway::Gateway gw(provider, cassette);
    bool threw = false;
    try {
      drive(gw);
    } catch (const Error& e) {
      threw = e.kind() == expected_kind;
    }
    require(threw, name + ": recording pass must raise the typed error");
    require_eq(provider->calls(), expected_calls,
               name + ": exactly one re-prompt before failing");
  }
  auto cassette =
      std::make_shared<gateway::Cassette>(gateway::CassetteMode::replay, cassette_path);
  gateway::Gateway gw(nullptr, cassette);
  bool threw = false;
  try {
    drive(gw);
  } catch (const Error& e) {
    threw = e.kind() == expected_kind;
  }
  require(threw, name + ": replaying the authored cassette must raise the same error");
}

void robustness() {
  auto rubric = evalx::Rubric::canonical();
  auto c = testing::fixture_case();
  auto dialogue = testing::make_dialogue(12, 8, 6, "acute pancreatitis");

  // (a) scorecard with a missing leaf, twice
  json incomplete = json::object();
  for (const auto* leaf : rubric.leaves()) incomplete[leaf->id] = 0.0;
  incomplete.erase("history.chief_complaint");
  std::string missing_leaf = json{{"subjective_assessment", "x"},
                                  {"scores", incomplete}}.dump();
  roundtrip_failure("missing-leaf", {missing_leaf, missing_leaf},
                    ErrorKind::malformed_scorecard, 2, [&](gateway::Gateway& gw) {
                      evalx::request_scorecard(gw, evalx::parse_demo(R"({
                        "conclusions": {"most_likely_disease": "x",
                                         "differential_diagnoses": ["y"],
                                         "diagnosis_basis": ["b"],
                                         "confirmation_tests": ["t"]},
                        "history_plan": [{"topic": "chief complaint"}]})"),
                                              dialogue, rubric);
                    });

  // (b) scorecard with an out-of-range leaf, twice
  json over = json::object();
  for (const auto* leaf : rubric.leaves()) over[leaf->id] = 0.0;
  over["exam.results_consistency"] = 9.5;  // max 4
  std::string out_of_range = json{{"subjective_assessment", "x"}, {"scores", over}}.dump();
  roundtrip_failure("out-of-range", {out_of_range, out_of_range},
                    ErrorKind::malformed_scorecard, 2, [&](gateway::Gateway& gw) {
                      evalx::request_scorecard(gw, evalx::parse_demo(R"({
                        "conclusions": {"most_likely_disease": "x",
                                         "differential_diagnoses": "none",
                                         "diagnosis_basis": ["b"],
                                         "confirmation_tests": ["t"]},
                        "history_plan": [{"topic": "history"}]})"),
                                              dialogue, rubric);
                    });

  // (c) generation that leaks a placeholder, twice
  std::string knowledge = json(testing::golden_bundle()).dump();
  std::string leaking = "Physician: Now about {{risk_factors}}.\nPatient: Go on.\n";
  for (int i = 0; i < 11; ++i) {
    leaking += "Physician: Question " + std::to_string(i) + " about acute pancreatitis?\n";
    leaking += "Patient: Answer " + std::to_string(i) + ".\n";
  }
  roundtrip_failure("leaky-generation", {knowledge, leaking, leaking},
                    ErrorKind::generation_invalid, 3, [&](gateway::Gateway& gw) {
                      recon::reconstruct(c, recon::InterviewPlanTemplate::builtin(),
                                         recon::RoleSettings::builtin(), gw);
                    });
}

struct Criterion {
  int id;
  std::string name;
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "rubric fidelity (45/25/4/10/10/6 = 100, HPI = 19)", rubric_fidelity},
      {2, "scorecard arithmetic on 1000 randomized assignments", scorecard_arithmetic},
      {3, "dialogue invariants and round-trip over 1000 fixtures", dialogue_invariants},
      {4, "end-to-end replay determinism on the 5-case fixture", replay_determinism},
      {5, "statistics oracle on the 10-dialogue hand-labeled fixture", statistics_oracle},
      {6, "export labeling: physician-only targets, counted drops", export_labeling},
      {7, "report layout and percentage-delta computation", report_layout},
      {8, "harness termination and context isolation over 10000 runs", harness_termination},
      {9, "robustness: one re-prompt then a typed error, via cassettes", robustness},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    try {
      criterion.run();
      std::printf("[PASS] %d. %s\n", criterion.id, criterion.name.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("[FAIL] %d. %s: %s\n", criterion.id, criterion.name.c_str(), e.what());
    }
    std::fflush(stdout);
  }
  if (failures) {
    std::printf("%d of %zu acceptance criteria failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu acceptance criteria passed\n", criteria.size());
  return 0;
}
