#pragma once

#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "clinichat/corpus.hpp"
#include "clinichat/dialogue.hpp"
#include "clinichat/gateway.hpp"

namespace clinichat::evalx {

struct RubricNode {
  std::string id;
  std::string name;
  std::string description;
  double max_points = 0.0;
  std::vector<RubricNode> children;

  bool is_leaf() const { return children.empty(); }
};

/// The 100-point interview scoring system: six top-level groups whose leaf
/// maxima sum to exactly the group maxima at every level. Loaded from a
/// versioned data file (or the built-in asset) and re-validated on load.
class Rubric {
 public:
  static Rubric canonical();
  static Rubric from_json(const nlohmann::json& j);
  static Rubric load_file(const std::string& path);

  const std::string& version() const { return version_; }
  const std::vector<RubricNode>& groups() const { return groups_; }
  std::vector<const RubricNode*> leaves() const;
  const RubricNode* find_leaf(const std::string& id) const;
  const RubricNode* find_node(const std::string& id) const;
  // The top-level group a leaf belongs to.
  const RubricNode* group_of(const std::string& leaf_id) const;
  double total_max() const;

 private:
  std::string version_;
  std::vector<RubricNode> groups_;
};

// The expert interview demonstration produced in phase one of Demo2Eval.
struct InterviewDemo {
  struct Conclusions {
    std::string most_likely_disease;
    std::vector<std::string> differential_diagnoses;
    bool differential_explicit_none = false;
    std::vector<std::string> diagnosis_basis;
    std::vector<std::string> confirmation_tests;
  };
  struct PlanPoint {
    std::string topic;
    std::string rationale;
  };

  Conclusions conclusions;
  std::vector<PlanPoint> history_plan;
};

void to_json(nlohmann::json& j, const InterviewDemo& d);
void from_json(const nlohmann::json& j, InterviewDemo& d);

struct ScoreCard {
  std::map<std::string, double> leaf_scores;  // rubric leaf id -> score
  std::string subjective_assessment;
  std::map<std::string, double> per_group;  // recomputed from leaves
  double total = 0.0;                       // recomputed from leaves
};

void to_json(nlohmann::json& j, const ScoreCard& s);
void from_json(const nlohmann::json& j, ScoreCard& s);

struct EvalOptions {
  std::string judge_model_id = "gpt-4o";
  double temperature = 0.0;
  int max_output_tokens = 4096;
  // Exam-style cases withhold the answer, so phase one instructs the judge
  // to reason to the conclusion rather than extract it.
  bool answer_withheld = true;
};

gateway::ChatRequest build_demo_prompt(const corpus::CaseStudyQuestion& c,
                                       const EvalOptions& opts = {});

// Throws MalformedDemo when conclusions or the history plan are missing.
InterviewDemo parse_demo(const std::string& reply_text);

struct DemoResult {
  InterviewDemo demo;
  int attempts = 1;
  std::vector<std::string> fingerprints;
};

DemoResult request_demo(gateway::Gateway& gw, const corpus::CaseStudyQuestion& c,
                        const EvalOptions& opts = {});

gateway::ChatRequest build_eval_prompt(const InterviewDemo& demo, const recon::Dialogue& dialogue,
                                       const Rubric& rubric, const EvalOptions& opts = {});

// Parses per-leaf scores by identifier and recomputes per-group sums and the
// total; model-reported totals are ignored. A missing leaf, out-of-range
// score, or non-numeric value throws MalformedScoreCard naming the
// violations, and scores are never clamped.
ScoreCard parse_scorecard(const std::string& reply_text, const Rubric& rubric);

struct ScoreCardResult {
  ScoreCard card;
  int attempts = 1;
  std::vector<std::string> fingerprints;
};

ScoreCardResult request_scorecard(gateway::Gateway& gw, const InterviewDemo& demo,
                                  const recon::Dialogue& dialogue, const Rubric& rubric,
                                  const EvalOptions& opts = {});

struct EvalProvenance {
  std::string judge_model_id;
  std::string rubric_version;
  std::vector<std::string> fingerprints;
  int demo_attempts = 1;
  int score_attempts = 1;
};

struct EvalResult {
  std::string case_id;
  InterviewDemo demo;
  ScoreCard scorecard;
  EvalProvenance provenance;
};

void to_json(nlohmann::json& j, const EvalResult& r);
void from_json(const nlohmann::json& j, EvalResult& r);

// The demo depends only on the clinical note, so it is generated once per
// case and shared across dialogues. get_or_create is atomic per case id;
// concurrent callers for the same case block on the first computation.
class DemoCache {
 public:
  DemoResult get_or_create(const std::string& case_id, const std::function<DemoResult()>& make);
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_future<DemoResult>> futures_;
};

// Both Demo2Eval phases for one (case, dialogue) pair.
EvalResult evaluate(const corpus::CaseStudyQuestion& c, const recon::Dialogue& dialogue,
                    gateway::Gateway& gw, const Rubric& rubric, const EvalOptions& opts = {},
                    DemoCache* cache = nullptr);

// Percentage improvement rounded half away from zero to an integer.
// nullopt when the baseline is zero.
std::optional<int> percent_delta(double ours, double baseline);

struct EvalReport {
  size_t n = 0;
  std::string rubric_version;
  std::map<std::string, double> means;  // group id -> mean, plus "total"
  struct Bucket {
    size_t n = 0;
    std::map<std::string, double> means;
  };
  std::map<std::string, Bucket> buckets;
  std::map<std::string, int> deltas_pct;  // vs. baseline means
  std::map<std::string, std::map<std::string, int>> bucket_deltas_pct;
};

void to_json(nlohmann::json& j, const EvalReport& r);
void from_json(const nlohmann::json& j, EvalReport& r);

struct AggregateOptions {
  const EvalReport* baseline = nullptr;
  // case id -> bucket label (e.g. department); results without an entry go
  // to "Unknown".
  const std::map<std::string, std::string>* bucket_of = nullptr;
};

// Arithmetic means per group and total, optional bucketing, optional
// percentage deltas versus a baseline report. Permutation-invariant.
EvalReport aggregate(std::span<const EvalResult> results, const Rubric& rubric,
                     const AggregateOptions& opts = {});

}  // namespace clinichat::evalx
