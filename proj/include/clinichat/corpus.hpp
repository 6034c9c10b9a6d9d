#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "clinichat/dialogue.hpp"
#include "clinichat/gateway.hpp"

namespace clinichat::corpus {

struct CaseOption {
  std::string label;
  std::string text;
};

// A licensing-exam case study question used as a clinical-note surrogate.
struct CaseStudyQuestion {
  std::string id;
  std::string vignette;       // patient description incl. exam findings
  std::string question_stem;  // the diagnosis / next-step question
  std::vector<CaseOption> options;
  std::string answer_key;
  std::string answer_text;  // resolved from answer_key
  std::optional<std::string> department;
  nlohmann::json meta;

  const std::string& option_text(const std::string& label) const;  // throws UnknownAnswerKey
};

// Parses one corpus record: {id, question, options: {label: text}, answer, meta}.
// The stem may be given explicitly as question_stem; otherwise it is split
// off as the final interrogative sentence of the question text.
CaseStudyQuestion parse_case(const nlohmann::json& raw);

void to_json(nlohmann::json& j, const CaseStudyQuestion& c);

// The vignette+stem mapped onto the clinical-note structure. subjective and
// objective partition the vignette exactly; the query is the stem verbatim.
struct SoapView {
  std::string subjective;
  std::string objective;
  std::string assessment_plan_query;
  size_t objective_offset = 0;  // index into the vignette where objective starts
};

struct SoapCues {
  // Ordered, matched case-insensitively; the earliest occurrence of any cue
  // starts the objective span.
  std::vector<std::string> objective_cues = {
      "physical examination", "on examination",     "examination shows",
      "vital signs",          "laboratory",         "temperature is",
      "blood pressure is",    "pulse is",           "auscultation",
      "her temperature",      "his temperature",    "x-ray shows",
  };
  // A subjective sentence containing any of these counts as medical history.
  std::vector<std::string> history_cues = {
      "history", "ago",         "since",    "for the past", "has had",
      "has been", "previously", "diagnosed", "reports",     "presents",
  };
};

SoapView segment_soap(const CaseStudyQuestion& c, const SoapCues& cues = {});

// The fixed 19-department taxonomy plus per-department reply aliases and
// fallback keyword rules, shipped as a versioned asset.
class DepartmentTaxonomy {
 public:
  struct Entry {
    std::string name;
    std::vector<std::string> aliases;
    std::vector<std::string> keywords;
  };

  static DepartmentTaxonomy builtin();
  static DepartmentTaxonomy from_json(const nlohmann::json& j);

  const std::string& version() const { return version_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<std::string> names() const;
  bool is_member(const std::string& name) const;

  // Maps a free-form model reply onto a taxonomy name (trims, folds case,
  // resolves aliases). nullopt when nothing matches.
  std::optional<std::string> normalize(const std::string& reply) const;

  // Deterministic keyword fallback: most keyword hits wins, ties break by
  // taxonomy order, zero hits -> nullopt.
  std::optional<std::string> classify_by_rules(const std::string& case_text) const;

 private:
  std::string version_;
  std::vector<Entry> entries_;
};

struct ClassifierOptions {
  std::string model_id;
  double temperature = 0.0;
  int max_output_tokens = 32;
};

// LLM-backed classification constrained to the taxonomy, with one re-prompt
// on a non-member reply and the keyword rules as final fallback. Without a
// gateway it is rules-only.
class DepartmentClassifier {
 public:
  explicit DepartmentClassifier(DepartmentTaxonomy taxonomy,
                                gateway::Gateway* gw = nullptr,
                                ClassifierOptions options = {});

  std::string classify(const CaseStudyQuestion& c) const;  // throws ClassificationFailed

  gateway::ChatRequest build_prompt(const CaseStudyQuestion& c) const;
  const DepartmentTaxonomy& taxonomy() const { return taxonomy_; }

 private:
  DepartmentTaxonomy taxonomy_;
  gateway::Gateway* gateway_;
  ClassifierOptions options_;
};

struct Eligibility {
  bool pass = false;
  std::vector<std::string> reasons;  // which sufficiency checks failed
};

// Heuristic version of the manual sufficiency screen: chief complaint
// (non-empty subjective), medical history (>= 1 history sentence), and exam
// results (non-empty objective span). Pure and deterministic.
Eligibility filter_eligible(const CaseStudyQuestion& c, const SoapCues& cues = {});

struct DatasetStats {
  size_t max_turns = 0;
  size_t min_turns = 0;
  double avg_turns = 0.0;
  double avg_words_patient = 0.0;
  double avg_words_physician = 0.0;
  size_t n_dialogues = 0;
};

void to_json(nlohmann::json& j, const DatasetStats& s);

// Turn = one physician utterance plus its patient reply (a trailing
// unanswered physician utterance counts as one turn). Word averages are
// arithmetic means over all utterances of the role across the corpus.
DatasetStats compute_stats(std::span<const recon::Dialogue> dialogues);

}  // namespace clinichat::corpus
