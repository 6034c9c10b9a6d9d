#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "clinichat/corpus.hpp"
#include "clinichat/dialogue.hpp"
#include "clinichat/gateway.hpp"

namespace clinichat::recon {

// The knowledge elements the interview plan can reference as {{key}} slots.
enum class PlaceholderKey {
  most_likely_disease,
  differential_diagnosis,
  diagnostic_basis,
  confirmatory_tests,
  signs_and_symptoms,
  risk_factors,
  customized_inquiry,
};

const char* to_string(PlaceholderKey key);
std::optional<PlaceholderKey> placeholder_key_from_string(const std::string& name);

struct DifferentialEntry {
  std::string disease;
  std::string distinguishing_feature;

  bool operator==(const DifferentialEntry&) const = default;
};

// The diagnostic + disease knowledge produced by the knowledge-preparation
// step. Every list must be non-empty, except the differential, which may be
// empty only when the generator explicitly said "none".
struct KnowledgeBundle {
  std::string most_likely_disease;
  std::vector<DifferentialEntry> differential_diagnosis;
  bool differential_explicit_none = false;
  std::vector<std::string> diagnostic_basis;
  std::vector<std::string> confirmatory_tests;
  std::vector<std::string> signs_and_symptoms;
  std::vector<std::string> risk_factors;
  std::vector<std::string> customized_inquiry;
};

void to_json(nlohmann::json& j, const KnowledgeBundle& k);
void from_json(const nlohmann::json& j, KnowledgeBundle& k);

/// The manually planned interview process, shipped as versioned editable
/// text. Headings: "# " sections (Subjective/Objective/Assessment/Plan in
/// order), "## " subsections; other non-empty lines are content items.
/// Parsing enforces the structural invariants: a customized-inquiry
/// subsection under Subjective, and no treatment content in Plan.
/// Placeholder keys are checked at render time.
struct InterviewPlanTemplate {
  struct Section {
    std::string title;
    std::vector<std::string> items;
    std::vector<Section> subsections;
  };

  std::string version;
  std::string text;      // raw template text, placeholders included
  std::string checksum;  // fnv1a64 of text, recorded into DialogueRecords
  std::vector<Section> sections;

  static InterviewPlanTemplate parse(const std::string& text);
  static InterviewPlanTemplate builtin();
};

struct RoleSettings {
  std::string version;
  std::vector<std::string> physician_rules;
  std::vector<std::string> patient_rules;

  // Format: "version:" line, then "[physician]" / "[patient]" blocks of
  // "- rule" lines. The patient block must contain the out-of-note
  // "No"/"Not sure" refusal rule.
  static RoleSettings parse(const std::string& text);
  static RoleSettings builtin();
};

struct ReconOptions {
  std::string model_id = "glm-4-air";
  double temperature = 0.7;
  int max_output_tokens = 4096;
  long max_prompt_tokens = 8000;  // whitespace-estimated budget for one prompt
  int min_pairs = 10;
  int max_pairs = 80;
  std::string language = "en";
};

gateway::ChatRequest build_knowledge_prompt(const corpus::CaseStudyQuestion& c,
                                            const ReconOptions& opts = {});

// Parses a knowledge reply: JSON object preferred, heading-style fallback.
// Throws MalformedKnowledge naming every missing or empty field.
KnowledgeBundle parse_knowledge(const std::string& reply_text);

struct KnowledgeResult {
  KnowledgeBundle bundle;
  int attempts = 1;
  std::vector<std::string> fingerprints;
};

// Knowledge prompt -> parse, with one corrective re-prompt on a malformed
// reply. At most 2 chat calls.
KnowledgeResult request_knowledge(gateway::Gateway& gw, const corpus::CaseStudyQuestion& c,
                                  const ReconOptions& opts = {});

// Replaces every {{key}} with the bundle content (lists become "- item"
// bullets). The result contains no "{{" marker. Unknown keys and keys with
// no content raise UnresolvedPlaceholder. Rendering rendered text is the
// identity.
std::string render_plan(const InterviewPlanTemplate& tpl, const KnowledgeBundle& knowledge);

gateway::ChatRequest build_generation_prompt(const std::string& filled_plan,
                                             const RoleSettings& roles,
                                             const corpus::CaseStudyQuestion& c,
                                             const ReconOptions& opts = {});

struct ParsedDialogue {
  Dialogue dialogue;
  std::vector<std::string> warnings;
};

// Splits "Physician: ..." / "Patient: ..." lines into a Dialogue.
// Continuation lines attach to the current utterance; consecutive same-role
// utterances merge with a warning. Throws EmptyDialogue, BadLeadRole, or
// NoRoleMarkers.
ParsedDialogue parse_dialogue(const std::string& reply_text);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool passed() const;
  std::vector<std::string> failures() const;
  std::string summary() const;
};

void to_json(nlohmann::json& j, const ValidationReport& r);
void from_json(const nlohmann::json& j, ValidationReport& r);

// Structure checks (alternation, physician-first, blank utterances), turn
// bounds, placeholder leakage, and the assessment-mention check (some
// physician utterance names the most likely disease, case-insensitively).
ValidationReport validate_dialogue(const Dialogue& d, const KnowledgeBundle& knowledge,
                                   const ReconOptions& opts = {});

struct DialogueRecord {
  std::string case_id;
  Dialogue dialogue;
  KnowledgeBundle knowledge;
  std::string template_version;
  std::string template_checksum;
  std::string model_id;
  std::vector<std::string> fingerprints;
  ValidationReport validation;
  int knowledge_attempts = 1;
  int generation_attempts = 1;
};

void to_json(nlohmann::json& j, const DialogueRecord& r);
void from_json(const nlohmann::json& j, DialogueRecord& r);

// The full Clini-Recon pass for one case: knowledge preparation (one
// corrective re-prompt), plan rendering, single-call dialogue generation
// (one corrective regeneration on validation failure). At most 2 knowledge
// calls and 2 generation calls.
DialogueRecord reconstruct(const corpus::CaseStudyQuestion& c, const InterviewPlanTemplate& tpl,
                           const RoleSettings& roles, gateway::Gateway& gw,
                           const ReconOptions& opts = {});

}  // namespace clinichat::recon
