#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "clinichat/corpus.hpp"
#include "clinichat/dialogue.hpp"
#include "clinichat/gateway.hpp"

namespace clinichat::harness {

// Swappable prompt file for the interaction harness and role-play baselines.
// {{case}} takes the patient's medical record, {{end_marker}} the
// termination sentinel. Only the English pack ships.
struct PromptPack {
  std::string version;
  std::string physician_system;
  std::string patient_system;
  std::string direct_roleplay;
  std::string interactive_physician_system;
  std::string interactive_patient_system;
  std::string external_kickoff;

  static PromptPack english();
  static PromptPack from_json(const nlohmann::json& j);
  static PromptPack load_file(const std::string& path);
};

enum class AgentKind {
  prompted_general,  // general model driven by a system prompt
  external_model,    // interview-specialized model that engages directly
};

struct AgentSpec {
  AgentKind kind = AgentKind::prompted_general;
  recon::Speaker role = recon::Speaker::physician;
  std::string model_id;
  std::string system_prompt;  // empty for external_model
  std::string pack_version;
  double temperature = 0.7;
};

struct InteractionLimits {
  int max_pairs = 80;  // hard cap; roughly twice the longest expected interview
  int max_utterance_tokens = 256;
  // The physician prompt instructs the model to emit the first marker after
  // stating the diagnosis and confirmatory tests.
  std::vector<std::string> termination_markers = {"[END OF INTERVIEW]"};
};

enum class TerminationReason { marker, limit, agent_error };

const char* to_string(TerminationReason r);

struct InteractionResult {
  recon::Dialogue dialogue;
  TerminationReason reason = TerminationReason::limit;
  std::string error_detail;
  std::vector<std::string> fingerprints;
};

// The physician sees only its instructions and the conversation so far; it
// never sees the case, its options, or the answer key.
AgentSpec make_physician_agent(const std::string& model_id, AgentKind kind,
                               const PromptPack& pack, const InteractionLimits& limits);

// The patient is always a prompted general model seeded with the case.
AgentSpec make_patient_agent(const corpus::CaseStudyQuestion& c, const std::string& model_id,
                             const PromptPack& pack);

/// Alternating physician/patient loop until the physician emits a
/// termination marker or max_pairs is reached. Agent output is sanitized
/// (role-prefix echoes stripped, hallucinated counterpart lines cut) so the
/// emitted dialogue always satisfies the structural invariants; an utterance
/// still blank after one retry ends the run with reason agent_error.
InteractionResult run_interaction(const corpus::CaseStudyQuestion& c, const AgentSpec& physician,
                                  const AgentSpec& patient, const InteractionLimits& limits,
                                  gateway::Gateway& gw);

// Single-call baseline: one prompt asks the model to write the entire
// interview from the case (answer included), parsed with the strict
// line-format parser. Parse errors propagate.
recon::Dialogue direct_roleplay_generate(const corpus::CaseStudyQuestion& c,
                                         const std::string& model_id, gateway::Gateway& gw,
                                         const PromptPack& pack, double temperature = 0.7);

// Two prompted agents backed by the same model, run through run_interaction.
InteractionResult interactive_roleplay_generate(const corpus::CaseStudyQuestion& c,
                                                const std::string& model_id,
                                                const InteractionLimits& limits,
                                                gateway::Gateway& gw, const PromptPack& pack,
                                                double temperature = 0.7);

}  // namespace clinichat::harness
