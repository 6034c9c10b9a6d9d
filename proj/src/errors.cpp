#include "clinichat/errors.hpp"

namespace clinichat {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::missing_field: return "MissingField";
    case ErrorKind::unknown_answer_key: return "UnknownAnswerKey";
    case ErrorKind::classification_failed: return "ClassificationFailed";
    case ErrorKind::empty_corpus: return "EmptyCorpus";
    case ErrorKind::replay_miss: return "ReplayMiss";
    case ErrorKind::provider_error: return "ProviderError";
    case ErrorKind::timeout: return "Timeout";
    case ErrorKind::unknown_model: return "UnknownModel";
    case ErrorKind::malformed_knowledge: return "MalformedKnowledge";
    case ErrorKind::unresolved_placeholder: return "UnresolvedPlaceholder";
    case ErrorKind::empty_dialogue: return "EmptyDialogue";
    case ErrorKind::bad_lead_role: return "BadLeadRole";
    case ErrorKind::no_role_markers: return "NoRoleMarkers";
    case ErrorKind::prompt_too_long: return "PromptTooLong";
    case ErrorKind::generation_invalid: return "GenerationInvalid";
    case ErrorKind::malformed_demo: return "MalformedDemo";
    case ErrorKind::malformed_scorecard: return "MalformedScoreCard";
    case ErrorKind::empty_results: return "EmptyResults";
    case ErrorKind::mismatched_rubric: return "MismatchedRubric";
    case ErrorKind::malformed_agent_output: return "MalformedAgentOutput";
    case ErrorKind::unknown_method: return "UnknownMethod";
    case ErrorKind::config_error: return "ConfigError";
  }
  return "Error";
}

}  // namespace clinichat
