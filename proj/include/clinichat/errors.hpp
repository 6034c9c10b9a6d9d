#pragma once

#include <stdexcept>
#include <string>

namespace clinichat {

// Every failure the pipeline can signal. Batch runners catch clinichat::Error
// per case and keep going; anything else is a bug.
enum class ErrorKind {
  // corpus
  missing_field,
  unknown_answer_key,
  classification_failed,
  empty_corpus,
  // gateway
  replay_miss,
  provider_error,
  timeout,
  unknown_model,
  // recon
  malformed_knowledge,
  unresolved_placeholder,
  empty_dialogue,
  bad_lead_role,
  no_role_markers,
  prompt_too_long,
  generation_invalid,
  // evalx
  malformed_demo,
  malformed_scorecard,
  empty_results,
  mismatched_rubric,
  // harness
  malformed_agent_output,
  // cli
  unknown_method,
  config_error,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, bool transient = false)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        transient_(transient) {}

  ErrorKind kind() const { return kind_; }

  // Transient errors (network hiccups, 5xx, 429) are worth retrying.
  bool transient() const { return transient_; }

 private:
  ErrorKind kind_;
  bool transient_;
};

}  // namespace clinichat
