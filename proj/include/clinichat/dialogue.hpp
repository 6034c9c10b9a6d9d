#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace clinichat::recon {

enum class Speaker { physician, patient };

const char* to_string(Speaker s);

struct Utterance {
  Speaker role;
  std::string text;

  bool operator==(const Utterance&) const = default;
};

// An interview transcript. A well-formed dialogue alternates strictly,
// starts with the physician, has non-blank utterances, and carries no
// unresolved "{{" template markers. Construction does not enforce this;
// validators and parsers do, so tests can build broken instances.
struct Dialogue {
  std::vector<Utterance> turns;
  std::string language = "en";

  // One turn = a physician utterance plus its patient reply; a trailing
  // unanswered physician utterance still counts as a turn. For a valid
  // physician-first alternating dialogue this equals the number of
  // physician utterances.
  size_t turn_count() const;

  size_t count_role(Speaker role) const;

  // Empty when all structural invariants hold.
  std::vector<std::string> invariant_violations() const;

  bool operator==(const Dialogue&) const = default;
};

// Renders "Physician: ..." / "Patient: ..." lines, one utterance per line.
std::string serialize_dialogue(const Dialogue& d);

void to_json(nlohmann::json& j, const Utterance& u);
void from_json(const nlohmann::json& j, Utterance& u);
void to_json(nlohmann::json& j, const Dialogue& d);
void from_json(const nlohmann::json& j, Dialogue& d);

}  // namespace clinichat::recon
