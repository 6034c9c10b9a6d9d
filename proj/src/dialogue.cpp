#include "clinichat/dialogue.hpp"

#include "clinichat/text.hpp"

namespace clinichat::recon {

const char* to_string(Speaker s) {
  return s == Speaker::physician ? "physician" : "patient";
}

size_t Dialogue::turn_count() const {
  size_t pairs = 0;
  for (const auto& u : turns) {
    if (u.role == Speaker::physician) ++pairs;
  }
  return pairs;
}

size_t Dialogue::count_role(Speaker role) const {
  size_t n = 0;
  for (const auto& u : turns) {
    if (u.role == role) ++n;
  }
  return n;
}

std::vector<std::string> Dialogue::invariant_violations() const {
  std::vector<std::string> v;
  if (!turns.empty() && turns.front().role != Speaker::physician) {
    v.push_back("first utterance is not the physician's");
  }
  for (size_t i = 1; i < turns.size(); ++i) {
    if (turns[i].role == turns[i - 1].role) {
      v.push_back("roles do not alternate at utterance " + std::to_string(i));
      break;
    }
  }
  for (size_t i = 0; i < turns.size(); ++i) {
    if (text::trim(turns[i].text).empty()) {
      v.push_back("utterance " + std::to_string(i) + " is blank");
      break;
    }
  }
  for (size_t i = 0; i < turns.size(); ++i) {
    if (turns[i].text.find("{{") != std::string::npos) {
      v.push_back("utterance " + std::to_string(i) + " contains an unresolved placeholder marker");
      break;
    }
  }
  return v;
}

std::string serialize_dialogue(const Dialogue& d) {
  std::string out;
  for (const auto& u : d.turns) {
    out += (u.role == Speaker::physician) ? "Physician: " : "Patient: ";
    out += u.text;
    out += '\n';
  }
  return out;
}

void to_json(nlohmann::json& j, const Utterance& u) {
  j = nlohmann::json{{"role", to_string(u.role)}, {"text", u.text}};
}

void from_json(const nlohmann::json& j, Utterance& u) {
  std::string role = j.at("role").get<std::string>();
  u.role = (role == "physician") ? Speaker::physician : Speaker::patient;
  u.text = j.at("text").get<std::string>();
}

void to_json(nlohmann::json& j, const Dialogue& d) {
  j = nlohmann::json{{"language", d.language}, {"turns", d.turns}};
}

void from_json(const nlohmann::json& j, Dialogue& d) {
  d.language = j.value("language", "en");
  d.turns = j.at("turns").get<std::vector<Utterance>>();
}

}  // namespace clinichat::recon
