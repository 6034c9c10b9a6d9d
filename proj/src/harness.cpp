#include "clinichat/harness.hpp"

#include "clinichat/assets.hpp"
#include "clinichat/jsonl.hpp"
#include "clinichat/recon.hpp"
#include "clinichat/text.hpp"

namespace clinichat::harness {

using gateway::ChatRequest;
using gateway::MessageRole;
using nlohmann::json;
using recon::Speaker;

PromptPack PromptPack::english() {
  return from_json(json::parse(assets::prompt_pack_en_json()));
}

PromptPack PromptPack::from_json(const json& j) {
  PromptPack p;
  p.version = j.at("version").get<std::string>();
  p.physician_system = j.at("physician_system").get<std::string>();
  p.patient_system = j.at("patient_system").get<std::string>();
  p.direct_roleplay = j.at("direct_roleplay").get<std::string>();
  p.interactive_physician_system = j.at("interactive_physician_system").get<std::string>();
  p.interactive_patient_system = j.at("interactive_patient_system").get<std::string>();
  p.external_kickoff = j.value("external_kickoff", "Hello, doctor.");
  return p;
}

PromptPack PromptPack::load_file(const std::string& path) {
  return from_json(json::parse(jsonl::read_text_file(path)));
}

const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::marker: return "marker";
    case TerminationReason::limit: return "limit";
    case TerminationReason::agent_error: return "agent_error";
  }
  return "limit";
}

AgentSpec make_physician_agent(const std::string& model_id, AgentKind kind,
                               const PromptPack& pack, const InteractionLimits& limits) {
  AgentSpec a;
  a.kind = kind;
  a.role = Speaker::physician;
  a.model_id = model_id;
  a.pack_version = pack.version;
  if (kind == AgentKind::prompted_general) {
    std::string marker =
        limits.termination_markers.empty() ? "[END OF INTERVIEW]" : limits.termination_markers[0];
    a.system_prompt = text::replace_all(pack.physician_system, "{{end_marker}}", marker);
  }
  return a;
}

AgentSpec make_patient_agent(const corpus::CaseStudyQuestion& c, const std::string& model_id,
                             const PromptPack& pack) {
  AgentSpec a;
  a.kind = AgentKind::prompted_general;
  a.role = Speaker::patient;
  a.model_id = model_id;
  a.pack_version = pack.version;
  a.system_prompt = text::replace_all(pack.patient_system, "{{case}}", c.vignette);
  return a;
}

namespace {

bool line_is_counterpart(const std::string& line, Speaker own_role) {
  std::string t = text::to_lower(text::trim(line));
  const char* other = own_role == Speaker::physician ? "patient" : "physician";
  if (t.rfind(other, 0) != 0) return false;
  size_t after = std::string(other).size();
  while (after < t.size() && (t[after] == '*' || t[after] == ' ')) ++after;
  return after < t.size() && t[after] == ':';
}

std::string strip_own_prefix(const std::string& line, Speaker own_role) {
  std::string t = text::trim(line);
  std::string lowered = text::to_lower(t);
  const char* own = own_role == Speaker::physician ? "physician" : "patient";
  if (lowered.rfind(own, 0) == 0) {
    size_t after = std::string(own).size();
    while (after < t.size() && (t[after] == '*' || t[after] == ' ')) ++after;
    if (after < t.size() && t[after] == ':') return text::trim(t.substr(after + 1));
  }
  return t;
}

struct Sanitized {
  std::string utterance;
  bool saw_marker = false;
};

// Keeps the agent's own first utterance: cuts at the first hallucinated
// counterpart line, strips role-prefix echoes and termination markers.
Sanitized sanitize_utterance(const std::string& raw, Speaker own_role,
                             const std::vector<std::string>& markers) {
  Sanitized out;
  std::vector<std::string> kept;
  bool first = true;
  for (const auto& line : text::split_lines(raw)) {
    if (line_is_counterpart(line, own_role)) break;
    std::string t = first ? strip_own_prefix(line, own_role) : text::trim(line);
    first = false;
    if (!t.empty()) kept.push_back(t);
  }
  std::string joined = text::join(kept, " ");
  for (const auto& m : markers) {
    if (m.empty()) continue;
    if (joined.find(m) != std::string::npos) {
      out.saw_marker = true;
      joined = text::replace_all(joined, m, "");
    }
  }
  out.utterance = text::trim(joined);
  return out;
}

ChatRequest agent_request(const AgentSpec& agent, const recon::Dialogue& so_far,
                          const InteractionLimits& limits, const std::string& kickoff) {
  ChatRequest req;
  req.model_id = agent.model_id;
  req.temperature = agent.temperature;
  req.max_output_tokens = limits.max_utterance_tokens;
  req.tag = agent.role == Speaker::physician ? "harness.physician" : "harness.patient";
  if (agent.kind == AgentKind::prompted_general) {
    req.add(MessageRole::system, agent.system_prompt);
  } else if (so_far.turns.empty()) {
    // External models engage directly and need a conversation opener; it is
    // not part of the emitted transcript.
    req.add(MessageRole::user, kickoff);
  }
  for (const auto& u : so_far.turns) {
    req.add(u.role == agent.role ? MessageRole::assistant : MessageRole::user, u.text);
  }
  return req;
}

}  // namespace

InteractionResult run_interaction(const corpus::CaseStudyQuestion& c, const AgentSpec& physician,
                                  const AgentSpec& patient, const InteractionLimits& limits,
                                  gateway::Gateway& gw) {
  (void)c;  // the case is already baked into the patient's system prompt
  if (patient.kind != AgentKind::prompted_general) {
    throw Error(ErrorKind::config_error, "patient agents must be prompted general models");
  }
  if (limits.max_pairs < 0) {
    throw Error(ErrorKind::config_error, "max_pairs must be >= 0");
  }

  InteractionResult res;
  res.reason = TerminationReason::limit;
  const std::string kickoff =
      physician.kind == AgentKind::external_model ? PromptPack::english().external_kickoff : "";

  auto speak = [&](const AgentSpec& agent) -> std::optional<Sanitized> {
    ChatRequest req = agent_request(agent, res.dialogue, limits, kickoff);
    for (int attempt = 0; attempt < 2; ++attempt) {
      res.fingerprints.push_back(gateway::fingerprint(req));
      auto resp = gw.chat(req);
      Sanitized s = sanitize_utterance(resp.text, agent.role, limits.termination_markers);
      if (!s.utterance.empty() || s.saw_marker) return s;
    }
    return std::nullopt;
  };

  for (int pair = 0; pair < limits.max_pairs; ++pair) {
    auto phys = speak(physician);
    if (!phys) {
      res.reason = TerminationReason::agent_error;
      res.error_detail = "physician utterance blank after retry at pair " +
                         std::to_string(pair + 1);
      break;
    }
    if (!phys->utterance.empty()) {
      res.dialogue.turns.push_back({Speaker::physician, phys->utterance});
    }
    if (phys->saw_marker) {
      res.reason = TerminationReason::marker;
      break;
    }
    auto pat = speak(patient);
    if (!pat) {
      res.reason = TerminationReason::agent_error;
      res.error_detail = "patient utterance blank after retry at pair " +
                         std::to_string(pair + 1);
      break;
    }
    res.dialogue.turns.push_back({Speaker::patient, pat->utterance});
  }
  return res;
}

recon::Dialogue direct_roleplay_generate(const corpus::CaseStudyQuestion& c,
                                         const std::string& model_id, gateway::Gateway& gw,
                                         const PromptPack& pack, double temperature) {
  std::string case_text = c.vignette;
  if (!c.question_stem.empty()) case_text += "\n\nQuestion: " + c.question_stem;
  if (!c.options.empty()) {
    case_text += "\nOptions:";
    for (const auto& opt : c.options) case_text += "\n" + opt.label + ". " + opt.text;
    case_text += "\nCorrect answer: " + c.answer_key + ". " + c.answer_text;
  }
  ChatRequest req;
  req.model_id = model_id;
  req.temperature = temperature;
  req.max_output_tokens = 4096;
  req.tag = "baseline.direct";
  req.add(MessageRole::user, text::replace_all(pack.direct_roleplay, "{{case}}", case_text));
  auto resp = gw.chat(req);
  recon::ParsedDialogue parsed = recon::parse_dialogue(resp.text);
  return parsed.dialogue;
}

InteractionResult interactive_roleplay_generate(const corpus::CaseStudyQuestion& c,
                                                const std::string& model_id,
                                                const InteractionLimits& limits,
                                                gateway::Gateway& gw, const PromptPack& pack,
                                                double temperature) {
  std::string marker =
      limits.termination_markers.empty() ? "[END OF INTERVIEW]" : limits.termination_markers[0];
  AgentSpec physician;
  physician.kind = AgentKind::prompted_general;
  physician.role = Speaker::physician;
  physician.model_id = model_id;
  physician.pack_version = pack.version;
  physician.temperature = temperature;
  physician.system_prompt =
      text::replace_all(pack.interactive_physician_system, "{{end_marker}}", marker);

  AgentSpec patient;
  patient.kind = AgentKind::prompted_general;
  patient.role = Speaker::patient;
  patient.model_id = model_id;
  patient.pack_version = pack.version;
  patient.temperature = temperature;
  patient.system_prompt =
      text::replace_all(pack.interactive_patient_system, "{{case}}", c.vignette);

  return run_interaction(c, physician, patient, limits, gw);
}

}  // namespace clinichat::harness
