#include "clinichat/recon.hpp"

#include <algorithm>
#include <array>

#include "clinichat/assets.hpp"
#include "clinichat/text.hpp"

namespace clinichat::recon {

using gateway::ChatRequest;
using gateway::MessageRole;
using nlohmann::json;

namespace {

constexpr std::array<PlaceholderKey, 7> kAllKeys = {
    PlaceholderKey::most_likely_disease, PlaceholderKey::differential_diagnosis,
    PlaceholderKey::diagnostic_basis,    PlaceholderKey::confirmatory_tests,
    PlaceholderKey::signs_and_symptoms,  PlaceholderKey::risk_factors,
    PlaceholderKey::customized_inquiry,
};

}  // namespace

const char* to_string(PlaceholderKey key) {
  switch (key) {
    case PlaceholderKey::most_likely_disease: return "most_likely_disease";
    case PlaceholderKey::differential_diagnosis: return "differential_diagnosis";
    case PlaceholderKey::diagnostic_basis: return "diagnostic_basis";
    case PlaceholderKey::confirmatory_tests: return "confirmatory_tests";
    case PlaceholderKey::signs_and_symptoms: return "signs_and_symptoms";
    case PlaceholderKey::risk_factors: return "risk_factors";
    case PlaceholderKey::customized_inquiry: return "customized_inquiry";
  }
  return "";
}

std::optional<PlaceholderKey> placeholder_key_from_string(const std::string& name) {
  for (PlaceholderKey key : kAllKeys) {
    if (name == to_string(key)) return key;
  }
  return std::nullopt;
}

void to_json(json& j, const KnowledgeBundle& k) {
  json diff = json::array();
  for (const auto& d : k.differential_diagnosis) {
    diff.push_back({{"disease", d.disease}, {"distinguishing_feature", d.distinguishing_feature}});
  }
  j = json{{"most_likely_disease", k.most_likely_disease},
           {"differential_diagnosis", diff},
           {"differential_explicit_none", k.differential_explicit_none},
           {"diagnostic_basis", k.diagnostic_basis},
           {"confirmatory_tests", k.confirmatory_tests},
           {"signs_and_symptoms", k.signs_and_symptoms},
           {"risk_factors", k.risk_factors},
           {"customized_inquiry", k.customized_inquiry}};
}

void from_json(const json& j, KnowledgeBundle& k) {
  k.most_likely_disease = j.at("most_likely_disease").get<std::string>();
  k.differential_diagnosis.clear();
  for (const auto& d : j.at("differential_diagnosis")) {
    k.differential_diagnosis.push_back(
        {d.at("disease").get<std::string>(), d.value("distinguishing_feature", "")});
  }
  k.differential_explicit_none = j.value("differential_explicit_none", false);
  k.diagnostic_basis = j.at("diagnostic_basis").get<std::vector<std::string>>();
  k.confirmatory_tests = j.at("confirmatory_tests").get<std::vector<std::string>>();
  k.signs_and_symptoms = j.at("signs_and_symptoms").get<std::vector<std::string>>();
  k.risk_factors = j.at("risk_factors").get<std::vector<std::string>>();
  k.customized_inquiry = j.at("customized_inquiry").get<std::vector<std::string>>();
}

// ---------------------------------------------------------------------------
// Template and role settings

namespace {

const std::vector<std::string> kPlanTreatmentTerms = {"treatment", "prescrib", "therapy",
                                                      "medication regimen"};

}  // namespace

InterviewPlanTemplate InterviewPlanTemplate::parse(const std::string& raw) {
  InterviewPlanTemplate tpl;
  tpl.text = raw;
  tpl.checksum = text::fnv1a64_hex(raw);

  Section* section = nullptr;
  Section* subsection = nullptr;
  for (const auto& line : text::split_lines(raw)) {
    std::string t = text::trim(line);
    if (t.empty()) continue;
    if (tpl.version.empty() && t.rfind("version:", 0) == 0) {
      tpl.version = text::trim(t.substr(8));
      continue;
    }
    if (t.rfind("## ", 0) == 0) {
      if (!section) throw Error(ErrorKind::config_error, "template subsection before any section");
      section->subsections.push_back({text::trim(t.substr(3)), {}, {}});
      subsection = &section->subsections.back();
      continue;
    }
    if (t.rfind("# ", 0) == 0) {
      tpl.sections.push_back({text::trim(t.substr(2)), {}, {}});
      section = &tpl.sections.back();
      subsection = nullptr;
      continue;
    }
    std::string item = t.rfind("- ", 0) == 0 ? text::trim(t.substr(2)) : t;
    if (subsection) {
      subsection->items.push_back(item);
    } else if (section) {
      section->items.push_back(item);
    }
    // text before the first heading is ignored
  }

  if (tpl.version.empty()) throw Error(ErrorKind::config_error, "template has no version line");

  const std::array<const char*, 4> order = {"subjective", "objective", "assessment", "plan"};
  if (tpl.sections.size() < 4) {
    throw Error(ErrorKind::config_error, "template must have the four note sections");
  }
  size_t want = 0;
  for (const auto& s : tpl.sections) {
    if (want < order.size() && text::contains_ci(s.title, order[want])) ++want;
  }
  if (want != order.size()) {
    throw Error(ErrorKind::config_error,
                "template sections must appear in subjective/objective/assessment/plan order");
  }

  const Section& subjective = tpl.sections.front();
  bool has_customized = std::any_of(
      subjective.subsections.begin(), subjective.subsections.end(),
      [](const Section& s) { return text::contains_ci(s.title, "customized inquiry"); });
  if (!has_customized) {
    throw Error(ErrorKind::config_error,
                "template has no customized-inquiry subsection under Subjective");
  }

  const Section& plan = tpl.sections.back();
  for (const auto& item : plan.items) {
    for (const auto& term : kPlanTreatmentTerms) {
      if (text::contains_ci(item, term)) {
        throw Error(ErrorKind::config_error, "plan section contains treatment content: " + item);
      }
    }
  }
  return tpl;
}

InterviewPlanTemplate InterviewPlanTemplate::builtin() {
  return parse(assets::interview_plan_template());
}

RoleSettings RoleSettings::parse(const std::string& raw) {
  RoleSettings rs;
  std::vector<std::string>* bucket = nullptr;
  for (const auto& line : text::split_lines(raw)) {
    std::string t = text::trim(line);
    if (t.empty()) continue;
    if (rs.version.empty() && t.rfind("version:", 0) == 0) {
      rs.version = text::trim(t.substr(8));
      continue;
    }
    if (t == "[physician]") {
      bucket = &rs.physician_rules;
      continue;
    }
    if (t == "[patient]") {
      bucket = &rs.patient_rules;
      continue;
    }
    if (t.rfind("- ", 0) == 0 && bucket) bucket->push_back(text::trim(t.substr(2)));
  }
  if (rs.physician_rules.empty() || rs.patient_rules.empty()) {
    throw Error(ErrorKind::config_error, "role settings need physician and patient rules");
  }
  bool has_refusal = std::any_of(rs.patient_rules.begin(), rs.patient_rules.end(),
                                 [](const std::string& r) {
                                   return text::contains_ci(r, "\"No\" or \"Not sure\"");
                                 });
  if (!has_refusal) {
    throw Error(ErrorKind::config_error,
                "patient rules must include the \"No\" or \"Not sure\" out-of-note rule");
  }
  return rs;
}

RoleSettings RoleSettings::builtin() { return parse(assets::role_settings()); }

// ---------------------------------------------------------------------------
// Knowledge preparation

ChatRequest build_knowledge_prompt(const corpus::CaseStudyQuestion& c, const ReconOptions& opts) {
  ChatRequest req;
  req.model_id = opts.model_id;
  req.temperature = opts.temperature;
  req.max_output_tokens = opts.max_output_tokens;
  req.tag = "recon.knowledge";
  req.add(MessageRole::system,
          "You are an experienced clinician preparing a simulated initial consultation.");
  std::string user =
      "Read the clinical note and its confirmed answer, reason through the case, and produce "
      "the knowledge needed to plan the interview.\n\n"
      "Clinical note:\n" + c.vignette + "\n\n";
  if (!c.question_stem.empty()) user += "Question:\n" + c.question_stem + "\n\n";
  user +=
      "Correct answer: " + c.answer_text + "\n\n"
      "Reply with ONLY a JSON object with exactly these fields:\n"
      "{\n"
      "  \"most_likely_disease\": string,\n"
      "  \"differential_diagnosis\": [{\"disease\": string, \"distinguishing_feature\": string}, ...] or \"none\",\n"
      "  \"diagnostic_basis\": [string, ...],\n"
      "  \"confirmatory_tests\": [string, ...],\n"
      "  \"signs_and_symptoms\": [string, ...],\n"
      "  \"risk_factors\": [string, ...],\n"
      "  \"customized_inquiry\": [string, ...]\n"
      "}\n"
      "signs_and_symptoms and risk_factors describe the most likely disease. customized_inquiry "
      "lists interview questions tailored to this patient group or disease. Use \"none\" for "
      "differential_diagnosis only when no differential is worth distinguishing.";
  req.add(MessageRole::user, user);
  return req;
}

namespace {

bool is_none_marker(std::string s) {
  s = text::to_lower(text::trim(s));
  while (!s.empty() && (s.back() == '.' || s.back() == '"')) s.pop_back();
  return s == "none" || s == "n/a";
}

std::optional<json> extract_json_object(const std::string& s) {
  size_t open = s.find('{');
  size_t close = s.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close <= open) {
    return std::nullopt;
  }
  try {
    return json::parse(s.substr(open, close - open + 1));
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

std::vector<std::string> string_list(const json& value) {
  std::vector<std::string> out;
  if (value.is_string()) {
    std::string s = text::trim(value.get<std::string>());
    if (!s.empty() && !is_none_marker(s)) out.push_back(s);
  } else if (value.is_array()) {
    for (const auto& item : value) {
      if (item.is_string()) {
        std::string s = text::trim(item.get<std::string>());
        if (!s.empty()) out.push_back(s);
      }
    }
  }
  return out;
}

KnowledgeBundle bundle_from_json(const json& j, std::vector<std::string>& missing) {
  KnowledgeBundle k;
  if (j.contains("most_likely_disease") && j["most_likely_disease"].is_string()) {
    k.most_likely_disease = text::trim(j["most_likely_disease"].get<std::string>());
  }
  if (k.most_likely_disease.empty()) missing.push_back("most_likely_disease");

  if (j.contains("differential_diagnosis")) {
    const json& diff = j["differential_diagnosis"];
    if (diff.is_string() && is_none_marker(diff.get<std::string>())) {
      k.differential_explicit_none = true;
    } else if (diff.is_array()) {
      for (const auto& item : diff) {
        if (item.is_object()) {
          DifferentialEntry e;
          e.disease = text::trim(item.value("disease", ""));
          e.distinguishing_feature = text::trim(item.value("distinguishing_feature", ""));
          if (!e.disease.empty()) k.differential_diagnosis.push_back(std::move(e));
        } else if (item.is_string()) {
          std::string s = text::trim(item.get<std::string>());
          if (is_none_marker(s)) {
            k.differential_explicit_none = true;
          } else if (!s.empty()) {
            auto colon = s.find(':');
            if (colon == std::string::npos) {
              k.differential_diagnosis.push_back({s, ""});
            } else {
              k.differential_diagnosis.push_back(
                  {text::trim(s.substr(0, colon)), text::trim(s.substr(colon + 1))});
            }
          }
        }
      }
    }
  }
  if (k.differential_diagnosis.empty() && !k.differential_explicit_none) {
    missing.push_back("differential_diagnosis (list entries or the explicit marker \"none\")");
  }

  struct Field {
    const char* name;
    std::vector<std::string>* dst;
  };
  const std::array<Field, 5> fields = {{{"diagnostic_basis", &k.diagnostic_basis},
                                        {"confirmatory_tests", &k.confirmatory_tests},
                                        {"signs_and_symptoms", &k.signs_and_symptoms},
                                        {"risk_factors", &k.risk_factors},
                                        {"customized_inquiry", &k.customized_inquiry}}};
  for (const auto& f : fields) {
    if (j.contains(f.name)) *f.dst = string_list(j[f.name]);
    if (f.dst->empty()) missing.push_back(f.name);
  }
  return k;
}

// Fallback for providers that ignore the JSON instruction: heading lines
// ("Most Likely Disease: ...") followed by "-"/"*"/numbered items.
json headings_to_json(const std::string& reply) {
  json j = json::object();
  std::string current;
  auto key_of = [](const std::string& line) -> std::optional<std::string> {
    for (PlaceholderKey key : kAllKeys) {
      std::string name = to_string(key);
      std::string spaced = text::replace_all(name, "_", " ");
      std::string lowered = text::to_lower(line);
      auto starts = [&](const std::string& h) {
        auto pos = text::find_ci(line, h);
        return pos && *pos <= 4;  // allow "## " or numbering before the heading
      };
      if (starts(spaced) || starts(name)) return name;
    }
    return std::nullopt;
  };
  for (const auto& raw_line : text::split_lines(reply)) {
    std::string line = text::trim(raw_line);
    if (line.empty()) continue;
    while (!line.empty() && (line.front() == '#' || line.front() == '*')) {
      line = text::trim(line.substr(1));
    }
    if (auto key = key_of(line)) {
      current = *key;
      if (!j.contains(current)) j[current] = json::array();
      auto colon = line.find(':');
      if (colon != std::string::npos) {
        std::string rest = text::trim(line.substr(colon + 1));
        if (!rest.empty()) j[current].push_back(rest);
      }
      continue;
    }
    if (current.empty()) continue;
    bool is_item = line.front() == '-' || line.front() == '*' ||
                   (std::isdigit(static_cast<unsigned char>(line.front())) &&
                    line.find('.') != std::string::npos);
    std::string item = line;
    if (line.front() == '-' || line.front() == '*') {
      item = text::trim(line.substr(1));
    } else if (is_item) {
      item = text::trim(line.substr(line.find('.') + 1));
    }
    if (is_item && !item.empty()) j[current].push_back(item);
  }
  if (j.contains("most_likely_disease") && j["most_likely_disease"].is_array() &&
      !j["most_likely_disease"].empty()) {
    j["most_likely_disease"] = j["most_likely_disease"][0];
  }
  if (j.contains("differential_diagnosis") && j["differential_diagnosis"].is_array() &&
      j["differential_diagnosis"].size() == 1 &&
      is_none_marker(j["differential_diagnosis"][0].get<std::string>())) {
    j["differential_diagnosis"] = "none";
  }
  return j;
}

}  // namespace

KnowledgeBundle parse_knowledge(const std::string& reply_text) {
  if (text::trim(reply_text).empty()) {
    throw Error(ErrorKind::malformed_knowledge, "empty knowledge reply");
  }
  json j;
  if (auto obj = extract_json_object(reply_text)) {
    j = std::move(*obj);
  } else {
    j = headings_to_json(reply_text);
  }
  std::vector<std::string> missing;
  KnowledgeBundle k = bundle_from_json(j, missing);
  if (!missing.empty()) {
    throw Error(ErrorKind::malformed_knowledge,
                "missing or empty fields: " + text::join(missing, ", "));
  }
  return k;
}

KnowledgeResult request_knowledge(gateway::Gateway& gw, const corpus::CaseStudyQuestion& c,
                                  const ReconOptions& opts) {
  KnowledgeResult result;
  ChatRequest req = build_knowledge_prompt(c, opts);
  result.fingerprints.push_back(gateway::fingerprint(req));
  auto resp = gw.chat(req);
  try {
    result.bundle = parse_knowledge(resp.text);
    return result;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::malformed_knowledge) throw;
    ChatRequest retry = req;
    retry.add(MessageRole::assistant, resp.text);
    retry.add(MessageRole::user,
              std::string("Your previous reply was not usable (") + e.what() +
                  "). Reply again with ONLY the JSON object in the required schema, with every "
                  "field present and non-empty.");
    result.fingerprints.push_back(gateway::fingerprint(retry));
    auto resp2 = gw.chat(retry);
    result.bundle = parse_knowledge(resp2.text);  // final failure propagates
    result.attempts = 2;
    return result;
  }
}

// ---------------------------------------------------------------------------
// Plan rendering

namespace {

std::string bullets(const std::vector<std::string>& items) {
  std::vector<std::string> lines;
  lines.reserve(items.size());
  for (const auto& item : items) lines.push_back("- " + item);
  return text::join(lines, "\n");
}

std::string render_key(PlaceholderKey key, const KnowledgeBundle& k) {
  switch (key) {
    case PlaceholderKey::most_likely_disease:
      if (k.most_likely_disease.empty()) break;
      return k.most_likely_disease;
    case PlaceholderKey::differential_diagnosis: {
      if (k.differential_diagnosis.empty()) {
        if (k.differential_explicit_none) return "- none identified";
        break;
      }
      std::vector<std::string> lines;
      for (const auto& d : k.differential_diagnosis) {
        lines.push_back(d.distinguishing_feature.empty()
                            ? d.disease
                            : d.disease + ": " + d.distinguishing_feature);
      }
      return bullets(lines);
    }
    case PlaceholderKey::diagnostic_basis:
      if (k.diagnostic_basis.empty()) break;
      return bullets(k.diagnostic_basis);
    case PlaceholderKey::confirmatory_tests:
      if (k.confirmatory_tests.empty()) break;
      return bullets(k.confirmatory_tests);
    case PlaceholderKey::signs_and_symptoms:
      if (k.signs_and_symptoms.empty()) break;
      return bullets(k.signs_and_symptoms);
    case PlaceholderKey::risk_factors:
      if (k.risk_factors.empty()) break;
      return bullets(k.risk_factors);
    case PlaceholderKey::customized_inquiry:
      if (k.customized_inquiry.empty()) break;
      return bullets(k.customized_inquiry);
  }
  throw Error(ErrorKind::unresolved_placeholder,
              std::string("no knowledge content for {{") + to_string(key) + "}}");
}

}  // namespace

std::string render_plan(const InterviewPlanTemplate& tpl, const KnowledgeBundle& knowledge) {
  std::string out;
  out.reserve(tpl.text.size());
  size_t pos = 0;
  while (pos < tpl.text.size()) {
    size_t open = tpl.text.find("{{", pos);
    if (open == std::string::npos) {
      out.append(tpl.text, pos, std::string::npos);
      break;
    }
    size_t close = tpl.text.find("}}", open + 2);
    if (close == std::string::npos) {
      throw Error(ErrorKind::unresolved_placeholder,
                  "unterminated placeholder near offset " + std::to_string(open));
    }
    out.append(tpl.text, pos, open - pos);
    std::string name = text::trim(tpl.text.substr(open + 2, close - open - 2));
    auto key = placeholder_key_from_string(name);
    if (!key) {
      throw Error(ErrorKind::unresolved_placeholder,
                  "'" + name + "' is not a knowledge element");
    }
    out += render_key(*key, knowledge);
    pos = close + 2;
  }
  if (out.find("{{") != std::string::npos) {
    throw Error(ErrorKind::unresolved_placeholder,
                "rendered plan still contains a placeholder marker");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dialogue generation

ChatRequest build_generation_prompt(const std::string& filled_plan, const RoleSettings& roles,
                                    const corpus::CaseStudyQuestion& c, const ReconOptions& opts) {
  ChatRequest req;
  req.model_id = opts.model_id;
  req.temperature = opts.temperature;
  req.max_output_tokens = opts.max_output_tokens;
  req.tag = "recon.generate";
  req.add(MessageRole::system,
          "You write simulated clinical interview dialogues for medical training. They must be "
          "standardized, professional, and empathetic.");
  std::string user =
      "Write one complete simulated interview between a physician and a patient.\n\n"
      "Follow this interview plan section by section, covering every item:\n\n" +
      filled_plan +
      "\n\nPhysician behavior rules:\n" + bullets(roles.physician_rules) +
      "\n\nPatient behavior rules:\n" + bullets(roles.patient_rules) +
      "\n\nThe patient's situation comes from this clinical note; the patient only knows what "
      "it describes:\n" + c.vignette +
      "\n\nInterviewing technique requirements:\n"
      "- Mix open-ended and closed questions; open each section with an open-ended one.\n"
      "- Never ask leading questions, and never ask about the same topic in two consecutive "
      "physician utterances.\n"
      "- The physician asks at most two questions per utterance.\n"
      "- Keep utterances brief; the interview should run about " +
      std::to_string(opts.min_pairs) + " to " + std::to_string(opts.max_pairs) +
      " exchanges.\n\n"
      "Output format (strict): one utterance per line, strictly alternating, the physician "
      "first:\n"
      "Physician: <utterance>\n"
      "Patient: <utterance>\n"
      "Do not write anything else before or after the dialogue.";
  req.add(MessageRole::user, user);

  long prompt_words = 0;
  for (const auto& m : req.messages) prompt_words += text::word_count(m.text);
  if (prompt_words > opts.max_prompt_tokens) {
    throw Error(ErrorKind::prompt_too_long,
                "generation prompt is ~" + std::to_string(prompt_words) +
                    " tokens, budget is " + std::to_string(opts.max_prompt_tokens));
  }
  return req;
}

namespace {

std::optional<std::pair<Speaker, std::string>> match_role_line(const std::string& raw) {
  std::string line = text::trim(raw);
  while (line.rfind("**", 0) == 0) line = text::trim(line.substr(2));
  for (auto [word, role] : {std::pair{"physician", Speaker::physician},
                            std::pair{"patient", Speaker::patient},
                            std::pair{"doctor", Speaker::physician}}) {
    size_t len = std::string(word).size();
    if (line.size() > len && text::to_lower(line.substr(0, len)) == word) {
      size_t after = len;
      while (after < line.size() && (line[after] == '*' || line[after] == ' ')) ++after;
      if (after < line.size() && line[after] == ':') {
        std::string rest = text::trim(line.substr(after + 1));
        rest = text::replace_all(rest, "**", "");
        return std::make_pair(role, rest);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

ParsedDialogue parse_dialogue(const std::string& reply_text) {
  if (text::trim(reply_text).empty()) {
    throw Error(ErrorKind::empty_dialogue, "empty generation reply");
  }
  ParsedDialogue out;
  std::vector<Utterance> segments;
  bool seen_marker = false;
  for (const auto& line : text::split_lines(reply_text)) {
    if (auto m = match_role_line(line)) {
      segments.push_back({m->first, m->second});
      seen_marker = true;
      continue;
    }
    std::string t = text::trim(line);
    if (t.empty()) continue;
    if (segments.empty()) {
      out.warnings.push_back("ignored text before the first role marker: " + t.substr(0, 40));
      continue;
    }
    // continuation of the current utterance
    auto& last = segments.back();
    if (!last.text.empty()) last.text += ' ';
    last.text += t;
  }
  if (!seen_marker) {
    throw Error(ErrorKind::no_role_markers, "reply has no Physician:/Patient: lines");
  }

  std::vector<Utterance> kept;
  for (auto& seg : segments) {
    seg.text = text::trim(seg.text);
    if (seg.text.empty()) {
      out.warnings.push_back("dropped a blank utterance");
      continue;
    }
    if (!kept.empty() && kept.back().role == seg.role) {
      kept.back().text += ' ';
      kept.back().text += seg.text;
      out.warnings.push_back(std::string("merged consecutive ") + to_string(seg.role) +
                             " utterances");
      continue;
    }
    kept.push_back(std::move(seg));
  }
  if (kept.empty()) throw Error(ErrorKind::empty_dialogue, "no usable utterances in reply");
  if (kept.front().role != Speaker::physician) {
    throw Error(ErrorKind::bad_lead_role, "dialogue does not start with the physician");
  }
  out.dialogue.turns = std::move(kept);
  return out;
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck& c) { return c.passed; });
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
  }
  return out;
}

std::string ValidationReport::summary() const { return text::join(failures(), "; "); }

void to_json(json& j, const ValidationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j = json{{"passed", r.passed()}, {"checks", checks}};
}

void from_json(const json& j, ValidationReport& r) {
  r.checks.clear();
  for (const auto& c : j.at("checks")) {
    r.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(),
                        c.value("detail", "")});
  }
}

ValidationReport validate_dialogue(const Dialogue& d, const KnowledgeBundle& knowledge,
                                   const ReconOptions& opts) {
  ValidationReport report;
  auto add = [&](std::string name, bool ok, std::string detail = "") {
    report.checks.push_back({std::move(name), ok, ok ? "" : std::move(detail)});
  };

  add("physician_first",
      !d.turns.empty() && d.turns.front().role == Speaker::physician,
      "dialogue must open with a physician utterance");

  bool alternates = true;
  for (size_t i = 1; i < d.turns.size(); ++i) {
    if (d.turns[i].role == d.turns[i - 1].role) {
      alternates = false;
      break;
    }
  }
  add("alternation", alternates, "roles must strictly alternate");

  bool non_blank = std::all_of(d.turns.begin(), d.turns.end(), [](const Utterance& u) {
    return !text::trim(u.text).empty();
  });
  add("non_blank_utterances", non_blank, "an utterance is blank");

  size_t pairs = d.turn_count();
  add("min_turns", pairs >= static_cast<size_t>(opts.min_pairs),
      std::to_string(pairs) + " turns, need at least " + std::to_string(opts.min_pairs));
  add("max_turns", pairs <= static_cast<size_t>(opts.max_pairs),
      std::to_string(pairs) + " turns, cap is " + std::to_string(opts.max_pairs));

  bool leak = std::any_of(d.turns.begin(), d.turns.end(), [](const Utterance& u) {
    return u.text.find("{{") != std::string::npos;
  });
  add("no_placeholder_leak", !leak, "an utterance contains an unresolved {{...}} marker");

  bool mention = std::any_of(d.turns.begin(), d.turns.end(), [&](const Utterance& u) {
    return u.role == Speaker::physician &&
           text::contains_ci(u.text, knowledge.most_likely_disease);
  });
  add("assessment_mention", mention,
      "no physician utterance names the most likely disease '" + knowledge.most_likely_disease +
          "'");
  return report;
}

// ---------------------------------------------------------------------------
// Orchestration

void to_json(json& j, const DialogueRecord& r) {
  j = json{{"schema_version", "dialogue-record/v1"},
           {"case_id", r.case_id},
           {"dialogue", r.dialogue},
           {"knowledge", r.knowledge},
           {"template_version", r.template_version},
           {"template_checksum", r.template_checksum},
           {"model_id", r.model_id},
           {"fingerprints", r.fingerprints},
           {"validation", r.validation},
           {"knowledge_attempts", r.knowledge_attempts},
           {"generation_attempts", r.generation_attempts}};
}

void from_json(const json& j, DialogueRecord& r) {
  r.case_id = j.at("case_id").get<std::string>();
  r.dialogue = j.at("dialogue").get<Dialogue>();
  r.knowledge = j.at("knowledge").get<KnowledgeBundle>();
  r.template_version = j.value("template_version", "");
  r.template_checksum = j.value("template_checksum", "");
  r.model_id = j.value("model_id", "");
  r.fingerprints = j.value("fingerprints", std::vector<std::string>{});
  if (j.contains("validation")) r.validation = j["validation"].get<ValidationReport>();
  r.knowledge_attempts = j.value("knowledge_attempts", 1);
  r.generation_attempts = j.value("generation_attempts", 1);
}

DialogueRecord reconstruct(const corpus::CaseStudyQuestion& c, const InterviewPlanTemplate& tpl,
                           const RoleSettings& roles, gateway::Gateway& gw,
                           const ReconOptions& opts) {
  DialogueRecord record;
  record.case_id = c.id;
  record.template_version = tpl.version;
  record.template_checksum = tpl.checksum;
  record.model_id = opts.model_id;

  KnowledgeResult knowledge = request_knowledge(gw, c, opts);
  record.knowledge = knowledge.bundle;
  record.knowledge_attempts = knowledge.attempts;
  record.fingerprints = knowledge.fingerprints;

  std::string plan = render_plan(tpl, knowledge.bundle);
  ChatRequest gen = build_generation_prompt(plan, roles, c, opts);

  std::string last_reply;
  auto attempt = [&](const ChatRequest& req)
      -> std::pair<std::optional<Dialogue>, ValidationReport> {
    record.fingerprints.push_back(gateway::fingerprint(req));
    auto resp = gw.chat(req);
    last_reply = resp.text;
    try {
      ParsedDialogue parsed = parse_dialogue(resp.text);
      parsed.dialogue.language = opts.language;
      ValidationReport report = validate_dialogue(parsed.dialogue, knowledge.bundle, opts);
      return {parsed.dialogue, report};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::empty_dialogue && e.kind() != ErrorKind::bad_lead_role &&
          e.kind() != ErrorKind::no_role_markers) {
        throw;
      }
      ValidationReport report;
      report.checks.push_back({"parse", false, e.what()});
      return {std::nullopt, report};
    }
  };

  auto [dialogue, report] = attempt(gen);
  if (!dialogue || !report.passed()) {
    ChatRequest retry = gen;
    retry.add(MessageRole::assistant, last_reply);
    retry.add(MessageRole::user,
              "The dialogue you produced failed these checks:\n- " +
                  text::join(report.failures(), "\n- ") +
                  "\nRegenerate the complete dialogue from the beginning, fixing every issue, "
                  "in the same strict line format.");
    auto [dialogue2, report2] = attempt(retry);
    record.generation_attempts = 2;
    if (!dialogue2 || !report2.passed()) {
      throw Error(ErrorKind::generation_invalid,
                  "dialogue still invalid after retry: " + report2.summary());
    }
    record.dialogue = *dialogue2;
    record.validation = report2;
    return record;
  }
  record.dialogue = *dialogue;
  record.validation = report;
  record.generation_attempts = 1;
  return record;
}

}  // namespace clinichat::recon
