#include "clinichat/corpus.hpp"

#include <algorithm>
#include <limits>

#include "clinichat/assets.hpp"
#include "clinichat/text.hpp"

namespace clinichat::corpus {

using nlohmann::json;

const std::string& CaseStudyQuestion::option_text(const std::string& label) const {
  for (const auto& opt : options) {
    if (opt.label == label) return opt.text;
  }
  throw Error(ErrorKind::unknown_answer_key,
              "label '" + label + "' not among options of case " + id);
}

namespace {

// The stem is the final interrogative sentence: everything from the last
// sentence boundary before the final '?' through that '?'.
std::pair<std::string, std::string> split_stem(const std::string& question) {
  size_t qmark = question.find_last_of('?');
  if (qmark == std::string::npos) return {text::trim(question), ""};
  size_t start = 0;
  for (size_t i = qmark; i > 0; --i) {
    char c = question[i - 1];
    if (c == '.' || c == '!' || c == '?') {
      start = i;
      break;
    }
  }
  std::string vignette = text::trim(question.substr(0, start));
  std::string stem = text::trim(question.substr(start, qmark + 1 - start));
  if (vignette.empty()) return {stem, ""};  // the whole text is one question
  return {vignette, stem};
}

}  // namespace

CaseStudyQuestion parse_case(const json& raw) {
  CaseStudyQuestion c;
  if (!raw.is_object()) throw Error(ErrorKind::missing_field, "case record is not an object");
  c.id = raw.value("id", "");
  if (c.id.empty()) throw Error(ErrorKind::missing_field, "case record has no id");

  if (raw.contains("vignette") && raw.contains("question_stem")) {
    c.vignette = text::trim(raw["vignette"].get<std::string>());
    c.question_stem = text::trim(raw["question_stem"].get<std::string>());
  } else {
    if (!raw.contains("question") || !raw["question"].is_string()) {
      throw Error(ErrorKind::missing_field, "case " + c.id + " has no question text");
    }
    auto [vignette, stem] = split_stem(raw["question"].get<std::string>());
    c.vignette = std::move(vignette);
    c.question_stem = std::move(stem);
  }
  if (c.vignette.empty()) {
    throw Error(ErrorKind::missing_field, "case " + c.id + " has an empty question text");
  }

  if (!raw.contains("options") || !raw["options"].is_object() || raw["options"].empty()) {
    throw Error(ErrorKind::missing_field, "case " + c.id + " has no options");
  }
  for (const auto& [label, value] : raw["options"].items()) {
    c.options.push_back({label, value.get<std::string>()});
  }

  if (!raw.contains("answer") || !raw["answer"].is_string()) {
    throw Error(ErrorKind::missing_field, "case " + c.id + " has no answer key");
  }
  c.answer_key = raw["answer"].get<std::string>();
  c.answer_text = c.option_text(c.answer_key);

  if (raw.contains("meta")) c.meta = raw["meta"];
  if (raw.contains("department") && raw["department"].is_string()) {
    c.department = raw["department"].get<std::string>();
  } else if (c.meta.is_object() && c.meta.contains("department")) {
    c.department = c.meta["department"].get<std::string>();
  }
  return c;
}

void to_json(json& j, const CaseStudyQuestion& c) {
  json options = json::object();
  for (const auto& opt : c.options) options[opt.label] = opt.text;
  j = json{{"id", c.id},
           {"vignette", c.vignette},
           {"question_stem", c.question_stem},
           {"options", options},
           {"answer", c.answer_key},
           {"answer_text", c.answer_text},
           {"meta", c.meta.is_null() ? json::object() : c.meta}};
  if (c.department) j["department"] = *c.department;
}

SoapView segment_soap(const CaseStudyQuestion& c, const SoapCues& cues) {
  SoapView view;
  view.assessment_plan_query = c.question_stem;
  size_t cut = c.vignette.size();
  for (const auto& cue : cues.objective_cues) {
    auto pos = text::find_ci(c.vignette, cue);
    if (pos && *pos < cut) cut = *pos;
  }
  view.subjective = c.vignette.substr(0, cut);
  view.objective = c.vignette.substr(cut);
  view.objective_offset = cut;
  return view;
}

DepartmentTaxonomy DepartmentTaxonomy::builtin() {
  return from_json(json::parse(assets::departments_json()));
}

DepartmentTaxonomy DepartmentTaxonomy::from_json(const json& j) {
  DepartmentTaxonomy t;
  t.version_ = j.at("version").get<std::string>();
  for (const auto& d : j.at("departments")) {
    Entry e;
    e.name = d.at("name").get<std::string>();
    if (d.contains("aliases")) e.aliases = d["aliases"].get<std::vector<std::string>>();
    if (d.contains("keywords")) e.keywords = d["keywords"].get<std::vector<std::string>>();
    t.entries_.push_back(std::move(e));
  }
  if (t.entries_.size() != 19) {
    throw Error(ErrorKind::config_error, "department taxonomy must have exactly 19 entries, got " +
                                             std::to_string(t.entries_.size()));
  }
  return t;
}

std::vector<std::string> DepartmentTaxonomy::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

bool DepartmentTaxonomy::is_member(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Entry& e) { return e.name == name; });
}

namespace {

std::string fold(const std::string& s) {
  std::string lowered = text::to_lower(text::trim(s));
  std::string out;
  for (char c : lowered) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out += c;
    } else if (!out.empty() && out.back() != ' ') {
      out += ' ';
    }
  }
  return text::trim(out);
}

}  // namespace

std::optional<std::string> DepartmentTaxonomy::normalize(const std::string& reply) const {
  std::string folded = fold(reply);
  if (folded.empty()) return std::nullopt;
  for (const auto& e : entries_) {
    if (fold(e.name) == folded) return e.name;
    for (const auto& alias : e.aliases) {
      if (fold(alias) == folded) return e.name;
    }
  }
  return std::nullopt;
}

std::optional<std::string> DepartmentTaxonomy::classify_by_rules(
    const std::string& case_text) const {
  size_t best_hits = 0;
  const Entry* best = nullptr;
  for (const auto& e : entries_) {
    size_t hits = 0;
    for (const auto& kw : e.keywords) {
      if (text::contains_word_ci(case_text, kw)) ++hits;
    }
    if (hits > best_hits) {
      best_hits = hits;
      best = &e;
    }
  }
  if (!best) return std::nullopt;
  return best->name;
}

DepartmentClassifier::DepartmentClassifier(DepartmentTaxonomy taxonomy, gateway::Gateway* gw,
                                           ClassifierOptions options)
    : taxonomy_(std::move(taxonomy)), gateway_(gw), options_(std::move(options)) {}

gateway::ChatRequest DepartmentClassifier::build_prompt(const CaseStudyQuestion& c) const {
  gateway::ChatRequest req;
  req.model_id = options_.model_id;
  req.temperature = options_.temperature;
  req.max_output_tokens = options_.max_output_tokens;
  req.tag = "corpus.classify";
  std::string names = text::join(taxonomy_.names(), ", ");
  req.add(gateway::MessageRole::system,
          "You assign hospital departments. Given a patient case, reply with the single "
          "department most likely to handle the initial visit. Reply with exactly one name "
          "from this list and nothing else: " + names + ".");
  req.add(gateway::MessageRole::user, "Case:\n" + c.vignette + "\n\n" + c.question_stem);
  return req;
}

std::string DepartmentClassifier::classify(const CaseStudyQuestion& c) const {
  if (gateway_ && !options_.model_id.empty()) {
    gateway::ChatRequest req = build_prompt(c);
    auto resp = gateway_->chat(req);
    if (auto name = taxonomy_.normalize(resp.text)) return *name;
    // One corrective re-prompt before falling back to the rules.
    gateway::ChatRequest retry = req;
    retry.add(gateway::MessageRole::assistant, resp.text);
    retry.add(gateway::MessageRole::user,
              "'" + text::trim(resp.text) + "' is not a valid department name. Reply with "
              "exactly one name from the list, with no other words.");
    auto resp2 = gateway_->chat(retry);
    if (auto name = taxonomy_.normalize(resp2.text)) return *name;
  }
  std::string full_text = c.vignette + "\n" + c.question_stem;
  if (auto name = taxonomy_.classify_by_rules(full_text)) return *name;
  throw Error(ErrorKind::classification_failed,
              "no department matched case " + c.id + " (model and rules both failed)");
}

Eligibility filter_eligible(const CaseStudyQuestion& c, const SoapCues& cues) {
  SoapView soap = segment_soap(c, cues);
  Eligibility e;
  if (text::trim(soap.subjective).empty()) {
    e.reasons.push_back("no chief complaint (empty subjective span)");
  } else {
    bool has_history = false;
    for (const auto& sentence : text::split_sentences(soap.subjective)) {
      for (const auto& cue : cues.history_cues) {
        if (text::contains_word_ci(sentence, cue)) {
          has_history = true;
          break;
        }
      }
      if (has_history) break;
    }
    if (!has_history) e.reasons.push_back("no medical history sentence");
  }
  if (text::trim(soap.objective).empty()) {
    e.reasons.push_back("no exam results (empty objective span)");
  }
  e.pass = e.reasons.empty();
  return e;
}

void to_json(json& j, const DatasetStats& s) {
  j = json{{"n_dialogues", s.n_dialogues},
           {"max_turns", s.max_turns},
           {"min_turns", s.min_turns},
           {"avg_turns", s.avg_turns},
           {"avg_words_physician", s.avg_words_physician},
           {"avg_words_patient", s.avg_words_patient}};
}

DatasetStats compute_stats(std::span<const recon::Dialogue> dialogues) {
  if (dialogues.empty()) throw Error(ErrorKind::empty_corpus, "no dialogues to summarize");
  DatasetStats s;
  s.n_dialogues = dialogues.size();
  s.min_turns = std::numeric_limits<size_t>::max();
  size_t total_turns = 0;
  long phys_words = 0, pat_words = 0;
  size_t phys_utts = 0, pat_utts = 0;
  for (const auto& d : dialogues) {
    size_t turns = d.turn_count();
    s.max_turns = std::max(s.max_turns, turns);
    s.min_turns = std::min(s.min_turns, turns);
    total_turns += turns;
    for (const auto& u : d.turns) {
      long words = text::word_count(u.text);
      if (u.role == recon::Speaker::physician) {
        phys_words += words;
        ++phys_utts;
      } else {
        pat_words += words;
        ++pat_utts;
      }
    }
  }
  s.avg_turns = static_cast<double>(total_turns) / static_cast<double>(dialogues.size());
  s.avg_words_physician =
      phys_utts ? static_cast<double>(phys_words) / static_cast<double>(phys_utts) : 0.0;
  s.avg_words_patient =
      pat_utts ? static_cast<double>(pat_words) / static_cast<double>(pat_utts) : 0.0;
  return s;
}

}  // namespace clinichat::corpus
