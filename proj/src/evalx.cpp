#include "clinichat/evalx.hpp"

#include <algorithm>
#include <cmath>

#include "clinichat/assets.hpp"
#include "clinichat/jsonl.hpp"
#include "clinichat/text.hpp"

namespace clinichat::evalx {

using gateway::ChatRequest;
using gateway::MessageRole;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Rubric

namespace {

RubricNode node_from_json(const json& j) {
  RubricNode n;
  n.id = j.at("id").get<std::string>();
  n.name = j.at("name").get<std::string>();
  n.description = j.value("description", "");
  n.max_points = j.at("max_points").get<double>();
  if (n.max_points < 0) {
    throw Error(ErrorKind::config_error, "rubric node " + n.id + " has negative max");
  }
  if (j.contains("children")) {
    for (const auto& c : j["children"]) n.children.push_back(node_from_json(c));
  }
  return n;
}

void check_sums(const RubricNode& n) {
  if (n.is_leaf()) return;
  double sum = 0;
  for (const auto& c : n.children) {
    check_sums(c);
    sum += c.max_points;
  }
  if (std::abs(sum - n.max_points) > 1e-9) {
    throw Error(ErrorKind::config_error,
                "rubric node " + n.id + " claims " + std::to_string(n.max_points) +
                    " points but its children sum to " + std::to_string(sum));
  }
}

void collect_leaves(const RubricNode& n, std::vector<const RubricNode*>& out) {
  if (n.is_leaf()) {
    out.push_back(&n);
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, out);
}

const RubricNode* find_in(const RubricNode& n, const std::string& id) {
  if (n.id == id) return &n;
  for (const auto& c : n.children) {
    if (const RubricNode* hit = find_in(c, id)) return hit;
  }
  return nullptr;
}

}  // namespace

Rubric Rubric::canonical() { return from_json(json::parse(assets::rubric_json())); }

Rubric Rubric::from_json(const json& j) {
  Rubric r;
  r.version_ = j.at("version").get<std::string>();
  for (const auto& g : j.at("groups")) r.groups_.push_back(node_from_json(g));
  for (const auto& g : r.groups_) check_sums(g);
  double total = r.total_max();
  if (std::abs(total - 100.0) > 1e-9) {
    throw Error(ErrorKind::config_error,
                "rubric group maxima sum to " + std::to_string(total) + ", expected 100");
  }
  return r;
}

Rubric Rubric::load_file(const std::string& path) {
  return from_json(json::parse(jsonl::read_text_file(path)));
}

std::vector<const RubricNode*> Rubric::leaves() const {
  std::vector<const RubricNode*> out;
  for (const auto& g : groups_) collect_leaves(g, out);
  return out;
}

const RubricNode* Rubric::find_leaf(const std::string& id) const {
  const RubricNode* n = find_node(id);
  return (n && n->is_leaf()) ? n : nullptr;
}

const RubricNode* Rubric::find_node(const std::string& id) const {
  for (const auto& g : groups_) {
    if (const RubricNode* hit = find_in(g, id)) return hit;
  }
  return nullptr;
}

const RubricNode* Rubric::group_of(const std::string& leaf_id) const {
  for (const auto& g : groups_) {
    if (find_in(g, leaf_id)) return &g;
  }
  return nullptr;
}

double Rubric::total_max() const {
  double total = 0;
  for (const auto& g : groups_) total += g.max_points;
  return total;
}

// ---------------------------------------------------------------------------
// Demo generation

void to_json(json& j, const InterviewDemo& d) {
  json plan = json::array();
  for (const auto& p : d.history_plan) {
    plan.push_back({{"topic", p.topic}, {"rationale", p.rationale}});
  }
  j = json{{"conclusions",
            {{"most_likely_disease", d.conclusions.most_likely_disease},
             {"differential_diagnoses", d.conclusions.differential_diagnoses},
             {"differential_explicit_none", d.conclusions.differential_explicit_none},
             {"diagnosis_basis", d.conclusions.diagnosis_basis},
             {"confirmation_tests", d.conclusions.confirmation_tests}}},
           {"history_plan", plan}};
}

void from_json(const json& j, InterviewDemo& d) {
  const json& c = j.at("conclusions");
  d.conclusions.most_likely_disease = c.at("most_likely_disease").get<std::string>();
  d.conclusions.differential_diagnoses =
      c.value("differential_diagnoses", std::vector<std::string>{});
  d.conclusions.differential_explicit_none = c.value("differential_explicit_none", false);
  d.conclusions.diagnosis_basis = c.value("diagnosis_basis", std::vector<std::string>{});
  d.conclusions.confirmation_tests = c.value("confirmation_tests", std::vector<std::string>{});
  d.history_plan.clear();
  for (const auto& p : j.at("history_plan")) {
    if (p.is_object()) {
      d.history_plan.push_back({p.value("topic", ""), p.value("rationale", "")});
    } else if (p.is_string()) {
      d.history_plan.push_back({p.get<std::string>(), ""});
    }
  }
}

ChatRequest build_demo_prompt(const corpus::CaseStudyQuestion& c, const EvalOptions& opts) {
  ChatRequest req;
  req.model_id = opts.judge_model_id;
  req.temperature = opts.temperature;
  req.max_output_tokens = opts.max_output_tokens;
  req.tag = "evalx.demo";
  req.add(MessageRole::system,
          "You are a senior physician preparing an interview demonstration for clinical "
          "teaching.");
  std::string step1 =
      opts.answer_withheld
          ? "Step 1 - diagnostic conclusions: this is an exam-style case whose diagnosis is "
            "deliberately not stated, so reason through the case yourself to reach the "
            "conclusions. Provide the most_likely_disease, differential_diagnoses, "
            "diagnosis_basis, and confirmation_tests."
          : "Step 1 - diagnostic conclusions: extract the conclusions stated in the note: the "
            "most_likely_disease, differential_diagnoses, diagnosis_basis, and "
            "confirmation_tests.";
  std::string user =
      "Turn the clinical note below into an interview demonstration in two steps.\n\n" + step1 +
      "\n\nStep 2 - history-taking plan: based on those conclusions and the note, provide a "
      "detailed ordered plan of the history points an exemplary interviewer would cover, with "
      "a short rationale for each.\n\n"
      "Clinical note:\n" + c.vignette + "\n\n"
      "Reply with ONLY a JSON object:\n"
      "{\n"
      "  \"conclusions\": {\n"
      "    \"most_likely_disease\": string,\n"
      "    \"differential_diagnoses\": [string, ...] or \"none\",\n"
      "    \"diagnosis_basis\": [string, ...],\n"
      "    \"confirmation_tests\": [string, ...]\n"
      "  },\n"
      "  \"history_plan\": [{\"topic\": string, \"rationale\": string}, ...]\n"
      "}";
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

std::vector<std::string> clean_list(const json& v) {
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& item : v) {
      if (item.is_string()) {
        std::string s = text::trim(item.get<std::string>());
        if (!s.empty()) out.push_back(s);
      }
    }
  } else if (v.is_string()) {
    std::string s = text::trim(v.get<std::string>());
    if (!s.empty() && !is_none_marker(s)) out.push_back(s);
  }
  return out;
}

}  // namespace

InterviewDemo parse_demo(const std::string& reply_text) {
  auto obj = extract_json_object(reply_text);
  if (!obj) throw Error(ErrorKind::malformed_demo, "demo reply holds no JSON object");
  const json& j = *obj;
  std::vector<std::string> missing;
  InterviewDemo d;

  const json conclusions = j.value("conclusions", json::object());
  d.conclusions.most_likely_disease =
      text::trim(conclusions.value("most_likely_disease", ""));
  if (d.conclusions.most_likely_disease.empty()) missing.push_back("most_likely_disease");

  if (conclusions.contains("differential_diagnoses")) {
    const json& diff = conclusions["differential_diagnoses"];
    if (diff.is_string() && is_none_marker(diff.get<std::string>())) {
      d.conclusions.differential_explicit_none = true;
    } else {
      d.conclusions.differential_diagnoses = clean_list(diff);
    }
  }
  if (d.conclusions.differential_diagnoses.empty() &&
      !d.conclusions.differential_explicit_none) {
    missing.push_back("differential_diagnoses (entries or the explicit marker \"none\")");
  }

  d.conclusions.diagnosis_basis = clean_list(conclusions.value("diagnosis_basis", json()));
  if (d.conclusions.diagnosis_basis.empty()) missing.push_back("diagnosis_basis");
  d.conclusions.confirmation_tests = clean_list(conclusions.value("confirmation_tests", json()));
  if (d.conclusions.confirmation_tests.empty()) missing.push_back("confirmation_tests");

  if (j.contains("history_plan") && j["history_plan"].is_array()) {
    for (const auto& p : j["history_plan"]) {
      if (p.is_object()) {
        std::string topic = text::trim(p.value("topic", ""));
        if (!topic.empty()) d.history_plan.push_back({topic, text::trim(p.value("rationale", ""))});
      } else if (p.is_string()) {
        std::string topic = text::trim(p.get<std::string>());
        if (!topic.empty()) d.history_plan.push_back({topic, ""});
      }
    }
  }
  if (d.history_plan.empty()) missing.push_back("history_plan");

  if (!missing.empty()) {
    throw Error(ErrorKind::malformed_demo,
                "missing or empty fields: " + text::join(missing, ", "));
  }
  return d;
}

DemoResult request_demo(gateway::Gateway& gw, const corpus::CaseStudyQuestion& c,
                        const EvalOptions& opts) {
  DemoResult result;
  ChatRequest req = build_demo_prompt(c, opts);
  result.fingerprints.push_back(gateway::fingerprint(req));
  auto resp = gw.chat(req);
  try {
    result.demo = parse_demo(resp.text);
    return result;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::malformed_demo) throw;
    ChatRequest retry = req;
    retry.add(MessageRole::assistant, resp.text);
    retry.add(MessageRole::user,
              std::string("Your previous reply was not usable (") + e.what() +
                  "). Reply again with ONLY the JSON object in the required schema.");
    result.fingerprints.push_back(gateway::fingerprint(retry));
    auto resp2 = gw.chat(retry);
    result.demo = parse_demo(resp2.text);
    result.attempts = 2;
    return result;
  }
}

// ---------------------------------------------------------------------------
// Comparative evaluation

namespace {

std::string render_demo(const InterviewDemo& d) {
  std::string out = "Diagnostic conclusions:\n";
  out += "- most likely disease: " + d.conclusions.most_likely_disease + "\n";
  out += "- differential diagnoses: ";
  out += d.conclusions.differential_diagnoses.empty()
             ? "none"
             : text::join(d.conclusions.differential_diagnoses, "; ");
  out += "\n- diagnosis basis: " + text::join(d.conclusions.diagnosis_basis, "; ");
  out += "\n- confirmation tests: " + text::join(d.conclusions.confirmation_tests, "; ");
  out += "\nHistory-taking plan:\n";
  for (size_t i = 0; i < d.history_plan.size(); ++i) {
    const auto& p = d.history_plan[i];
    out += std::to_string(i + 1) + ". " + p.topic;
    if (!p.rationale.empty()) out += " (" + p.rationale + ")";
    out += "\n";
  }
  return out;
}

}  // namespace

ChatRequest build_eval_prompt(const InterviewDemo& demo, const recon::Dialogue& dialogue,
                              const Rubric& rubric, const EvalOptions& opts) {
  ChatRequest req;
  req.model_id = opts.judge_model_id;
  req.temperature = opts.temperature;
  req.max_output_tokens = opts.max_output_tokens;
  req.tag = "evalx.score";
  req.add(MessageRole::system,
          "You are a clinical instructor grading a simulated clinical interview against an "
          "expert demonstration.");

  std::string metric_lines;
  for (const RubricNode* leaf : rubric.leaves()) {
    metric_lines += "- " + leaf->id + " (max " + text::format_double(leaf->max_points, 0) +
                    "): " + leaf->name;
    if (!leaf->description.empty()) metric_lines += " - " + leaf->description;
    metric_lines += "\n";
  }

  std::string user =
      "Evaluate the physician's performance in the interview dialogue below by comparing it "
      "with the expert demonstration.\n\n"
      "Proceed in this order:\n"
      "1. Subjective assessment: compare each point of the demonstration with the dialogue and "
      "give a verdict for each (covered / partly covered / missed), with a short comment.\n"
      "2. Quantitative evaluation: based on that assessment, assign one numeric score to every "
      "metric listed below. A score must be between 0 and the metric's maximum, inclusive.\n"
      "3. Overall summary of the interview performance.\n\n"
      "Expert demonstration:\n" + render_demo(demo) +
      "\nInterview dialogue:\n" + recon::serialize_dialogue(dialogue) +
      "\nMetrics (score every one):\n" + metric_lines +
      "\nReply with ONLY a JSON object:\n"
      "{\n"
      "  \"subjective_assessment\": string,\n"
      "  \"scores\": {\"<metric id>\": number, ... every metric id above ...},\n"
      "  \"summary\": string\n"
      "}";
  req.add(MessageRole::user, user);
  return req;
}

void to_json(json& j, const ScoreCard& s) {
  j = json{{"leaf_scores", s.leaf_scores},
           {"subjective_assessment", s.subjective_assessment},
           {"per_group", s.per_group},
           {"total", s.total}};
}

void from_json(const json& j, ScoreCard& s) {
  s.leaf_scores = j.at("leaf_scores").get<std::map<std::string, double>>();
  s.subjective_assessment = j.value("subjective_assessment", "");
  s.per_group = j.at("per_group").get<std::map<std::string, double>>();
  s.total = j.at("total").get<double>();
}

ScoreCard parse_scorecard(const std::string& reply_text, const Rubric& rubric) {
  auto obj = extract_json_object(reply_text);
  json scores = json::object();
  std::string subjective;
  if (obj && obj->contains("scores") && (*obj)["scores"].is_object()) {
    scores = (*obj)["scores"];
    subjective = obj->value("subjective_assessment", "");
    if (obj->contains("summary") && (*obj)["summary"].is_string()) {
      if (!subjective.empty()) subjective += "\n";
      subjective += (*obj)["summary"].get<std::string>();
    }
  } else {
    // Line fallback: "<leaf id>: <number>".
    for (const auto& line : text::split_lines(reply_text)) {
      std::string t = text::trim(line);
      if (t.rfind("- ", 0) == 0) t = text::trim(t.substr(2));
      auto colon = t.find(':');
      if (colon == std::string::npos) continue;
      std::string id = text::trim(t.substr(0, colon));
      if (!rubric.find_leaf(id)) continue;
      try {
        scores[id] = std::stod(text::trim(t.substr(colon + 1)));
      } catch (const std::exception&) {
        scores[id] = t.substr(colon + 1);  // kept as text; flagged below
      }
    }
    subjective = text::trim(reply_text);
  }

  std::vector<std::string> violations;
  ScoreCard card;
  for (const RubricNode* leaf : rubric.leaves()) {
    if (!scores.contains(leaf->id)) {
      violations.push_back("missing score for " + leaf->id);
      continue;
    }
    const json& v = scores[leaf->id];
    if (!v.is_number()) {
      violations.push_back("score for " + leaf->id + " is not numeric");
      continue;
    }
    double score = v.get<double>();
    if (score < 0.0 || score > leaf->max_points) {
      violations.push_back("score " + text::format_double(score, 2) + " for " + leaf->id +
                           " is outside [0, " + text::format_double(leaf->max_points, 0) + "]");
      continue;
    }
    card.leaf_scores[leaf->id] = score;
  }
  if (!violations.empty()) {
    throw Error(ErrorKind::malformed_scorecard, text::join(violations, "; "));
  }

  card.subjective_assessment = subjective;
  for (const auto& group : rubric.groups()) {
    double sum = 0;
    std::vector<const RubricNode*> stack{&group};
    while (!stack.empty()) {
      const RubricNode* n = stack.back();
      stack.pop_back();
      if (n->is_leaf()) {
        sum += card.leaf_scores.at(n->id);
      } else {
        for (const auto& c : n->children) stack.push_back(&c);
      }
    }
    card.per_group[group.id] = sum;
    card.total += sum;
  }
  return card;
}

ScoreCardResult request_scorecard(gateway::Gateway& gw, const InterviewDemo& demo,
                                  const recon::Dialogue& dialogue, const Rubric& rubric,
                                  const EvalOptions& opts) {
  ScoreCardResult result;
  ChatRequest req = build_eval_prompt(demo, dialogue, rubric, opts);
  result.fingerprints.push_back(gateway::fingerprint(req));
  auto resp = gw.chat(req);
  try {
    result.card = parse_scorecard(resp.text, rubric);
    return result;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::malformed_scorecard) throw;
    ChatRequest retry = req;
    retry.add(MessageRole::assistant, resp.text);
    retry.add(MessageRole::user,
              std::string("Your evaluation was not usable (") + e.what() +
                  "). Reply again with ONLY the JSON object, scoring every metric id with a "
                  "number between 0 and its maximum.");
    result.fingerprints.push_back(gateway::fingerprint(retry));
    auto resp2 = gw.chat(retry);
    result.card = parse_scorecard(resp2.text, rubric);
    result.attempts = 2;
    return result;
  }
}

// ---------------------------------------------------------------------------
// Orchestration and aggregation

void to_json(json& j, const EvalResult& r) {
  j = json{{"schema_version", "eval-result/v1"},
           {"case_id", r.case_id},
           {"demo", r.demo},
           {"scorecard", r.scorecard},
           {"judge_model_id", r.provenance.judge_model_id},
           {"rubric_version", r.provenance.rubric_version},
           {"fingerprints", r.provenance.fingerprints},
           {"demo_attempts", r.provenance.demo_attempts},
           {"score_attempts", r.provenance.score_attempts}};
}

void from_json(const json& j, EvalResult& r) {
  r.case_id = j.at("case_id").get<std::string>();
  r.demo = j.at("demo").get<InterviewDemo>();
  r.scorecard = j.at("scorecard").get<ScoreCard>();
  r.provenance.judge_model_id = j.value("judge_model_id", "");
  r.provenance.rubric_version = j.value("rubric_version", "");
  r.provenance.fingerprints = j.value("fingerprints", std::vector<std::string>{});
  r.provenance.demo_attempts = j.value("demo_attempts", 1);
  r.provenance.score_attempts = j.value("score_attempts", 1);
}

DemoResult DemoCache::get_or_create(const std::string& case_id,
                                    const std::function<DemoResult()>& make) {
  std::shared_future<DemoResult> fut;
  std::promise<DemoResult> promise;
  bool creator = false;
  {
    std::lock_guard lock(mu_);
    auto it = futures_.find(case_id);
    if (it != futures_.end()) {
      fut = it->second;
    } else {
      fut = promise.get_future().share();
      futures_[case_id] = fut;
      creator = true;
    }
  }
  if (creator) {
    try {
      promise.set_value(make());
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return fut.get();
}

size_t DemoCache::size() const {
  std::lock_guard lock(mu_);
  return futures_.size();
}

EvalResult evaluate(const corpus::CaseStudyQuestion& c, const recon::Dialogue& dialogue,
                    gateway::Gateway& gw, const Rubric& rubric, const EvalOptions& opts,
                    DemoCache* cache) {
  EvalResult result;
  result.case_id = c.id;
  result.provenance.judge_model_id = opts.judge_model_id;
  result.provenance.rubric_version = rubric.version();

  DemoResult demo = cache ? cache->get_or_create(c.id, [&] { return request_demo(gw, c, opts); })
                          : request_demo(gw, c, opts);
  result.demo = demo.demo;
  result.provenance.demo_attempts = demo.attempts;
  result.provenance.fingerprints = demo.fingerprints;

  ScoreCardResult score = request_scorecard(gw, demo.demo, dialogue, rubric, opts);
  result.scorecard = score.card;
  result.provenance.score_attempts = score.attempts;
  result.provenance.fingerprints.insert(result.provenance.fingerprints.end(),
                                        score.fingerprints.begin(), score.fingerprints.end());
  return result;
}

std::optional<int> percent_delta(double ours, double baseline) {
  if (baseline == 0.0) return std::nullopt;
  return static_cast<int>(std::llround((ours - baseline) / baseline * 100.0));
}

void to_json(json& j, const EvalReport& r) {
  json buckets = json::object();
  for (const auto& [name, b] : r.buckets) {
    buckets[name] = json{{"n", b.n}, {"means", b.means}};
  }
  j = json{{"n", r.n},
           {"rubric_version", r.rubric_version},
           {"means", r.means},
           {"buckets", buckets},
           {"deltas_pct", r.deltas_pct},
           {"bucket_deltas_pct", r.bucket_deltas_pct}};
}

void from_json(const json& j, EvalReport& r) {
  r.n = j.at("n").get<size_t>();
  r.rubric_version = j.value("rubric_version", "");
  r.means = j.at("means").get<std::map<std::string, double>>();
  r.buckets.clear();
  if (j.contains("buckets")) {
    for (const auto& [name, b] : j["buckets"].items()) {
      EvalReport::Bucket bucket;
      bucket.n = b.at("n").get<size_t>();
      bucket.means = b.at("means").get<std::map<std::string, double>>();
      r.buckets[name] = bucket;
    }
  }
  r.deltas_pct = j.value("deltas_pct", std::map<std::string, int>{});
  r.bucket_deltas_pct =
      j.value("bucket_deltas_pct", std::map<std::string, std::map<std::string, int>>{});
}

EvalReport aggregate(std::span<const EvalResult> results, const Rubric& rubric,
                     const AggregateOptions& opts) {
  if (results.empty()) throw Error(ErrorKind::empty_results, "nothing to aggregate");

  std::vector<std::string> metric_ids;
  for (const auto& g : rubric.groups()) metric_ids.push_back(g.id);

  for (const auto& r : results) {
    if (!r.provenance.rubric_version.empty() &&
        r.provenance.rubric_version != rubric.version()) {
      throw Error(ErrorKind::mismatched_rubric,
                  "result for case " + r.case_id + " was scored with rubric " +
                      r.provenance.rubric_version + ", aggregating with " + rubric.version());
    }
    for (const auto& id : metric_ids) {
      if (!r.scorecard.per_group.count(id)) {
        throw Error(ErrorKind::mismatched_rubric,
                    "result for case " + r.case_id + " lacks group " + id);
      }
    }
  }

  EvalReport report;
  report.n = results.size();
  report.rubric_version = rubric.version();

  auto mean_over = [&](auto&& pick) {
    std::map<std::string, double> means;
    for (const auto& id : metric_ids) means[id] = 0.0;
    means["total"] = 0.0;
    size_t n = 0;
    for (const auto& r : results) {
      if (!pick(r)) continue;
      ++n;
      for (const auto& id : metric_ids) means[id] += r.scorecard.per_group.at(id);
      means["total"] += r.scorecard.total;
    }
    if (n) {
      for (auto& [k, v] : means) v /= static_cast<double>(n);
    }
    return std::make_pair(means, n);
  };

  report.means = mean_over([](const EvalResult&) { return true; }).first;

  if (opts.bucket_of) {
    std::map<std::string, std::vector<const EvalResult*>> groups;
    for (const auto& r : results) {
      auto it = opts.bucket_of->find(r.case_id);
      std::string bucket = it == opts.bucket_of->end() ? "Unknown" : it->second;
      groups[bucket].push_back(&r);
    }
    for (const auto& [name, members] : groups) {
      auto [means, n] = mean_over([&](const EvalResult& r) {
        auto it = opts.bucket_of->find(r.case_id);
        std::string bucket = it == opts.bucket_of->end() ? "Unknown" : it->second;
        return bucket == name;
      });
      report.buckets[name] = {n, means};
    }
  }

  if (opts.baseline) {
    for (const auto& [metric, value] : report.means) {
      auto it = opts.baseline->means.find(metric);
      if (it == opts.baseline->means.end()) continue;
      if (auto d = percent_delta(value, it->second)) report.deltas_pct[metric] = *d;
    }
    for (const auto& [bucket, b] : report.buckets) {
      auto bit = opts.baseline->buckets.find(bucket);
      if (bit == opts.baseline->buckets.end()) continue;
      for (const auto& [metric, value] : b.means) {
        auto mit = bit->second.means.find(metric);
        if (mit == bit->second.means.end()) continue;
        if (auto d = percent_delta(value, mit->second)) {
          report.bucket_deltas_pct[bucket][metric] = *d;
        }
      }
    }
  }
  return report;
}

}  // namespace clinichat::evalx
