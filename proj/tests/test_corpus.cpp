#include <random>

#include "doctest.h"

#include "clinichat/corpus.hpp"
#include "clinichat/gateway.hpp"
#include "clinichat/text.hpp"
#include "support/fixtures.hpp"
#include "support/providers.hpp"

using namespace clinichat;
using clinichat::testing::fixture_case;
using clinichat::testing::make_dialogue;

TEST_SUITE_BEGIN("corpus");

TEST_CASE("parse_case maps fields and resolves the answer text") {
  corpus::CaseStudyQuestion c = fixture_case();
  CHECK(c.id == "case-001");
  CHECK(c.answer_key == "C");
  CHECK(c.answer_text == "Acute pancreatitis");
  CHECK(c.options.size() == 4);
  CHECK(c.question_stem == "Which of the following is the most likely diagnosis?");
  CHECK(c.vignette.find("45-year-old man") != std::string::npos);
  CHECK(c.vignette.find("Which of the following") == std::string::npos);
}

TEST_CASE("parse_case rejects an answer key that is not an option") {
  auto raw = testing::raw_case_json();
  raw["answer"] = "E";
  CHECK_THROWS_WITH_AS(corpus::parse_case(raw), doctest::Contains("UnknownAnswerKey"), Error);
}

TEST_CASE("parse_case rejects missing or empty question text") {
  auto raw = testing::raw_case_json();
  raw["question"] = "";
  CHECK_THROWS_AS(corpus::parse_case(raw), Error);
  try {
    corpus::parse_case(raw);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_field);
  }
  raw.erase("question");
  CHECK_THROWS_AS(corpus::parse_case(raw), Error);
}

TEST_CASE("segment_soap splits at the first objective cue") {
  corpus::CaseStudyQuestion c = fixture_case();
  corpus::SoapView soap = corpus::segment_soap(c);
  CHECK(soap.objective.rfind("Physical examination", 0) == 0);
  CHECK(soap.subjective.find("Physical examination") == std::string::npos);
  CHECK(soap.assessment_plan_query == c.question_stem);
  // the two spans partition the vignette exactly
  CHECK(soap.subjective + soap.objective == c.vignette);
  CHECK(soap.objective_offset == soap.subjective.size());
}

TEST_CASE("segment_soap with no cue leaves the objective span empty") {
  corpus::CaseStudyQuestion c = fixture_case();
  c.vignette = "A 30-year-old woman reports fatigue for three weeks.";
  corpus::SoapView soap = corpus::segment_soap(c);
  CHECK(soap.objective.empty());
  CHECK(soap.subjective == c.vignette);
}

TEST_CASE("soap spans always concatenate to the input") {
  // property over assorted cue placements
  std::mt19937 rng(7);
  const std::vector<std::string> bits = {
      "A 60-year-old presents with cough.", "Vital signs are stable.",
      "He has had fevers for a week.",      "Laboratory studies show leukocytosis.",
      "His temperature is 37.9 C.",         "She works as a teacher."};
  for (int iter = 0; iter < 200; ++iter) {
    corpus::CaseStudyQuestion c = fixture_case();
    std::string vignette;
    int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      if (i) vignette += ' ';
      vignette += bits[rng() % bits.size()];
    }
    c.vignette = vignette;
    corpus::SoapView soap = corpus::segment_soap(c);
    CHECK(soap.subjective + soap.objective == c.vignette);
  }
}

TEST_CASE("taxonomy has exactly 19 departments including the named ones") {
  auto taxonomy = corpus::DepartmentTaxonomy::builtin();
  CHECK(taxonomy.entries().size() == 19);
  for (const char* name :
       {"Cardiology", "Endocrinology", "Neurology", "Infectious Diseases", "Psychiatry",
        "Obstetrics and Gynecology", "Pediatrics", "Orthopedics", "Urology"}) {
    CHECK_MESSAGE(taxonomy.is_member(name), name);
  }
}

TEST_CASE("keyword rules classify a cardiology vignette") {
  auto taxonomy = corpus::DepartmentTaxonomy::builtin();
  auto hit = taxonomy.classify_by_rules(
      "A 58-year-old man presents with crushing chest pain radiating to the left arm. "
      "ST elevation is noted in the anterior leads.");
  REQUIRE(hit.has_value());
  CHECK(*hit == "Cardiology");
}

TEST_CASE("classifier normalizes case and whitespace variants") {
  auto taxonomy = corpus::DepartmentTaxonomy::builtin();
  CHECK(taxonomy.normalize("  cardiology \n") == "Cardiology");
  CHECK(taxonomy.normalize("CARDIOLOGY.") == "Cardiology");
  CHECK(taxonomy.normalize("gynecology") == "Obstetrics and Gynecology");
  CHECK(taxonomy.normalize("ENT") == "Otolaryngology");
  CHECK_FALSE(taxonomy.normalize("Dermatologyy").has_value());
}

TEST_CASE("LLM classification falls back and fails typed after two bad replies") {
  auto provider =
      std::make_shared<testing::ScriptedProvider>(std::vector<std::string>{"Dermatologyy",
                                                                           "Dermatologyy"});
  auto cassette = std::make_shared<gateway::Cassette>(gateway::CassetteMode::passthrough);
  gateway::Gateway gw(provider, cassette);
  corpus::ClassifierOptions opts;
  opts.model_id = "classifier-model";
  corpus::DepartmentClassifier classifier(corpus::DepartmentTaxonomy::builtin(), &gw, opts);

  corpus::CaseStudyQuestion c = fixture_case();
  c.vignette = "A patient with no distinguishing keywords whatsoever.";
  c.question_stem = "What next?";
  try {
    classifier.classify(c);
    FAIL("expected ClassificationFailed");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::classification_failed);
  }
  CHECK(provider->calls() == 2);  // one prompt + one re-prompt, then rules
}

TEST_CASE("LLM classification accepts a normalized reply without re-prompt") {
  auto provider =
      std::make_shared<testing::ScriptedProvider>(std::vector<std::string>{" cardiology "});
  auto cassette = std::make_shared<gateway::Cassette>(gateway::CassetteMode::passthrough);
  gateway::Gateway gw(provider, cassette);
  corpus::ClassifierOptions opts;
  opts.model_id = "classifier-model";
  corpus::DepartmentClassifier classifier(corpus::DepartmentTaxonomy::builtin(), &gw, opts);
  CHECK(classifier.classify(fixture_case()) == "Cardiology");
  CHECK(provider->calls() == 1);
}

TEST_CASE("filter_eligible passes a complete case and is pure") {
  corpus::CaseStudyQuestion c = fixture_case();
  corpus::Eligibility e1 = corpus::filter_eligible(c);
  corpus::Eligibility e2 = corpus::filter_eligible(c);
  CHECK(e1.pass);
  CHECK(e1.reasons.empty());
  CHECK(e2.pass == e1.pass);
  CHECK(e2.reasons == e1.reasons);
}

TEST_CASE("filter_eligible reports a missing objective span") {
  corpus::CaseStudyQuestion c = fixture_case();
  c.vignette = "A 45-year-old man has had epigastric pain for two days.";
  corpus::Eligibility e = corpus::filter_eligible(c);
  CHECK_FALSE(e.pass);
  REQUIRE(e.reasons.size() == 1);
  CHECK(e.reasons[0].find("exam results") != std::string::npos);
}

TEST_CASE("filter_eligible agrees with hand labels on a 20-case fixture") {
  struct Labeled {
    std::string vignette;
    bool pass;
  };
  // Hand-labeled: pass needs a history cue sentence AND an objective cue.
  const std::vector<Labeled> fixture = {
      {"A 45-year-old man has had chest pain for two days. Physical examination shows pallor.",
       true},
      {"A 30-year-old woman reports headaches since last month. Vital signs are normal.", true},
      {"A 61-year-old presents with cough. Laboratory studies show leukocytosis.", true},
      {"A 59-year-old man has a history of diabetes. His temperature is 37.2 C.", true},
      {"A 22-year-old woman with nausea.", false},                      // no history, no exam
      {"A 50-year-old man reports fatigue for six months.", false},     // no exam findings
      {"Physical examination shows scattered wheezes.", false},         // nothing subjective
      {"A 41-year-old has had back pain since a fall. On examination there is tenderness.",
       true},
      {"A 7-year-old boy was diagnosed with asthma previously. Auscultation reveals wheezing.",
       true},
      {"A 33-year-old woman. Blood pressure is 118/76.", false},        // no history sentence
      {"A 68-year-old man reports weight loss for the past month. X-ray shows a nodule.", true},
      {"An 81-year-old woman has been dizzy since Tuesday. Pulse is irregular.", true},
      {"A 26-year-old reports a rash.", false},
      {"A 36-year-old man with a history of smoking presents with dyspnea. Vital signs show "
       "tachypnea.",
       true},
      {"A newborn is brought in. Temperature is 36.8 C.", false},       // no history sentence
      {"A 47-year-old woman has had palpitations for a week. Physical examination is "
       "unremarkable.",
       true},
      {"A 52-year-old man noticed swelling two weeks ago. On examination there is pitting "
       "edema.",
       true},
      {"A 19-year-old reports sore throat since yesterday.", false},    // no exam findings
      {"A 73-year-old man has had tremors for years. Physical examination shows rigidity.",
       true},
      {"A 29-year-old woman. Laboratory results are pending.", false},  // no history sentence
  };
  size_t expected_pass = 0, got_pass = 0;
  for (const auto& item : fixture) {
    corpus::CaseStudyQuestion c = fixture_case();
    c.vignette = item.vignette;
    if (item.pass) ++expected_pass;
    corpus::Eligibility e = corpus::filter_eligible(c);
    if (e.pass) ++got_pass;
    CHECK_MESSAGE(e.pass == item.pass, item.vignette);
  }
  CHECK(got_pass == expected_pass);
}

TEST_CASE("compute_stats rejects an empty corpus") {
  std::vector<recon::Dialogue> none;
  CHECK_THROWS_AS(corpus::compute_stats(none), Error);
}

TEST_CASE("compute_stats on a two-pair fixture matches hand numbers") {
  recon::Dialogue d;
  d.turns = {{recon::Speaker::physician, "one two three four"},
             {recon::Speaker::patient, "a b c"},
             {recon::Speaker::physician, "one two three four five six"},
             {recon::Speaker::patient, "a b c d e"}};
  std::vector<recon::Dialogue> corpus_list = {d};
  corpus::DatasetStats s = corpus::compute_stats(corpus_list);
  CHECK(s.n_dialogues == 1);
  CHECK(s.avg_turns == doctest::Approx(2.0));
  CHECK(s.max_turns == 2);
  CHECK(s.min_turns == 2);
  CHECK(s.avg_words_physician == doctest::Approx(5.0));
  CHECK(s.avg_words_patient == doctest::Approx(4.0));
}

TEST_CASE("a trailing unanswered physician utterance counts as a turn") {
  recon::Dialogue d = make_dialogue(3, 5, 4);
  d.turns.push_back({recon::Speaker::physician, "closing words here"});
  std::vector<recon::Dialogue> corpus_list = {d};
  corpus::DatasetStats s = corpus::compute_stats(corpus_list);
  CHECK(s.max_turns == 4);
}

TEST_CASE("compute_stats is permutation invariant and bounds the average") {
  std::vector<recon::Dialogue> dialogues;
  for (size_t pairs : {19, 23, 25, 28, 30, 32, 34, 36, 40, 53}) {
    dialogues.push_back(make_dialogue(pairs, 14, 11));
  }
  corpus::DatasetStats a = corpus::compute_stats(dialogues);
  std::mt19937 rng(3);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(dialogues.begin(), dialogues.end(), rng);
    corpus::DatasetStats b = corpus::compute_stats(dialogues);
    CHECK(b.avg_turns == doctest::Approx(a.avg_turns));
    CHECK(b.max_turns == a.max_turns);
    CHECK(b.min_turns == a.min_turns);
    CHECK(b.avg_words_physician == doctest::Approx(a.avg_words_physician));
    CHECK(b.avg_words_patient == doctest::Approx(a.avg_words_patient));
  }
  CHECK(a.min_turns <= a.avg_turns);
  CHECK(a.avg_turns <= a.max_turns);
}

TEST_CASE("word counting strips punctuation before splitting") {
  CHECK(text::word_count("Hello, doctor! I'm not well.") == 5);
  CHECK(text::word_count("   ") == 0);
  CHECK(text::word_count("one") == 1);
}

TEST_SUITE_END();
