#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "clinichat/corpus.hpp"
#include "clinichat/dialogue.hpp"
#include "clinichat/recon.hpp"
#include "clinichat/text.hpp"

namespace clinichat::testing {

inline nlohmann::json raw_case_json() {
  return nlohmann::json{
      {"id", "case-001"},
      {"question",
       "A 45-year-old man comes to the clinic because of severe epigastric abdominal pain for "
       "the past two days. He has a history of heavy alcohol use and reports nausea since "
       "yesterday. Physical examination shows epigastric tenderness. His temperature is 38.1 C "
       "and serum lipase is elevated. Which of the following is the most likely diagnosis?"},
      {"options",
       {{"A", "Peptic ulcer disease"},
        {"B", "Acute cholecystitis"},
        {"C", "Acute pancreatitis"},
        {"D", "Gastric carcinoma"}}},
      {"answer", "C"},
      {"meta", {{"source", "fixture"}}}};
}

inline corpus::CaseStudyQuestion fixture_case() {
  return corpus::parse_case(raw_case_json());
}

// Alternating physician-first dialogue with the given number of full pairs;
// utterance words are exact so word statistics are hand-computable.
inline recon::Dialogue make_dialogue(size_t pairs, int physician_words, int patient_words,
                                     const std::string& disease = "") {
  recon::Dialogue d;
  auto words = [](int n, const std::string& stem) {
    std::string out;
    for (int i = 0; i < n; ++i) {
      if (i) out += ' ';
      out += stem + std::to_string(i);
    }
    return out;
  };
  for (size_t p = 0; p < pairs; ++p) {
    std::string phys = words(physician_words, "q");
    if (!disease.empty() && p + 1 == pairs) {
      // keep the word count: replace the final words with the mention
      phys = words(physician_words - static_cast<int>(text::word_count(disease)), "q") + " " +
             disease;
    }
    d.turns.push_back({recon::Speaker::physician, phys});
    d.turns.push_back({recon::Speaker::patient, words(patient_words, "a")});
  }
  return d;
}

inline recon::KnowledgeBundle golden_bundle() {
  recon::KnowledgeBundle k;
  k.most_likely_disease = "acute pancreatitis";
  k.differential_diagnosis = {{"peptic ulcer disease", "pain changes with meals"},
                              {"acute cholecystitis", "right upper quadrant tenderness"}};
  k.diagnostic_basis = {"epigastric pain after heavy alcohol use", "elevated serum lipase"};
  k.confirmatory_tests = {"serum lipase and amylase", "abdominal ultrasound"};
  k.signs_and_symptoms = {"epigastric pain radiating to the back", "nausea", "low-grade fever"};
  k.risk_factors = {"heavy alcohol use", "gallstones"};
  k.customized_inquiry = {"Ask how much alcohol the patient drinks per week.",
                          "Ask whether the pain radiates to the back."};
  return k;
}

}  // namespace clinichat::testing
