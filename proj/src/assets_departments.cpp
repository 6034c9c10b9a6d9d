#include "clinichat/assets.hpp"

namespace clinichat::assets {

// 19 departments: which department most likely handles the initial visit.
// Keywords drive the deterministic fallback classifier; aliases absorb
// common model reply variants.
const std::string& departments_json() {
  static const std::string content = R"JSON({
  "version": "departments/v1",
  "departments": [
    {
      "name": "Cardiology",
      "aliases": ["cardiac", "cardiovascular"],
      "keywords": ["chest pain", "palpitations", "st elevation", "murmur", "myocardial",
                   "heart failure", "exertional dyspnea", "orthopnea", "atrial fibrillation"]
    },
    {
      "name": "Endocrinology",
      "aliases": ["endocrine"],
      "keywords": ["thyroid", "diabetes", "polyuria", "polydipsia", "goiter", "hba1c",
                   "cortisol", "insulin", "hyperglycemia"]
    },
    {
      "name": "Neurology",
      "aliases": ["neuro"],
      "keywords": ["headache", "seizure", "numbness", "tremor", "aphasia", "hemiparesis",
                   "gait disturbance", "stroke", "migraine"]
    },
    {
      "name": "Infectious Diseases",
      "aliases": ["infectious disease", "infectiology"],
      "keywords": ["hiv", "tuberculosis", "malaria", "recent travel", "sepsis",
                   "fever and chills", "endocarditis"]
    },
    {
      "name": "Psychiatry",
      "aliases": ["psychiatric", "mental health"],
      "keywords": ["depressed mood", "anxiety", "hallucinations", "suicidal", "insomnia",
                   "psychosis", "panic", "manic"]
    },
    {
      "name": "Obstetrics and Gynecology",
      "aliases": ["gynecology", "obstetrics", "obgyn", "ob/gyn", "obstetrics & gynecology"],
      "keywords": ["pregnant", "gestation", "menstrual", "vaginal", "contraception",
                   "amenorrhea", "pelvic pain", "last menstrual period"]
    },
    {
      "name": "Pediatrics",
      "aliases": ["pediatric", "paediatrics"],
      "keywords": ["newborn", "infant", "month-old", "toddler", "immunizations",
                   "well-child", "day-old"]
    },
    {
      "name": "Orthopedics",
      "aliases": ["orthopaedics", "orthopedic surgery"],
      "keywords": ["fracture", "knee pain", "shoulder dislocation", "sprain",
                   "joint swelling after injury", "limp after fall"]
    },
    {
      "name": "Urology",
      "aliases": ["urologic"],
      "keywords": ["dysuria", "hematuria", "urinary frequency", "prostate", "testicular",
                   "kidney stone", "urinary retention"]
    },
    {
      "name": "Gastroenterology",
      "aliases": ["gi", "digestive"],
      "keywords": ["abdominal pain", "diarrhea", "hematemesis", "jaundice", "constipation",
                   "melena", "heartburn", "epigastric"]
    },
    {
      "name": "Pulmonology",
      "aliases": ["pulmonary", "respiratory medicine"],
      "keywords": ["cough", "wheezing", "hemoptysis", "asthma", "copd", "shortness of breath",
                   "pleuritic"]
    },
    {
      "name": "Nephrology",
      "aliases": ["renal medicine"],
      "keywords": ["creatinine", "dialysis", "proteinuria", "renal failure", "nephrotic",
                   "oliguria"]
    },
    {
      "name": "Hematology-Oncology",
      "aliases": ["hematology", "oncology", "hematology/oncology", "heme-onc"],
      "keywords": ["anemia", "lymphoma", "leukemia", "easy bruising", "lymphadenopathy",
                   "night sweats and weight loss", "pancytopenia"]
    },
    {
      "name": "Dermatology",
      "aliases": ["derm"],
      "keywords": ["rash", "pruritus", "skin lesion", "mole", "eczema", "psoriasis",
                   "blistering"]
    },
    {
      "name": "Ophthalmology",
      "aliases": ["eye clinic"],
      "keywords": ["vision loss", "red eye", "diplopia", "eye pain", "blurred vision",
                   "floaters"]
    },
    {
      "name": "Otolaryngology",
      "aliases": ["ent", "ear nose and throat"],
      "keywords": ["sore throat", "hearing loss", "ear pain", "hoarseness", "sinusitis",
                   "tinnitus", "epistaxis"]
    },
    {
      "name": "Emergency Medicine",
      "aliases": ["emergency", "er", "emergency department"],
      "keywords": ["motor vehicle collision", "unresponsive", "overdose", "major trauma",
                   "gunshot", "stab wound"]
    },
    {
      "name": "Rheumatology",
      "aliases": ["rheumatic"],
      "keywords": ["morning stiffness", "rheumatoid", "lupus", "arthritis",
                   "joint pain in multiple joints", "raynaud"]
    },
    {
      "name": "General Surgery",
      "aliases": ["surgery", "surgical"],
      "keywords": ["appendicitis", "hernia", "gallstones", "acute abdomen", "cholecystitis",
                   "rebound tenderness"]
    }
  ]
})JSON";
  return content;
}

}  // namespace clinichat::assets
