#include "clinichat/assets.hpp"

namespace clinichat::assets {

// The 100-point interview scoring system: six groups, 34 scored leaves.
// Internal nodes carry the sum of their children; loaders re-check this.
const std::string& rubric_json() {
  static const std::string content = R"JSON({
  "version": "rubric/v1",
  "groups": [
    {
      "id": "history",
      "name": "Medical History",
      "max_points": 45,
      "children": [
        {"id": "history.general_information", "name": "General Information", "max_points": 2,
         "description": "Asked for the patient's basic details such as sex, age, and occupation."},
        {"id": "history.chief_complaint", "name": "Chief Complaint", "max_points": 4,
         "description": "Established the cardinal symptom of this visit and its duration."},
        {"id": "history.hpi", "name": "History of Present Illness", "max_points": 19,
         "children": [
           {"id": "history.hpi.cardinal_symptom_characteristics", "name": "Cardinal Symptom Characteristics", "max_points": 5,
            "description": "Characterized the cardinal symptom: onset, location, quality, severity, timing, modifiers."},
           {"id": "history.hpi.possible_cause", "name": "Possible Cause or Predisposing Cause", "max_points": 2,
            "description": "Explored what might have caused or predisposed the patient to the illness."},
           {"id": "history.hpi.disease_progression", "name": "Disease Progression", "max_points": 2,
            "description": "Traced how the illness has evolved since onset."},
           {"id": "history.hpi.concomitant_symptoms", "name": "Positive and Negative Concomitant Symptoms", "max_points": 5,
            "description": "Screened accompanying symptoms, recording both their presence and absence."},
           {"id": "history.hpi.treatment_history", "name": "Treatment History", "max_points": 2,
            "description": "Asked what has already been tried for the present illness and its effect."},
           {"id": "history.hpi.general_condition", "name": "General Condition during Disease Course", "max_points": 2,
            "description": "Asked about appetite, sleep, weight, and energy over the illness course."},
           {"id": "history.hpi.otc_medication", "name": "Use of Over-the-Counter Medication and Nutritional Supplement", "max_points": 1,
            "description": "Asked about self-medication and supplements taken for the illness."}
         ]},
        {"id": "history.past_medical", "name": "Past Medical History", "max_points": 8,
         "children": [
           {"id": "history.past_medical.medical_surgical_history", "name": "Pertinent Medical and Surgical History", "max_points": 2,
            "description": "Asked about relevant prior medical conditions and operations."},
           {"id": "history.past_medical.treatment_history", "name": "Treatment History", "max_points": 2,
            "description": "Asked how prior conditions were managed."},
           {"id": "history.past_medical.vaccination_status", "name": "Vaccination Status", "max_points": 2,
            "description": "Asked about the patient's vaccinations."},
           {"id": "history.past_medical.medication_allergies", "name": "Medications and Medical Allergies", "max_points": 2,
            "description": "Asked about current medications and allergies to medications."}
         ]},
        {"id": "history.review_of_systems", "name": "Review of Systems", "max_points": 2,
         "description": "Screened the major body systems beyond the presenting complaint."},
        {"id": "history.customized_inquiry", "name": "Customized Inquiry", "max_points": 4,
         "description": "Asked questions tailored to the patient's group, age, or condition to personalize the history."},
        {"id": "history.personal_history", "name": "Personal History", "max_points": 2,
         "description": "Asked about lifestyle factors such as smoking, alcohol, diet, and exercise."},
        {"id": "history.social_history", "name": "Social History", "max_points": 2,
         "description": "Asked about living situation, work, and travel."},
        {"id": "history.family_history", "name": "Family History", "max_points": 2,
         "description": "Asked whether close relatives have had similar or hereditary conditions."}
      ]
    },
    {
      "id": "techniques",
      "name": "Interview Techniques",
      "max_points": 25,
      "children": [
        {"id": "techniques.organization", "name": "Organization", "max_points": 3,
         "description": "The interview followed a logical order."},
        {"id": "techniques.detailed_cardinal_inquiry", "name": "Detailed Inquiry of Cardinal Symptoms", "max_points": 3,
         "description": "Probed the cardinal symptoms in depth rather than superficially."},
        {"id": "techniques.question_types", "name": "Types of Questions", "max_points": 3,
         "description": "Opened each section with a focused open-ended question before narrowing to specific ones."},
        {"id": "techniques.rare_repetition", "name": "Rarely Repetitive Questioning", "max_points": 1,
         "description": "Repeated questions only to clarify or summarize."},
        {"id": "techniques.non_leading", "name": "Non-leading Questions", "max_points": 1,
         "description": "Avoided questions that suggest their own answer."},
        {"id": "techniques.patient_perspective", "name": "Elicit Patient's Perspective", "max_points": 1,
         "description": "Invited the patient's own beliefs, feelings, and expectations about the illness."},
        {"id": "techniques.lack_of_jargon", "name": "Lack of Jargon", "max_points": 2,
         "description": "Used plain language or immediately explained unavoidable terminology."},
        {"id": "techniques.max_two_questions", "name": "Max Two Questions per Inquiry", "max_points": 3,
         "description": "Asked at most two questions per utterance."},
        {"id": "techniques.brief_responses", "name": "Brief and To the Point Response", "max_points": 3,
         "description": "Kept responses concise and accurate, without rambling."},
        {"id": "techniques.responded_directly", "name": "Responded Directly", "max_points": 2,
         "description": "Addressed the patient's actual concern without drifting off topic."},
        {"id": "techniques.empathy", "name": "Empathy and Encouragement", "max_points": 2,
         "description": "Expressed understanding, respect, and support."},
        {"id": "techniques.advise_urgent_care", "name": "Advise Urgent Care", "max_points": 1,
         "description": "Recommended that the patient seek timely medical attention."}
      ]
    },
    {
      "id": "exam",
      "name": "Medical Exam",
      "max_points": 4,
      "children": [
        {"id": "exam.results_consistency", "name": "Medical Examination Results Consistency", "max_points": 4,
         "description": "The examination and test findings discussed in the interview match those in the demonstration."}
      ]
    },
    {
      "id": "diagnosis",
      "name": "Diagnosis Result",
      "max_points": 10,
      "children": [
        {"id": "diagnosis.result_consistency", "name": "Diagnosis Consistency", "max_points": 10,
         "description": "The preliminary and differential diagnoses match those in the demonstration."}
      ]
    },
    {
      "id": "basis",
      "name": "Diagnosis Basis",
      "max_points": 10,
      "children": [
        {"id": "basis.consistency", "name": "Diagnostic Basis Consistency", "max_points": 10,
         "description": "The reasoning offered for the diagnosis matches the demonstration's basis."}
      ]
    },
    {
      "id": "tests",
      "name": "Confirm. Tests",
      "max_points": 6,
      "children": [
        {"id": "tests.consistency", "name": "Confirmatory Tests Consistency", "max_points": 6,
         "description": "The recommended confirmatory examinations match those in the demonstration."}
      ]
    }
  ]
})JSON";
  return content;
}

}  // namespace clinichat::assets
