#include "clinichat/assets.hpp"

namespace clinichat::assets {

// The manually planned interview process: the adapted note structure with a
// customized-inquiry subsection, diagnosis-only plan, and interview
// techniques folded into the items. {{key}} slots are filled from the
// knowledge bundle before generation.
const std::string& interview_plan_template() {
  static const std::string content = R"TPL(version: interview-plan/v1
# 1. Subjective
## 1.1 General Information
- Greet the patient warmly, introduce yourself, and confirm the patient's name, age, and occupation.
## 1.2 Chief Complaint
- Open with a focused open-ended question about what brings the patient in today.
- Establish the cardinal symptom and how long it has been present.
## 1.3 History of Present Illness
- Characterize the cardinal symptom step by step: onset, location, quality, severity, timing, and what makes it better or worse.
- Ask about possible causes or predisposing factors the patient suspects.
- Trace how the illness has progressed since it began.
- Screen for accompanying symptoms, noting both what is present and what is absent. Symptoms relevant to this case:
{{signs_and_symptoms}}
- Ask what the patient has already tried for this illness and whether it helped.
- Ask about the patient's general condition over the course of the illness: appetite, sleep, weight, and energy.
- Ask about over-the-counter medication and nutritional supplements taken for this illness.
## 1.4 Past Medical History
- Ask about pertinent past medical and surgical conditions.
- Ask how those past conditions were managed.
- Ask about vaccination status.
- Ask about current medications and any medication allergies.
## 1.5 Review of Systems
- Briefly screen the major body systems not already covered, one or two at a time.
## 1.6 Customized Inquiry
- Ask questions tailored to this patient group and the suspected condition:
{{customized_inquiry}}
- Risk factors worth probing for this condition:
{{risk_factors}}
## 1.7 Personal History
- Ask about lifestyle: smoking, alcohol, diet, and exercise.
## 1.8 Social History
- Ask about living situation, work environment, and recent travel.
## 1.9 Family History
- Ask whether close relatives have had similar or hereditary conditions.
# 2. Objective
- Ask the patient's consent before the physical examination and explain what will be examined and why.
- Summarize the notable examination and test findings for the patient in plain language.
# 3. Assessment
- Share the preliminary diagnosis with the patient:
{{most_likely_disease}}
- Explain the reasoning behind it in plain language:
{{diagnostic_basis}}
- Mention what else was considered and why it is less likely:
{{differential_diagnosis}}
# 4. Plan
- Recommend the examinations that would confirm the diagnosis:
{{confirmatory_tests}}
- Advise the patient on how urgently to seek further care and what the next diagnostic steps are.
)TPL";
  return content;
}

// Personality and behavior rules for both simulated parties.
const std::string& role_settings() {
  static const std::string content = R"ROLES(version: role-settings/v1
[physician]
- Show humanistic care: listen attentively, acknowledge the patient's feelings, and treat the patient with sympathy and respect.
- Use plain language the patient can follow; immediately explain any medical term the patient may not know.
- Begin each topic with an open-ended question, then narrow down with specific closed questions.
- Never ask more than two questions in a single utterance.
- Do not ask leading questions, and do not ask about the same topic twice in a row.
- Keep every utterance brief and to the point, and respond directly to what the patient just said.
[patient]
- Answer every question honestly, using everyday language rather than medical terms.
- Describe symptoms the way an ordinary person would feel and report them.
- If asked about anything your medical record does not mention, reply "No" or "Not sure" instead of inventing details.
- Cooperate with the physician, and occasionally ask short, natural questions about your condition.
)ROLES";
  return content;
}

}  // namespace clinichat::assets
