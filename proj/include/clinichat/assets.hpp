#pragma once

#include <string>

// Built-in default assets. Each is versioned inside its own content and can
// be overridden with a file of the same format via the run config.
namespace clinichat::assets {

const std::string& departments_json();
const std::string& interview_plan_template();
const std::string& role_settings();
const std::string& rubric_json();
const std::string& prompt_pack_en_json();

}  // namespace clinichat::assets
