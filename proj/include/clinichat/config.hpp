#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "clinichat/corpus.hpp"
#include "clinichat/evalx.hpp"
#include "clinichat/exporter.hpp"
#include "clinichat/gateway.hpp"
#include "clinichat/harness.hpp"
#include "clinichat/recon.hpp"

namespace clinichat::cli {

// One declarative run configuration. Secrets never live here; providers
// reference environment variable names. Relative paths resolve against the
// config file's directory.
struct RunConfig {
  struct Provider {
    std::string kind = "http";  // "http" | "simulated"
    gateway::HttpProviderConfig http;
    std::map<std::string, gateway::PriceEntry> prices;
  };

  std::string base_dir;
  nlohmann::json raw;  // snapshot for manifests

  std::map<std::string, Provider> providers;
  std::string default_provider;
  std::map<std::string, std::string> model_providers;  // model id -> provider name

  std::string generator_model = "glm-4-air";
  std::string judge_model = "gpt-4o";
  std::string patient_model = "glm-4-air";
  std::string classifier_model;  // empty -> rules-only classification

  std::string cassette_path;
  gateway::CassetteMode cassette_mode = gateway::CassetteMode::replay;
  int concurrency = 4;
  gateway::RetryPolicy retry;

  recon::ReconOptions generation;
  evalx::EvalOptions judge;
  harness::InteractionLimits interaction;
  exporter::ExportConfig export_cfg;

  // Optional asset overrides (paths); empty means the built-in version.
  std::string template_path;
  std::string roles_path;
  std::string rubric_path;
  std::string prompt_pack_path;
  std::string departments_path;

  double success_floor = 0.9;
  std::string output_dir = "out";

  static RunConfig load(const std::string& path);
  static RunConfig from_json(const nlohmann::json& j, const std::string& base_dir);

  std::string resolve(const std::string& path) const;

  std::shared_ptr<gateway::Cassette> open_cassette() const;
  // Replay mode gets no provider at all, so no network path exists.
  std::shared_ptr<gateway::ChatProvider> build_provider() const;
  std::unique_ptr<gateway::Gateway> build_gateway() const;
  gateway::CostModel cost_model() const;

  recon::InterviewPlanTemplate load_template() const;
  recon::RoleSettings load_roles() const;
  evalx::Rubric load_rubric() const;
  harness::PromptPack load_prompt_pack() const;
  corpus::DepartmentTaxonomy load_taxonomy() const;
};

}  // namespace clinichat::cli
