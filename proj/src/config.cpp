#include "clinichat/config.hpp"

#include <filesystem>

#include "clinichat/assets.hpp"
#include "clinichat/jsonl.hpp"
#include "clinichat/simulated.hpp"

namespace clinichat::cli {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig RunConfig::load(const std::string& path) {
  json j;
  try {
    j = json::parse(jsonl::read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config_error, path + ": " + e.what());
  }
  return from_json(j, fs::path(path).parent_path().string());
}

RunConfig RunConfig::from_json(const json& j, const std::string& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.raw = j;

  if (j.contains("providers")) {
    for (const auto& [name, p] : j["providers"].items()) {
      Provider prov;
      prov.kind = p.value("kind", "http");
      if (prov.kind != "http" && prov.kind != "simulated") {
        throw Error(ErrorKind::config_error, "provider " + name + " has unknown kind " +
                                                 prov.kind);
      }
      prov.http.name = name;
      prov.http.base_url = p.value("base_url", "");
      prov.http.chat_path = p.value("chat_path", "/v1/chat/completions");
      prov.http.api_key_env = p.value("api_key_env", "");
      prov.http.timeout_seconds = p.value("timeout_seconds", 120);
      if (p.contains("prices")) {
        for (const auto& [model, price] : p["prices"].items()) {
          prov.prices[model] = {price.value("prompt_per_1k", 0.0),
                                price.value("completion_per_1k", 0.0)};
        }
      }
      cfg.providers[name] = std::move(prov);
    }
  }
  cfg.default_provider = j.value("default_provider", "");
  if (cfg.default_provider.empty() && cfg.providers.size() == 1) {
    cfg.default_provider = cfg.providers.begin()->first;
  }
  if (j.contains("model_providers")) {
    cfg.model_providers = j["model_providers"].get<std::map<std::string, std::string>>();
  }
  for (const auto& [model, provider] : cfg.model_providers) {
    if (!cfg.providers.count(provider)) {
      throw Error(ErrorKind::config_error,
                  "model " + model + " routes to undefined provider " + provider);
    }
  }
  if (!cfg.default_provider.empty() && !cfg.providers.count(cfg.default_provider)) {
    throw Error(ErrorKind::config_error, "undefined default provider " + cfg.default_provider);
  }

  if (j.contains("models")) {
    const json& m = j["models"];
    cfg.generator_model = m.value("generator", cfg.generator_model);
    cfg.judge_model = m.value("judge", cfg.judge_model);
    cfg.patient_model = m.value("patient", cfg.patient_model);
    cfg.classifier_model = m.value("classifier", "");
  }

  if (j.contains("cassette")) {
    cfg.cassette_path = j["cassette"].value("path", "");
    cfg.cassette_mode = gateway::cassette_mode_from_string(j["cassette"].value("mode", "replay"));
  }
  cfg.concurrency = j.value("concurrency", 4);
  if (cfg.concurrency < 1) throw Error(ErrorKind::config_error, "concurrency must be >= 1");

  if (j.contains("retry")) {
    cfg.retry.max_attempts = j["retry"].value("max_attempts", 3);
    cfg.retry.base_backoff = std::chrono::milliseconds(j["retry"].value("backoff_ms", 1000));
    cfg.retry.multiplier = j["retry"].value("multiplier", 2.0);
  }

  cfg.generation.model_id = cfg.generator_model;
  if (j.contains("generation")) {
    const json& g = j["generation"];
    cfg.generation.temperature = g.value("temperature", 0.7);
    cfg.generation.max_output_tokens = g.value("max_output_tokens", 4096);
    cfg.generation.max_prompt_tokens = g.value("max_prompt_tokens", 8000L);
    cfg.generation.min_pairs = g.value("min_dialogue_pairs", 10);
    cfg.generation.max_pairs = g.value("max_dialogue_pairs", 80);
  }

  cfg.judge.judge_model_id = cfg.judge_model;
  if (j.contains("judge")) {
    cfg.judge.temperature = j["judge"].value("temperature", 0.0);
    cfg.judge.max_output_tokens = j["judge"].value("max_output_tokens", 4096);
    cfg.judge.answer_withheld = j["judge"].value("answer_withheld", true);
  }

  if (j.contains("interaction")) {
    const json& i = j["interaction"];
    cfg.interaction.max_pairs = i.value("max_pairs", 80);
    cfg.interaction.max_utterance_tokens = i.value("max_utterance_tokens", 256);
    if (i.contains("termination_markers")) {
      cfg.interaction.termination_markers =
          i["termination_markers"].get<std::vector<std::string>>();
    }
  }
  if (cfg.interaction.max_pairs < 0) {
    throw Error(ErrorKind::config_error, "interaction.max_pairs must be >= 0");
  }

  if (j.contains("export")) {
    cfg.export_cfg.max_source_length = j["export"].value("max_source_length", 2048L);
    cfg.export_cfg.max_target_length = j["export"].value("max_target_length", 128L);
  }

  if (j.contains("assets")) {
    const json& a = j["assets"];
    cfg.template_path = a.value("template", "");
    cfg.roles_path = a.value("roles", "");
    cfg.rubric_path = a.value("rubric", "");
    cfg.prompt_pack_path = a.value("prompt_pack", "");
    cfg.departments_path = a.value("departments", "");
    for (const std::string* p : {&cfg.template_path, &cfg.roles_path, &cfg.rubric_path,
                                 &cfg.prompt_pack_path, &cfg.departments_path}) {
      if (!p->empty() && !fs::exists(cfg.resolve(*p))) {
        throw Error(ErrorKind::config_error, "asset file not found: " + cfg.resolve(*p));
      }
    }
  }

  cfg.success_floor = j.value("success_floor", 0.9);
  if (cfg.success_floor < 0.0 || cfg.success_floor > 1.0) {
    throw Error(ErrorKind::config_error, "success_floor must be within [0, 1]");
  }
  cfg.output_dir = j.value("output_dir", "out");
  return cfg;
}

std::string RunConfig::resolve(const std::string& path) const {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / p).string();
}

std::shared_ptr<gateway::Cassette> RunConfig::open_cassette() const {
  return std::make_shared<gateway::Cassette>(cassette_mode, resolve(cassette_path));
}

std::shared_ptr<gateway::ChatProvider> RunConfig::build_provider() const {
  if (cassette_mode == gateway::CassetteMode::replay) return nullptr;
  auto instantiate = [](const Provider& p) -> std::shared_ptr<gateway::ChatProvider> {
    if (p.kind == "simulated") return std::make_shared<simulated::SimulatedExpertProvider>();
    return gateway::make_http_provider(p.http);
  };
  auto router = std::make_shared<gateway::RoutingProvider>();
  for (const auto& [model, provider_name] : model_providers) {
    router->route(model, instantiate(providers.at(provider_name)));
  }
  if (!default_provider.empty()) {
    router->set_default(instantiate(providers.at(default_provider)));
  }
  return router;
}

std::unique_ptr<gateway::Gateway> RunConfig::build_gateway() const {
  return std::make_unique<gateway::Gateway>(build_provider(), open_cassette(), retry,
                                            concurrency);
}

gateway::CostModel RunConfig::cost_model() const {
  gateway::CostModel model;
  for (const auto& [name, provider] : providers) {
    for (const auto& [model_id, price] : provider.prices) model.set_price(model_id, price);
  }
  return model;
}

recon::InterviewPlanTemplate RunConfig::load_template() const {
  if (template_path.empty()) return recon::InterviewPlanTemplate::builtin();
  return recon::InterviewPlanTemplate::parse(jsonl::read_text_file(resolve(template_path)));
}

recon::RoleSettings RunConfig::load_roles() const {
  if (roles_path.empty()) return recon::RoleSettings::builtin();
  return recon::RoleSettings::parse(jsonl::read_text_file(resolve(roles_path)));
}

evalx::Rubric RunConfig::load_rubric() const {
  if (rubric_path.empty()) return evalx::Rubric::canonical();
  return evalx::Rubric::load_file(resolve(rubric_path));
}

harness::PromptPack RunConfig::load_prompt_pack() const {
  if (prompt_pack_path.empty()) return harness::PromptPack::english();
  return harness::PromptPack::load_file(resolve(prompt_pack_path));
}

corpus::DepartmentTaxonomy RunConfig::load_taxonomy() const {
  if (departments_path.empty()) return corpus::DepartmentTaxonomy::builtin();
  return corpus::DepartmentTaxonomy::from_json(
      nlohmann::json::parse(jsonl::read_text_file(resolve(departments_path))));
}

}  // namespace clinichat::cli
