#pragma once

#include <string>

#include "clinichat/gateway.hpp"

namespace clinichat::simulated {

/// Deterministic offline stand-in for a chat model. Dispatches on the
/// request tag (recon.knowledge, recon.generate, evalx.demo, evalx.score,
/// corpus.classify, harness.*, baseline.direct) and fabricates a
/// schema-valid reply seeded by the request text, so identical requests get
/// identical replies. Used to record fixture cassettes and to demo the
/// pipeline with no credentials; it produces plausible-shaped text, not
/// medical content.
class SimulatedExpertProvider : public gateway::ChatProvider {
 public:
  std::string name() const override { return "simulated"; }
  gateway::ChatResponse complete(const gateway::ChatRequest& req) override;
};

}  // namespace clinichat::simulated
