#pragma once

#include "peer/peer.hpp"
#include "peer/simgen.hpp"

#include <string>

namespace peer {

/// Serialize the fitted model: per-layer (d_hat, sparse u_hat as
/// index/value pairs, dense v_hat, lambda), r_hat, the initializer
/// diagnostics, the configuration echo, and timings.
void write_model_json(const std::string& path, const PeerModel& model,
                      const PeerOptions& opts);

/// Ground truth + scenario echo + noise level, for scoring simulated fits.
void write_truth_json(const std::string& path, const GroundTruth& truth,
                      const SimScenario& scn, double sigma);

/// SimScenario from a JSON file; unknown keys are ignored, missing keys
/// keep their defaults, and the result is validated.
SimScenario load_scenario(const std::string& path);

}  // namespace peer
