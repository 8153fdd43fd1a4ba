#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "router/types.hpp"

namespace router {

using AmplitudeEvaluator =
    std::function<ScatteringAmplitudes(const RouterConfig&, double)>;

struct ValidationWorst {
  std::string route;  // which comparison produced the worst deviation
  int trial = -1;     // -1 marks the user-supplied configuration
  std::size_t n_channels = 0;
  double deviation = 0.0;
};

struct ValidationReport {
  int trials = 0;
  double spectral_threshold = 1e-10;
  double time_threshold = 0.05;
  double analytic_n1_deviation = 0.0;  // must be exact to 1e-12
  double max_dev_dense = 0.0;
  double max_dev_rank_one = 0.0;
  double time_domain_deviation = 0.0;
  ValidationWorst worst;

  bool spectral_pass() const;
  bool time_pass() const;
  bool pass() const { return spectral_pass() && time_pass(); }
};

/// Cross-checks the closed-form evaluator against the dense and rank-one
/// linear-system routes on the given configuration, on `trials` random
/// devices (n up to 8), and on the exactly known single-channel resonant
/// case; also compares the time-domain long-time distribution at the
/// pulse's spectral width against the closed form. `evaluator` defaults
/// to the closed form and is injectable so the harness itself can be
/// exercised against a deliberately wrong implementation.
ValidationReport run_validation(const RouterConfig& config,
                                const PulseSpec& pulse, double k, int trials,
                                std::uint64_t rng_seed,
                                const AmplitudeEvaluator& evaluator = {});

}  // namespace router
