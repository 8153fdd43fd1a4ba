#pragma once

#include <cstdint>
#include <string>

#include "router/types.hpp"

namespace router {

/// Requested routing probabilities; must sum to 1 within 1e-9.
struct TargetDistribution {
  double p_back = 0.0;
  std::vector<double> p_out;

  std::size_t size() const { return p_out.size(); }
  void validate() const;
};

/// Search region: per-channel detunings in [-delta_max, delta_max] and
/// rates in [0, gamma_max]. The frozen mask pins parameters (order
/// omega, gamma_minus, gamma_plus per channel) to the baseline values.
struct DesignSpace {
  std::size_t n_channels = 1;
  double delta_max = 10.0;
  double gamma_max = 20.0;
  double carrier_k = 0.0;
  std::vector<bool> frozen;   // 3 * n_channels entries; empty = all free
  RouterConfig baseline;      // values for frozen parameters; defaults to
                              // omega = 0, gamma = 1 on every channel

  void validate() const;
  std::size_t free_parameters() const;
};

struct DesignResult {
  RouterConfig config;
  double residual = 0.0;
  long evaluations = 0;
  std::string seed_used;
};

struct SeedConfig {
  RouterConfig config;
  std::string label;
};

/// Squared distance between the achieved and requested distributions,
/// (p_back - t_back)^2 + sum_i (p_out_i - t_out_i)^2.
double objective(const RouterConfig& config, double k,
                 const TargetDistribution& target);

/// Closed-form starting points for recognizable targets: uniform split
/// (gamma_plus = N gamma_minus on resonance), single-port routing,
/// all-back reflection (far detuned), and the two-channel zero-reflection
/// family. Falls back to the midpoint of the bounds.
std::vector<SeedConfig> analytic_seed(const TargetDistribution& target,
                                      const DesignSpace& space);

/// Multi-start downhill-simplex search over the closed-form
/// probabilities. Rates are parameterized by their square roots so
/// nonnegativity holds by construction; detunings are clamped to bounds.
/// Deterministic for a fixed rng_seed. Exhausting the budget is not an
/// error: the best result found so far is returned with its residual.
DesignResult optimize(const TargetDistribution& target,
                      const DesignSpace& space, long budget, int restarts,
                      std::uint64_t rng_seed);

}  // namespace router
