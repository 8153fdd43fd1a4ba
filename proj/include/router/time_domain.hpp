#pragma once

#include <cstddef>

#include "router/types.hpp"

namespace router {

/// Fixed-step integration window. dt is snapped so an integer number of
/// steps lands exactly on t_end.
struct TimeGrid {
  double t_end = 0.0;
  double dt = 0.0;
  std::size_t stride = 1;  // store every stride-th step (plus first/last)

  TimeGrid(double t_end, double dt, std::size_t stride = 1);

  std::size_t steps() const;
  double effective_dt() const;
  /// dt * max(|omega_i|, gamma_i, epsilon, |varpi|) must stay <= 0.1;
  /// throws StabilityViolation otherwise. Needs the run inputs, so it is
  /// checked at simulation entry rather than at grid construction.
  void check_stability(const RouterConfig& config, const PulseSpec& pulse) const;
};

/// Emitter amplitudes and per-channel emitted flux, sampled on the
/// storage grid. flux_out rows hold the running integral
/// gamma_plus_i int_0^t |beta_i|^2 dtau (trapezoid rule).
struct EmitterTrajectory {
  std::vector<double> times;
  std::vector<std::vector<cplx>> beta;
  std::vector<std::vector<double>> flux_out;

  double emitter_norm(std::size_t row) const;
  const std::vector<double>& final_flux() const;
};

/// Uniform mode grid spanning [varpi - bandwidth/2, varpi + bandwidth/2]
/// in the input guide and in each output guide.
struct ModeDiscretization {
  int modes_per_guide;  // odd, >= 3, so the grid is centered on varpi
  double bandwidth;

  ModeDiscretization(int modes_per_guide, double bandwidth);
};

/// Integrates the Markovian emitter equations
///   dbeta_i/dt = -(i omega_i + gp_i/2) beta_i
///                - sum_j sqrt(gm_i gm_j)/2 beta_j - drive_i(t)
/// with drive_i(t) = sqrt(2 gm_i epsilon) e^{-(epsilon + i varpi) t}
/// (classical RK4). Throws StabilityViolation if the emitter occupation
/// ever exceeds 1 + 1e-6.
EmitterTrajectory simulate_markov(const RouterConfig& config,
                                  const PulseSpec& pulse, const TimeGrid& grid);

/// Long-time routing probabilities from a trajectory: p_out[i] is the
/// final emitted flux, p_back the conservation remainder. Requires the
/// emitters to have emptied (occupation <= 1e-6), else NotConverged.
RoutingDistribution longtime_distribution(const EmitterTrajectory& traj,
                                          const RouterConfig& config);

/// Brute-force reference: evolves the discretized single-excitation
/// state (input modes, output modes per channel, emitter amplitudes)
/// under the full coupling Hamiltonian and reads off the channel
/// populations at t_end.
///
/// Caveat for parameter choices: a uniform grid with spacing dk makes the
/// emitted field wrap around after t = 2 pi / dk, so t_end must stay
/// below that recurrence time.
RoutingDistribution simulate_full_hamiltonian(const RouterConfig& config,
                                              const PulseSpec& pulse,
                                              const ModeDiscretization& disc,
                                              const TimeGrid& grid);

}  // namespace router
