#include "router/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "router/core.hpp"
#include "router/spectral.hpp"
#include "router/time_domain.hpp"

namespace router {

namespace {

double amplitude_deviation(const ScatteringAmplitudes& a,
                           const ScatteringAmplitudes& b) {
  double d = std::abs(a.alpha_back - b.alpha_back);
  for (std::size_t i = 0; i < a.alpha_out.size(); ++i)
    d = std::max(d, std::abs(a.alpha_out[i] - b.alpha_out[i]));
  return d;
}

}  // namespace

bool ValidationReport::spectral_pass() const {
  return analytic_n1_deviation <= 1e-12 &&
         max_dev_dense <= spectral_threshold &&
         max_dev_rank_one <= spectral_threshold;
}

bool ValidationReport::time_pass() const {
  return time_domain_deviation <= time_threshold;
}

ValidationReport run_validation(const RouterConfig& config,
                                const PulseSpec& pulse, double k, int trials,
                                std::uint64_t rng_seed,
                                const AmplitudeEvaluator& evaluator) {
  config.validate();
  pulse.validate();
  if (trials < 0) throw ValueError("trials must be >= 0");
  const AmplitudeEvaluator eval_fn =
      evaluator ? evaluator : [](const RouterConfig& cfg, double kk) {
        return eval_amplitudes(cfg, kk);
      };

  ValidationReport report;
  report.trials = trials;

  auto record = [&](const std::string& route, int trial, std::size_t n,
                    double dev, double& bucket) {
    bucket = std::max(bucket, dev);
    if (dev > report.worst.deviation)
      report.worst = ValidationWorst{route, trial, n, dev};
  };

  auto compare_routes = [&](const RouterConfig& cfg, double kk, int trial) {
    const auto closed = eval_fn(cfg, kk);
    const auto dense = transfer_amplitudes(cfg, kk, SolveMethod::Dense);
    const auto rank_one = transfer_amplitudes(cfg, kk, SolveMethod::RankOne);
    record("dense-vs-closed", trial, cfg.size(),
           amplitude_deviation(closed, dense), report.max_dev_dense);
    record("rank-one-vs-closed", trial, cfg.size(),
           amplitude_deviation(closed, rank_one), report.max_dev_rank_one);
  };

  // Exactly known single-channel case: resonant symmetric coupling sends
  // the photon entirely into the output port with amplitude -1.
  {
    RouterConfig n1;
    n1.channels = {ChannelParams{0.0, 1.0, 1.0}};
    const auto amps = eval_fn(n1, 0.0);
    double dev = std::abs(amps.alpha_back);
    dev = std::max(dev, std::abs(amps.alpha_out.at(0) - cplx(-1.0, 0.0)));
    report.analytic_n1_deviation = dev;
    if (dev > report.worst.deviation)
      report.worst = ValidationWorst{"analytic-n1", -1, 1, dev};
  }

  compare_routes(config, k, -1);

  std::mt19937_64 rng(rng_seed);
  std::uniform_int_distribution<int> pick_n(1, 8);
  std::uniform_real_distribution<double> omega_dist(-3.0, 3.0);
  std::uniform_real_distribution<double> gamma_dist(0.1, 4.0);
  std::uniform_real_distribution<double> k_dist(-2.0, 2.0);
  for (int trial = 0; trial < trials; ++trial) {
    RouterConfig cfg;
    const int n = pick_n(rng);
    for (int i = 0; i < n; ++i)
      cfg.channels.push_back(
          ChannelParams{omega_dist(rng), gamma_dist(rng), gamma_dist(rng)});
    compare_routes(cfg, k_dist(rng), trial);
  }

  // Time-domain route on the user configuration: integrate until the
  // drive has rung down and the emitters have emptied, then compare the
  // long-time distribution against the closed form at the carrier.
  {
    double min_rate = std::numeric_limits<double>::infinity();
    for (const auto& ch : config.channels) {
      const double total = ch.gamma_plus + ch.gamma_minus;
      if (total > 0.0) min_rate = std::min(min_rate, total);
    }
    const double tail = std::isfinite(min_rate) ? 20.0 / min_rate : 0.0;
    const double t_end = 6.0 / pulse.epsilon + tail;
    double scale = std::max(pulse.epsilon, std::abs(pulse.varpi));
    for (const auto& ch : config.channels)
      scale = std::max({scale, std::abs(ch.omega), ch.gamma_minus, ch.gamma_plus});
    const double dt = 0.1 / std::max(1.0, scale);
    const TimeGrid grid(t_end, dt, 1000);

    const auto traj = simulate_markov(config, pulse, grid);
    const auto time_dist = longtime_distribution(traj, config);
    const auto closed = routing_distribution(eval_fn(config, pulse.varpi));
    double dev = std::abs(time_dist.p_back - closed.p_back);
    for (std::size_t i = 0; i < closed.p_out.size(); ++i)
      dev = std::max(dev, std::abs(time_dist.p_out[i] - closed.p_out[i]));
    report.time_domain_deviation = dev;
    if (dev > report.worst.deviation)
      report.worst = ValidationWorst{"time-domain", -1, config.size(), dev};
  }

  return report;
}

}  // namespace router
