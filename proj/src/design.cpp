#include "router/design.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "router/core.hpp"

namespace router {

namespace {

constexpr double kPenalty = 1e30;  // for probe points where the closed form degenerates

struct Transform {
  const DesignSpace* space;
  std::vector<std::size_t> free_idx;  // flat parameter indices, 3 per channel

  explicit Transform(const DesignSpace& s) : space(&s) {
    const std::size_t total = 3 * s.n_channels;
    for (std::size_t p = 0; p < total; ++p)
      if (s.frozen.empty() || !s.frozen[p]) free_idx.push_back(p);
  }

  std::size_t dim() const { return free_idx.size(); }

  RouterConfig base_config() const {
    RouterConfig cfg = space->baseline;
    cfg.channels.resize(space->n_channels, ChannelParams{0.0, 1.0, 1.0});
    return cfg;
  }

  // x holds delta directly and sqrt(gamma) for the rates; decoding clamps
  // into the box so every probed configuration is admissible.
  RouterConfig decode(const std::vector<double>& x) const {
    RouterConfig cfg = base_config();
    for (std::size_t f = 0; f < free_idx.size(); ++f) {
      const std::size_t p = free_idx[f];
      auto& ch = cfg.channels[p / 3];
      const double v = x[f];
      switch (p % 3) {
        case 0:
          ch.omega = std::clamp(v, -space->delta_max, space->delta_max);
          break;
        case 1:
          ch.gamma_minus = std::min(v * v, space->gamma_max);
          break;
        default:
          ch.gamma_plus = std::min(v * v, space->gamma_max);
          break;
      }
    }
    return cfg;
  }

  std::vector<double> encode(const RouterConfig& cfg) const {
    std::vector<double> x(dim());
    for (std::size_t f = 0; f < free_idx.size(); ++f) {
      const std::size_t p = free_idx[f];
      const auto& ch = cfg.channels[p / 3];
      switch (p % 3) {
        case 0: x[f] = ch.omega; break;
        case 1: x[f] = std::sqrt(ch.gamma_minus); break;
        default: x[f] = std::sqrt(ch.gamma_plus); break;
      }
    }
    return x;
  }

  double initial_step(std::size_t f) const {
    return free_idx[f] % 3 == 0 ? std::min(1.0, 0.2 * space->delta_max) : 0.25;
  }
};

struct SlotOutcome {
  std::vector<double> x;
  double f = kPenalty;
  long evaluations = 0;
};

// Downhill simplex with periodic reinitialization around the incumbent
// until the evaluation cap is reached or the simplex collapses.
SlotOutcome run_simplex(const std::function<double(const std::vector<double>&)>& fn,
                        std::vector<double> x0, const Transform& tf,
                        long eval_cap) {
  const std::size_t dim = x0.size();
  SlotOutcome best;

  auto eval = [&](const std::vector<double>& x) {
    ++best.evaluations;
    return fn(x);
  };

  best.x = x0;
  best.f = eval(x0);

  double scale = 1.0;
  while (best.evaluations < eval_cap && scale > 1e-10) {
    // Fresh simplex around the incumbent.
    std::vector<std::vector<double>> v(dim + 1, best.x);
    std::vector<double> fv(dim + 1);
    fv[0] = best.f;
    for (std::size_t i = 0; i < dim && best.evaluations < eval_cap; ++i) {
      v[i + 1][i] += scale * tf.initial_step(i);
      fv[i + 1] = eval(v[i + 1]);
    }

    bool improved = false;
    while (best.evaluations < eval_cap) {
      std::vector<std::size_t> order(dim + 1);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      const std::size_t lo = order[0], hi = order[dim];
      const std::size_t second_hi = dim >= 1 ? order[dim - 1] : order[0];

      if (fv[lo] < best.f) {
        best.f = fv[lo];
        best.x = v[lo];
        improved = true;
      }
      if (fv[hi] - fv[lo] <= 1e-16 * (1.0 + std::abs(fv[lo]))) break;

      std::vector<double> centroid(dim, 0.0);
      for (std::size_t r = 0; r <= dim; ++r) {
        if (r == hi) continue;
        for (std::size_t i = 0; i < dim; ++i) centroid[i] += v[r][i];
      }
      for (double& c : centroid) c /= static_cast<double>(dim);

      auto blend = [&](double coef) {
        std::vector<double> p(dim);
        for (std::size_t i = 0; i < dim; ++i)
          p[i] = centroid[i] + coef * (centroid[i] - v[hi][i]);
        return p;
      };

      const auto reflected = blend(1.0);
      const double fr = eval(reflected);
      if (fr < fv[lo]) {
        const auto expanded = blend(2.0);
        const double fe = eval(expanded);
        if (fe < fr) {
          v[hi] = expanded;
          fv[hi] = fe;
        } else {
          v[hi] = reflected;
          fv[hi] = fr;
        }
      } else if (fr < fv[second_hi]) {
        v[hi] = reflected;
        fv[hi] = fr;
      } else {
        const bool outside = fr < fv[hi];
        const auto contracted = blend(outside ? 0.5 : -0.5);
        const double fc = eval(contracted);
        if (fc < (outside ? fr : fv[hi])) {
          v[hi] = contracted;
          fv[hi] = fc;
        } else {
          for (std::size_t r = 0; r <= dim; ++r) {
            if (r == lo) continue;
            for (std::size_t i = 0; i < dim; ++i)
              v[r][i] = v[lo][i] + 0.5 * (v[r][i] - v[lo][i]);
            if (best.evaluations >= eval_cap) break;
            fv[r] = eval(v[r]);
          }
        }
      }
    }

    if (!improved && scale <= 1e-10) break;
    scale *= 0.25;
  }
  return best;
}

bool approx(double a, double b, double tol = 1e-6) {
  return std::abs(a - b) <= tol;
}

}  // namespace

void TargetDistribution::validate() const {
  if (p_out.empty()) throw ValueError("target needs at least one channel");
  double total = p_back;
  if (p_back < -1e-12 || p_back > 1.0 + 1e-12)
    throw ValueError("p_back outside [0, 1]");
  for (double p : p_out) {
    if (p < -1e-12 || p > 1.0 + 1e-12)
      throw ValueError("target probability outside [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw ValueError("target probabilities must sum to 1");
}

void DesignSpace::validate() const {
  if (n_channels == 0) throw ValueError("n_channels must be >= 1");
  if (!(delta_max > 0.0) || !std::isfinite(delta_max))
    throw ValueError("delta_max must be positive and finite");
  if (!(gamma_max > 0.0) || !std::isfinite(gamma_max))
    throw ValueError("gamma_max must be positive and finite");
  if (!frozen.empty() && frozen.size() != 3 * n_channels)
    throw ValueError("frozen mask must have 3 entries per channel");
  if (!baseline.channels.empty() && baseline.channels.size() != n_channels)
    throw ValueError("baseline channel count mismatch");
}

std::size_t DesignSpace::free_parameters() const {
  if (frozen.empty()) return 3 * n_channels;
  std::size_t count = 0;
  for (bool f : frozen)
    if (!f) ++count;
  return count;
}

double objective(const RouterConfig& config, double k,
                 const TargetDistribution& target) {
  if (config.size() != target.size())
    throw ValueError("config/target channel count mismatch");
  const auto dist = routing_distribution(eval_amplitudes(config, k));
  double r = (dist.p_back - target.p_back) * (dist.p_back - target.p_back);
  for (std::size_t i = 0; i < dist.p_out.size(); ++i) {
    const double d = dist.p_out[i] - target.p_out[i];
    r += d * d;
  }
  return r;
}

std::vector<SeedConfig> analytic_seed(const TargetDistribution& target,
                                      const DesignSpace& space) {
  target.validate();
  space.validate();
  const std::size_t n = space.n_channels;
  auto clamp_gamma = [&](double g) { return std::min(g, space.gamma_max); };
  auto clamp_delta = [&](double d) {
    return std::clamp(d, -space.delta_max, space.delta_max);
  };

  std::vector<SeedConfig> seeds;
  auto uniform_config = [&](double omega, double gm, double gp) {
    RouterConfig cfg;
    cfg.channels.assign(n, ChannelParams{clamp_delta(omega), clamp_gamma(gm),
                                         clamp_gamma(gp)});
    return cfg;
  };

  // Uniform 1/N split with no reflection: resonance and gp = N gm.
  bool uniform = target.p_back <= 1e-6 && target.size() == n;
  for (double p : target.p_out)
    uniform = uniform && approx(p, 1.0 / static_cast<double>(n));
  if (uniform)
    seeds.push_back(
        {uniform_config(0.0, 1.0, static_cast<double>(n)), "uniform-split"});

  // All the weight on one port: resonant symmetric emitter there, the
  // rest pushed far off resonance.
  for (std::size_t m = 0; m < target.p_out.size() && m < n; ++m) {
    if (target.p_out[m] >= 1.0 - 1e-6) {
      RouterConfig cfg = uniform_config(space.delta_max, 1.0, 1.0);
      cfg.channels[m] = ChannelParams{0.0, 1.0, 1.0};
      seeds.push_back({cfg, "single-port"});
      break;
    }
  }

  // Everything reflected: detune every emitter.
  if (target.p_back >= 1.0 - 1e-6)
    seeds.push_back({uniform_config(space.delta_max, 1.0, 1.0), "far-detuned"});

  // Two channels, zero reflection: the family
  // (g1p - g1m)(g2p - g2m) = g1m g2m at resonance. With gm = 1 the member
  // gp_i = 1 / p_i hits the target split exactly.
  if (n == 2 && target.size() == 2 && target.p_back <= 1e-6 &&
      target.p_out[0] > 1e-6 && target.p_out[1] > 1e-6) {
    RouterConfig cfg;
    cfg.channels = {
        ChannelParams{0.0, 1.0, clamp_gamma(1.0 / target.p_out[0])},
        ChannelParams{0.0, 1.0, clamp_gamma(1.0 / target.p_out[1])}};
    seeds.push_back({cfg, "zero-reflection-n2"});
  }

  if (seeds.empty())
    seeds.push_back(
        {uniform_config(0.0, 0.5 * space.gamma_max, 0.5 * space.gamma_max),
         "midpoint"});
  if (seeds.size() > 3) seeds.resize(3);
  return seeds;
}

DesignResult optimize(const TargetDistribution& target,
                      const DesignSpace& space, long budget, int restarts,
                      std::uint64_t rng_seed) {
  target.validate();
  space.validate();
  if (target.size() != space.n_channels)
    throw ValueError("target/space channel count mismatch");
  const Transform tf(space);
  const long min_budget = 50 * static_cast<long>(space.free_parameters());
  if (budget < min_budget)
    throw ValueError("budget must be at least 50 per free parameter (" +
                     std::to_string(min_budget) + ")");
  if (restarts < 1) throw ValueError("restarts must be >= 1");

  const auto seeds = analytic_seed(target, space);
  const double k = space.carrier_k;

  auto penalized = [&](const std::vector<double>& x) {
    try {
      return objective(tf.decode(x), k, target);
    } catch (const NumericError&) {
      return kPenalty;
    }
  };

  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const long per_slot = std::max<long>(1, budget / restarts);

  DesignResult best;
  long total_evals = 0;
  long best_slot_evals = 0;
  int best_slot = -1;

  for (int slot = 0; slot < restarts; ++slot) {
    std::vector<double> x0;
    std::string label;
    if (slot < static_cast<int>(seeds.size())) {
      x0 = tf.encode(seeds[slot].config);
      label = seeds[slot].label;
    } else {
      RouterConfig cfg = tf.base_config();
      for (auto& ch : cfg.channels) {
        ch.omega = (2.0 * unit(rng) - 1.0) * space.delta_max;
        ch.gamma_minus = unit(rng) * space.gamma_max;
        ch.gamma_plus = unit(rng) * space.gamma_max;
      }
      x0 = tf.encode(cfg);
      label = "random-" + std::to_string(slot);
    }

    const auto outcome = run_simplex(penalized, std::move(x0), tf, per_slot);
    total_evals += outcome.evaluations;
    if (best_slot < 0 || outcome.f < best.residual ||
        (outcome.f == best.residual && outcome.evaluations < best_slot_evals)) {
      best.residual = outcome.f;
      best.config = tf.decode(outcome.x);
      best.seed_used = label;
      best_slot_evals = outcome.evaluations;
      best_slot = slot;
    }
  }

  best.evaluations = total_evals;
  // Report the residual recomputed at the returned configuration so the
  // two always agree exactly.
  best.residual = objective(best.config, k, target);
  return best;
}

}  // namespace router
