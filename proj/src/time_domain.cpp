#include "router/time_domain.hpp"

#include <algorithm>
#include <cmath>

namespace router {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kOccupationTol = 1e-6;
constexpr double kNormTol = 1e-6;
constexpr double kMaxSteps = 1e8;

double config_scale(const RouterConfig& config, const PulseSpec& pulse) {
  double scale = std::max(pulse.epsilon, std::abs(pulse.varpi));
  for (const auto& ch : config.channels) {
    scale = std::max(scale, std::abs(ch.omega));
    scale = std::max(scale, ch.gamma_minus);
    scale = std::max(scale, ch.gamma_plus);
  }
  return scale;
}

}  // namespace

TimeGrid::TimeGrid(double t_end_, double dt_, std::size_t stride_)
    : t_end(t_end_), dt(dt_), stride(stride_) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw ValueError("t_end must be finite and >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValueError("dt must be > 0");
  if (stride == 0) throw ValueError("stride must be >= 1");
  if (t_end / dt > kMaxSteps)
    throw ValueError("time grid exceeds the step budget of 1e8");
}

std::size_t TimeGrid::steps() const {
  if (t_end == 0.0) return 0;
  return static_cast<std::size_t>(std::max(1.0, std::round(t_end / dt)));
}

double TimeGrid::effective_dt() const {
  const std::size_t n = steps();
  return n == 0 ? dt : t_end / static_cast<double>(n);
}

void TimeGrid::check_stability(const RouterConfig& config,
                               const PulseSpec& pulse) const {
  const double scale = config_scale(config, pulse);
  if (effective_dt() * scale > 0.1 * (1.0 + 1e-12))
    throw StabilityViolation("dt too large: dt * max rate exceeds 0.1");
}

double EmitterTrajectory::emitter_norm(std::size_t row) const {
  double total = 0.0;
  for (const auto& b : beta[row]) total += std::norm(b);
  return total;
}

const std::vector<double>& EmitterTrajectory::final_flux() const {
  if (flux_out.empty()) throw ValueError("empty trajectory");
  return flux_out.back();
}

ModeDiscretization::ModeDiscretization(int modes_per_guide_, double bandwidth_)
    : modes_per_guide(modes_per_guide_), bandwidth(bandwidth_) {
  if (modes_per_guide < 3 || modes_per_guide % 2 == 0)
    throw ValueError("modes_per_guide must be odd and >= 3");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw ValueError("bandwidth must be > 0");
}

EmitterTrajectory simulate_markov(const RouterConfig& config,
                                  const PulseSpec& pulse,
                                  const TimeGrid& grid) {
  config.validate();
  pulse.validate();
  grid.check_stability(config, pulse);

  const std::size_t n = config.size();
  const std::size_t nsteps = grid.steps();
  const double dt = grid.effective_dt();

  std::vector<cplx> decay(n);       // i omega_i + gp_i/2
  std::vector<double> root_gm(n);   // sqrt(gm_i)
  std::vector<double> drive_amp(n); // sqrt(2 gm_i epsilon)
  std::vector<double> gp(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ch = config.channels[i];
    decay[i] = cplx(0.5 * ch.gamma_plus, ch.omega);
    root_gm[i] = std::sqrt(ch.gamma_minus);
    drive_amp[i] = std::sqrt(2.0 * ch.gamma_minus * pulse.epsilon);
    gp[i] = ch.gamma_plus;
  }
  const cplx drive_pole(pulse.epsilon, pulse.varpi);

  auto deriv = [&](double t, const std::vector<cplx>& b,
                   std::vector<cplx>& out) {
    cplx shared(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) shared += root_gm[j] * b[j];
    const cplx envelope = std::exp(-drive_pole * t);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = -decay[i] * b[i] - 0.5 * root_gm[i] * shared -
               drive_amp[i] * envelope;
  };

  std::vector<cplx> b(n, cplx(0.0, 0.0)), tmp(n), k1(n), k2(n), k3(n), k4(n);
  std::vector<double> flux(n, 0.0), occ_prev(n, 0.0);

  EmitterTrajectory traj;
  auto store = [&](double t) {
    traj.times.push_back(t);
    traj.beta.push_back(b);
    traj.flux_out.push_back(flux);
  };
  store(0.0);

  for (std::size_t step = 0; step < nsteps; ++step) {
    const double t = static_cast<double>(step) * dt;
    deriv(t, b, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = b[i] + 0.5 * dt * k1[i];
    deriv(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = b[i] + 0.5 * dt * k2[i];
    deriv(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = b[i] + dt * k3[i];
    deriv(t + dt, tmp, k4);

    double occ_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      b[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
      const double occ = std::norm(b[i]);
      flux[i] += 0.5 * dt * gp[i] * (occ_prev[i] + occ);
      occ_prev[i] = occ;
      occ_total += occ;
    }
    if (occ_total > 1.0 + 1e-6)
      throw StabilityViolation(
          "emitter occupation exceeded 1: dt too large or drive mis-normalized");

    if ((step + 1) % grid.stride == 0 || step + 1 == nsteps)
      store(static_cast<double>(step + 1) * dt);
  }
  return traj;
}

RoutingDistribution longtime_distribution(const EmitterTrajectory& traj,
                                          const RouterConfig& config) {
  if (traj.times.empty()) throw ValueError("empty trajectory");
  if (traj.beta.back().size() != config.size())
    throw ValueError("trajectory/config channel count mismatch");
  const double occ = traj.emitter_norm(traj.times.size() - 1);
  if (occ > kOccupationTol)
    throw NotConverged("emitter occupation " + std::to_string(occ) +
                       " at t_end; extend the grid");

  RoutingDistribution dist;
  dist.p_out = traj.final_flux();
  double emitted = 0.0;
  for (double p : dist.p_out) emitted += p;
  // The back-channel field interferes with the unabsorbed input, so its
  // probability is inferred from conservation rather than flux-integrated.
  dist.p_back = std::max(0.0, 1.0 - emitted);
  return dist;
}

RoutingDistribution simulate_full_hamiltonian(const RouterConfig& config,
                                              const PulseSpec& pulse,
                                              const ModeDiscretization& disc,
                                              const TimeGrid& grid) {
  config.validate();
  pulse.validate();
  grid.check_stability(config, pulse);

  const std::size_t n = config.size();
  const std::size_t m = static_cast<std::size_t>(disc.modes_per_guide);
  const double scale = config_scale(config, pulse);
  if (!(disc.bandwidth > 10.0 * scale))
    throw ValueError("bandwidth must exceed 10x the largest rate/frequency");
  const double state_dim = static_cast<double>((n + 1) * m + n);
  if (state_dim > 1e6) throw ValueError("state dimension exceeds 1e6 budget");

  const double dk = disc.bandwidth / static_cast<double>(m - 1);
  const double root_dk = std::sqrt(dk);
  const std::size_t nsteps = grid.steps();
  const double dt = grid.effective_dt();

  // RK4 on the imaginary axis is stable only for dt |k| < 2 sqrt 2; check
  // against the band edge with a little headroom.
  const double edge = std::abs(pulse.varpi) + 0.5 * disc.bandwidth;
  if (dt * edge > 2.0)
    throw StabilityViolation("dt too large for the mode band edge");

  std::vector<double> mode_freq(m);
  for (std::size_t j = 0; j < m; ++j)
    mode_freq[j] = pulse.varpi + (static_cast<double>(j) -
                                  static_cast<double>((m - 1) / 2)) * dk;

  std::vector<double> gm_coupling(n), gp_coupling(n);
  for (std::size_t i = 0; i < n; ++i) {
    gm_coupling[i] = std::sqrt(config.channels[i].gamma_minus / (2.0 * kPi));
    gp_coupling[i] = std::sqrt(config.channels[i].gamma_plus / (2.0 * kPi));
  }

  // State layout: input modes [0, m), output guide i modes
  // [(i+1) m, (i+2) m), emitters at the tail.
  const std::size_t dim = (n + 1) * m + n;
  const std::size_t emitter_base = (n + 1) * m;
  std::vector<cplx> psi(dim, cplx(0.0, 0.0));

  double init_norm = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    psi[j] = pulse.spectral_amplitude(mode_freq[j]) * root_dk;
    init_norm += std::norm(psi[j]);
  }
  // The band cuts the Lorentzian tails; renormalize so the discrete state
  // carries exactly one excitation.
  const double rescale = 1.0 / std::sqrt(init_norm);
  for (std::size_t j = 0; j < m; ++j) psi[j] *= rescale;

  auto deriv = [&](const std::vector<cplx>& y, std::vector<cplx>& out) {
    const cplx mi(0.0, -1.0);
    // Mode sums feeding each emitter.
    for (std::size_t i = 0; i < n; ++i) {
      cplx in_sum(0.0, 0.0), out_sum(0.0, 0.0);
      const std::size_t base = (i + 1) * m;
      for (std::size_t j = 0; j < m; ++j) {
        in_sum += y[j];
        out_sum += y[base + j];
      }
      const cplx beta = y[emitter_base + i];
      out[emitter_base + i] =
          mi * (config.channels[i].omega * beta +
                root_dk * (gm_coupling[i] * in_sum + gp_coupling[i] * out_sum));
    }
    cplx input_feedback(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      input_feedback += gm_coupling[i] * y[emitter_base + i];
    for (std::size_t j = 0; j < m; ++j)
      out[j] = mi * (mode_freq[j] * y[j] + root_dk * input_feedback);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t base = (i + 1) * m;
      const cplx feed = root_dk * gp_coupling[i] * y[emitter_base + i];
      for (std::size_t j = 0; j < m; ++j)
        out[base + j] = mi * (mode_freq[j] * y[base + j] + feed);
    }
  };

  auto total_norm = [&]() {
    double s = 0.0;
    for (const auto& v : psi) s += std::norm(v);
    return s;
  };

  std::vector<cplx> tmp(dim), k1(dim), k2(dim), k3(dim), k4(dim);
  for (std::size_t step = 0; step < nsteps; ++step) {
    deriv(psi, k1);
    for (std::size_t j = 0; j < dim; ++j) tmp[j] = psi[j] + 0.5 * dt * k1[j];
    deriv(tmp, k2);
    for (std::size_t j = 0; j < dim; ++j) tmp[j] = psi[j] + 0.5 * dt * k2[j];
    deriv(tmp, k3);
    for (std::size_t j = 0; j < dim; ++j) tmp[j] = psi[j] + dt * k3[j];
    deriv(tmp, k4);
    for (std::size_t j = 0; j < dim; ++j)
      psi[j] += dt / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);

    if ((step + 1) % grid.stride == 0 || step + 1 == nsteps) {
      const double norm = total_norm();
      if (std::abs(norm - 1.0) > kNormTol)
        throw NormDrift("total norm drifted to " + std::to_string(norm));
    }
  }

  double occ = 0.0;
  for (std::size_t i = 0; i < n; ++i) occ += std::norm(psi[emitter_base + i]);
  if (occ > kOccupationTol)
    throw NotConverged("emitter occupation " + std::to_string(occ) +
                       " at t_end; extend the grid");

  RoutingDistribution dist;
  dist.p_back = 0.0;
  for (std::size_t j = 0; j < m; ++j) dist.p_back += std::norm(psi[j]);
  dist.p_out.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t base = (i + 1) * m;
    for (std::size_t j = 0; j < m; ++j) dist.p_out[i] += std::norm(psi[base + j]);
  }
  return dist;
}

}  // namespace router
