#include "router/spectral.hpp"

#include <cmath>

namespace router {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPivotRel = 1e-14;

// Gaussian elimination with partial pivoting on a dense complex matrix.
// Solves M y = rhs in place.
std::vector<cplx> solve_dense_system(std::vector<std::vector<cplx>> m,
                                     std::vector<cplx> rhs) {
  const std::size_t n = m.size();
  double norm = 0.0;
  for (const auto& row : m) {
    double s = 0.0;
    for (const auto& v : row) s += std::abs(v);
    norm = std::max(norm, s);
  }
  if (norm == 0.0) throw SingularSystem("zero matrix");

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(m[col][col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double a = std::abs(m[r][col]);
      if (a > best) {
        best = a;
        pivot = r;
      }
    }
    if (best < kPivotRel * norm)
      throw SingularSystem("pivot below 1e-14 of matrix norm");
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const cplx factor = m[r][col] / m[col][col];
      if (factor == cplx(0.0, 0.0)) continue;
      for (std::size_t c = col; c < n; ++c) m[r][c] -= factor * m[col][c];
      rhs[r] -= factor * rhs[col];
    }
  }

  std::vector<cplx> y(n);
  for (std::size_t r = n; r-- > 0;) {
    cplx acc = rhs[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= m[r][c] * y[c];
    y[r] = acc / m[r][r];
  }
  return y;
}

std::vector<cplx> diag_entries(const RouterConfig& config, cplx s) {
  std::vector<cplx> a;
  a.reserve(config.size());
  for (const auto& ch : config.channels)
    a.push_back(s + cplx(0.5 * ch.gamma_plus, ch.omega));
  return a;
}

// Shared core of the rank-one reduction; solves (diag(a) + b b^T) y = rhs.
std::vector<cplx> solve_rank_one_system(const std::vector<cplx>& a,
                                        const std::vector<double>& b,
                                        const std::vector<cplx>& rhs) {
  const std::size_t n = a.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    scale = std::max(scale, std::abs(a[i]) + b[i] * b[i]);
  const double threshold = kPivotRel * std::max(scale, 1.0);

  cplx trace(0.0, 0.0);   // sum b_i^2 / a_i
  cplx driven(0.0, 0.0);  // sum b_i rhs_i / a_i
  double trace_mag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(a[i]) < threshold)
      throw SingularSystem("diagonal entry numerically zero");
    const cplx t = b[i] * b[i] / a[i];
    trace += t;
    trace_mag += std::abs(t);
    driven += b[i] * rhs[i] / a[i];
  }
  const cplx denom = 1.0 + trace;
  if (std::abs(denom) < kPivotRel * (1.0 + trace_mag))
    throw SingularSystem("rank-one scalar denominator vanished");

  // t = sum_j b_j y_j from the contracted scalar equation, then each
  // component by back-substitution.
  const cplx t = driven / denom;
  std::vector<cplx> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = (rhs[i] - b[i] * t) / a[i];
  return y;
}

}  // namespace

std::vector<std::vector<cplx>> LaplaceSystem::matrix() const {
  const std::size_t n = size();
  std::vector<std::vector<cplx>> m(n, std::vector<cplx>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m[i][j] = rank_one[i] * rank_one[j] + (i == j ? diag[i] : cplx(0.0, 0.0));
  return m;
}

LaplaceSystem assemble_system(const RouterConfig& config,
                              const PulseSpec& pulse, cplx s) {
  config.validate();
  pulse.validate();
  LaplaceSystem sys;
  sys.s = s;
  sys.diag = diag_entries(config, s);
  sys.rank_one.reserve(config.size());
  sys.drive.reserve(config.size());
  const cplx drive_pole = s + cplx(pulse.epsilon, pulse.varpi);
  const cplx prefactor = 2.0 * kPi * std::sqrt(pulse.epsilon / kPi) / drive_pole;
  for (const auto& ch : config.channels) {
    sys.rank_one.push_back(std::sqrt(0.5 * ch.gamma_minus));
    sys.drive.push_back(prefactor * std::sqrt(ch.gamma_minus / (2.0 * kPi)));
  }
  return sys;
}

std::vector<cplx> solve_dense(const LaplaceSystem& system) {
  std::vector<cplx> rhs(system.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -system.drive[i];
  return solve_dense_system(system.matrix(), rhs);
}

std::vector<cplx> solve_rank_one(const LaplaceSystem& system) {
  std::vector<cplx> rhs(system.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -system.drive[i];
  return solve_rank_one_system(system.diag, system.rank_one, rhs);
}

std::vector<cplx> beta_closed_form(const RouterConfig& config,
                                   const PulseSpec& pulse, cplx s) {
  config.validate();
  pulse.validate();
  const std::size_t n = config.size();
  const auto a = diag_entries(config, s);

  // Leave-one-out products over the diagonal entries.
  std::vector<cplx> pre(n + 1, cplx(1.0, 0.0)), suf(n + 1, cplx(1.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) pre[i + 1] = pre[i] * a[i];
  for (std::size_t i = n; i-- > 0;) suf[i] = suf[i + 1] * a[i];

  cplx denom = pre[n];
  for (std::size_t j = 0; j < n; ++j)
    denom += 0.5 * config.channels[j].gamma_minus * pre[j] * suf[j + 1];
  if (denom == cplx(0.0, 0.0))
    throw DegenerateDenominator("emitter-amplitude denominator vanished");

  const cplx prefactor = -2.0 * kPi * std::sqrt(pulse.epsilon / kPi) /
                         (s + cplx(pulse.epsilon, pulse.varpi));
  std::vector<cplx> beta(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double g_minus = std::sqrt(config.channels[i].gamma_minus / (2.0 * kPi));
    beta[i] = prefactor * g_minus * pre[i] * suf[i + 1] / denom;
  }
  return beta;
}

ScatteringAmplitudes transfer_amplitudes(const RouterConfig& config, double k,
                                         SolveMethod method) {
  config.validate();
  const std::size_t n = config.size();
  const auto a = diag_entries(config, cplx(0.0, -k));
  std::vector<double> b(n);
  std::vector<cplx> g_minus(n);
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = std::sqrt(0.5 * config.channels[i].gamma_minus);
    g_minus[i] = std::sqrt(config.channels[i].gamma_minus / (2.0 * kPi));
  }

  std::vector<cplx> x;
  if (method == SolveMethod::Dense) {
    LaplaceSystem sys;
    sys.s = cplx(0.0, -k);
    sys.diag = a;
    sys.rank_one = b;
    sys.drive.assign(n, cplx(0.0, 0.0));
    x = solve_dense_system(sys.matrix(), g_minus);
  } else {
    x = solve_rank_one_system(a, b, g_minus);
  }

  ScatteringAmplitudes out;
  out.k = k;
  out.alpha_out.resize(n);
  cplx absorbed(0.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out.alpha_out[i] =
        -std::sqrt(2.0 * kPi * config.channels[i].gamma_plus) * x[i];
    absorbed += std::sqrt(2.0 * kPi * config.channels[i].gamma_minus) * x[i];
  }
  out.alpha_back = 1.0 - absorbed;
  return out;
}

}  // namespace router
