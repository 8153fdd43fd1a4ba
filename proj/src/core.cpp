#include "router/core.hpp"

#include <cmath>
#include <limits>

namespace router {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Complex value stored as m * 2^e with the mantissa renormalized whenever
// its magnitude leaves [2^-60, 2^60]. Power-of-two rescaling is exact, so
// this carries long products without overflow and without changing the
// rounding of the underlying arithmetic.
struct Scaled {
  cplx m{1.0, 0.0};
  int e = 0;
};

Scaled normalized(cplx m, int e) {
  const double mag = std::abs(m.real()) + std::abs(m.imag());
  if (mag == 0.0) return {cplx(0.0, 0.0), 0};
  int shift = 0;
  std::frexp(mag, &shift);
  if (shift > 60 || shift < -60) {
    m = cplx(std::ldexp(m.real(), -shift), std::ldexp(m.imag(), -shift));
    e += shift;
  }
  return {m, e};
}

bool is_zero(const Scaled& x) { return x.m.real() == 0.0 && x.m.imag() == 0.0; }

Scaled mul(const Scaled& x, const Scaled& y) {
  return normalized(x.m * y.m, x.e + y.e);
}

Scaled mul(const Scaled& x, cplx y) { return normalized(x.m * y, x.e); }

Scaled neg(const Scaled& x) { return {-x.m, x.e}; }

Scaled add(const Scaled& x, const Scaled& y) {
  if (is_zero(x)) return y;
  if (is_zero(y)) return x;
  if (x.e < y.e) return add(y, x);
  const int d = y.e - x.e;
  if (d < -1060) return x;  // addend below double range relative to x
  const cplx shifted(std::ldexp(y.m.real(), d), std::ldexp(y.m.imag(), d));
  return normalized(x.m + shifted, x.e);
}

cplx to_complex(const Scaled& x) {
  return cplx(std::ldexp(x.m.real(), x.e), std::ldexp(x.m.imag(), x.e));
}

cplx ratio(const Scaled& num, const Scaled& den) {
  const cplx r = num.m / den.m;
  const int d = num.e - den.e;
  return cplx(std::ldexp(r.real(), d), std::ldexp(r.imag(), d));
}

// Shared skeleton of the closed form: the full product P, the
// leave-one-out products P_i, and S = sum_j (gm_j/2) P_j.
struct AmplitudeParts {
  Scaled product;               // P
  std::vector<Scaled> leave_one;  // P_i
  Scaled coupling_sum;          // S
};

AmplitudeParts assemble_parts(const RouterConfig& config, double k) {
  const std::size_t n = config.size();
  std::vector<cplx> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ch = config.channels[i];
    f[i] = cplx(0.5 * ch.gamma_plus, detuning(ch, k));
  }

  // Prefix/suffix products make every leave-one-out product O(1).
  std::vector<Scaled> pre(n + 1), suf(n + 1);
  pre[0] = Scaled{};
  for (std::size_t i = 0; i < n; ++i) pre[i + 1] = mul(pre[i], f[i]);
  suf[n] = Scaled{};
  for (std::size_t i = n; i-- > 0;) suf[i] = mul(suf[i + 1], f[i]);

  AmplitudeParts parts;
  parts.product = pre[n];
  parts.leave_one.resize(n);
  parts.coupling_sum = Scaled{cplx(0.0, 0.0), 0};
  for (std::size_t i = 0; i < n; ++i) {
    parts.leave_one[i] = mul(pre[i], suf[i + 1]);
    parts.coupling_sum =
        add(parts.coupling_sum,
            mul(parts.leave_one[i], cplx(0.5 * config.channels[i].gamma_minus, 0.0)));
  }
  return parts;
}

void require_rates(double gamma_minus, double gamma_plus) {
  if (!(gamma_minus >= 0.0) || !std::isfinite(gamma_minus) ||
      !(gamma_plus >= 0.0) || !std::isfinite(gamma_plus)) {
    throw ValueError("decay rates must be finite and nonnegative");
  }
}

}  // namespace

void ChannelParams::validate() const {
  if (!std::isfinite(omega)) throw ValueError("omega must be finite");
  require_rates(gamma_minus, gamma_plus);
}

void RouterConfig::validate() const {
  if (channels.empty()) throw ValueError("a device needs at least one channel");
  for (const auto& ch : channels) ch.validate();
}

bool RouterConfig::fully_decoupled() const {
  for (const auto& ch : channels)
    if (ch.gamma_minus > 0.0) return false;
  return true;
}

void PulseSpec::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw ValueError("epsilon must be positive and finite");
  if (!std::isfinite(varpi)) throw ValueError("varpi must be finite");
}

cplx PulseSpec::spectral_amplitude(double k) const {
  return std::sqrt(epsilon / kPi) / cplx(k - varpi, epsilon);
}

double ScatteringAmplitudes::conservation_sum() const {
  double total = std::norm(alpha_back);
  for (const auto& a : alpha_out) total += std::norm(a);
  return total;
}

double RoutingDistribution::total() const {
  double t = p_back;
  for (double p : p_out) t += p;
  return t;
}

double detuning(const ChannelParams& channel, double k) {
  return channel.omega - k;
}

ScatteringAmplitudes eval_amplitudes(const RouterConfig& config, double k) {
  config.validate();
  const auto parts = assemble_parts(config, k);
  const Scaled denom = add(parts.product, parts.coupling_sum);
  if (is_zero(denom))
    throw DegenerateDenominator(
        "scattering denominator vanished (fully decoupled resonant device)");

  ScatteringAmplitudes out;
  out.k = k;
  out.alpha_back = ratio(add(parts.product, neg(parts.coupling_sum)), denom);
  out.alpha_out.resize(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) {
    const auto& ch = config.channels[i];
    const double root = std::sqrt(ch.gamma_minus * ch.gamma_plus);
    out.alpha_out[i] = -root * ratio(parts.leave_one[i], denom);
  }
  return out;
}

std::pair<cplx, cplx> eval_n1(double delta, double gamma_minus,
                              double gamma_plus) {
  require_rates(gamma_minus, gamma_plus);
  const cplx denom(0.5 * (gamma_plus + gamma_minus), delta);
  if (denom == cplx(0.0, 0.0))
    throw DegenerateDenominator("n=1 denominator vanished");
  const cplx alpha_back = cplx(0.5 * (gamma_plus - gamma_minus), delta) / denom;
  const cplx alpha_out = -std::sqrt(gamma_minus * gamma_plus) / denom;
  return {alpha_back, alpha_out};
}

std::tuple<cplx, cplx, cplx> eval_n2(double delta1, double delta2, double g1m,
                                     double g1p, double g2m, double g2p) {
  require_rates(g1m, g1p);
  require_rates(g2m, g2p);
  const cplx f1(0.5 * g1p, delta1);
  const cplx f2(0.5 * g2p, delta2);
  const cplx denom = (f1 + 0.5 * g1m) * (f2 + 0.5 * g2m) - 0.25 * g1m * g2m;
  if (denom == cplx(0.0, 0.0))
    throw DegenerateDenominator("n=2 denominator vanished");
  const cplx alpha_back =
      ((f1 - 0.5 * g1m) * (f2 - 0.5 * g2m) - 0.25 * g1m * g2m) / denom;
  const cplx alpha_1 = -std::sqrt(g1m * g1p) * f2 / denom;
  const cplx alpha_2 = -std::sqrt(g2m * g2p) * f1 / denom;
  return {alpha_back, alpha_1, alpha_2};
}

std::pair<cplx, cplx> eval_identical(int n, double delta, double gamma_minus,
                                     double gamma_plus) {
  if (n < 1) throw ValueError("channel count must be >= 1");
  require_rates(gamma_minus, gamma_plus);
  const cplx denom(gamma_plus + n * gamma_minus, 2.0 * delta);
  if (denom == cplx(0.0, 0.0))
    throw DegenerateDenominator("identical-channel denominator vanished");
  const cplx alpha_back = cplx(gamma_plus - n * gamma_minus, 2.0 * delta) / denom;
  const cplx alpha_each = -2.0 * std::sqrt(gamma_minus * gamma_plus) / denom;
  return {alpha_back, alpha_each};
}

std::pair<cplx, cplx> eval_one_special(int n, const ChannelParams& m_params,
                                       const ChannelParams& common_params,
                                       double k) {
  if (n < 1) throw ValueError("channel count must be >= 1");
  m_params.validate();
  common_params.validate();
  const cplx fm(0.5 * m_params.gamma_plus, detuning(m_params, k));
  const cplx fc(0.5 * common_params.gamma_plus, detuning(common_params, k));
  const double half_rest = 0.5 * (n - 1) * common_params.gamma_minus;
  const cplx denom =
      fm * (fc + half_rest) + 0.5 * m_params.gamma_minus * fc;
  if (denom == cplx(0.0, 0.0))
    throw DegenerateDenominator("one-special denominator vanished");
  const cplx alpha_back =
      (fm * (fc - half_rest) - 0.5 * m_params.gamma_minus * fc) / denom;
  const cplx alpha_m =
      -std::sqrt(m_params.gamma_minus * m_params.gamma_plus) * fc / denom;
  return {alpha_back, alpha_m};
}

RoutingDistribution routing_distribution(const ScatteringAmplitudes& amps) {
  RoutingDistribution dist;
  dist.p_back = std::norm(amps.alpha_back);
  dist.p_out.reserve(amps.alpha_out.size());
  for (const auto& a : amps.alpha_out) dist.p_out.push_back(std::norm(a));
  const double total = dist.total();
  if (!(std::abs(total - 1.0) <= 1e-6))
    throw ConservationViolation("probabilities sum to " + std::to_string(total) +
                                ", expected 1");
  return dist;
}

double coupling_asymmetry(double gamma_plus, double gamma_minus) {
  require_rates(gamma_minus, gamma_plus);
  if (gamma_plus == 0.0 && gamma_minus == 0.0)
    throw UndefinedAsymmetry("both rates are zero");
  if (gamma_plus == 0.0 || gamma_minus == 0.0)
    return std::numeric_limits<double>::infinity();
  return std::max(gamma_plus, gamma_minus) / std::min(gamma_plus, gamma_minus);
}

double reflection_residual(const RouterConfig& config, double k) {
  config.validate();
  const auto parts = assemble_parts(config, k);
  return std::abs(to_complex(add(parts.product, neg(parts.coupling_sum))));
}

}  // namespace router
