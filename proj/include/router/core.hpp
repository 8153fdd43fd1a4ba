#pragma once

#include <tuple>
#include <utility>

#include "router/types.hpp"

namespace router {

/// delta_j = omega_j - k.
double detuning(const ChannelParams& channel, double k);

/// Long-time scattering amplitudes for an arbitrary device at probe
/// frequency k:
///
///   alpha_out[i] = -sqrt(gm_i gp_i) prod_{j!=i} f_j / D
///   alpha_back   = (prod_j f_j - S) / D
///
/// with f_j = i delta_j + gp_j/2, S = sum_j (gm_j/2) prod_{j'!=j} f_j',
/// and D = prod_j f_j + S. Products are carried in a scaled
/// mantissa/exponent form so large channel counts cannot overflow.
///
/// Throws DegenerateDenominator when |D| = 0 (a fully decoupled resonant
/// configuration).
ScatteringAmplitudes eval_amplitudes(const RouterConfig& config, double k);

/// Single-channel closed form. Returns (alpha_back, alpha_out).
std::pair<cplx, cplx> eval_n1(double delta, double gamma_minus,
                              double gamma_plus);

/// Two-channel closed form. Returns (alpha_back, alpha_1, alpha_2);
/// alpha_2 follows from the 1<->2 symmetry of alpha_1.
std::tuple<cplx, cplx, cplx> eval_n2(double delta1, double delta2, double g1m,
                                     double g1p, double g2m, double g2p);

/// n identical channels. Returns (alpha_back, alpha_each) where
/// alpha_each = -2 sqrt(gm gp) / (2 i delta + gp + n gm) is the common
/// per-channel amplitude.
std::pair<cplx, cplx> eval_identical(int n, double delta, double gamma_minus,
                                     double gamma_plus);

/// n channels of which n-1 share common_params and one (channel m) has
/// m_params. Returns (alpha_back, alpha_m).
std::pair<cplx, cplx> eval_one_special(int n, const ChannelParams& m_params,
                                       const ChannelParams& common_params,
                                       double k);

/// Squares amplitudes into probabilities. No renormalization is applied;
/// throws ConservationViolation if the total deviates from 1 by more
/// than 1e-6 (which signals an evaluator bug or invalid input).
RoutingDistribution routing_distribution(const ScatteringAmplitudes& amps);

/// Ratio max(gp, gm) / min(gp, gm). Returns +infinity when exactly one
/// rate is zero (decoupled limit); throws UndefinedAsymmetry when both
/// are zero.
double coupling_asymmetry(double gamma_plus, double gamma_minus);

/// |numerator of alpha_back| before normalization by D. Zero exactly when
/// the photon is never returned to the input channel at this k.
double reflection_residual(const RouterConfig& config, double k);

}  // namespace router
