#pragma once

#include "router/types.hpp"

namespace router {

/// The Laplace-domain emitter system. With a = diag entries, b the
/// rank-one coupling vector and c the drive, the emitter amplitudes
/// solve (diag(a) + b b^T) beta = -c.
struct LaplaceSystem {
  cplx s;
  std::vector<cplx> diag;        // a_i = s + i omega_i + gp_i/2
  std::vector<double> rank_one;  // b_i = sqrt(gm_i/2)
  std::vector<cplx> drive;       // c_i

  std::size_t size() const { return diag.size(); }
  /// Dense M = diag(a) + b b^T, row-major.
  std::vector<std::vector<cplx>> matrix() const;
};

LaplaceSystem assemble_system(const RouterConfig& config,
                              const PulseSpec& pulse, cplx s);

/// General dense solve of M beta = -c with partial pivoting.
/// Throws SingularSystem when a pivot falls below 1e-14 times the matrix
/// infinity norm.
std::vector<cplx> solve_dense(const LaplaceSystem& system);

/// Same solution through the diagonal-plus-rank-one reduction: the scalar
/// sum t = sum_j b_j beta_j is solved first, then back-substituted.
/// O(n) instead of O(n^3). Throws SingularSystem when any |a_i| or the
/// scalar denominator 1 + sum b_i^2/a_i is numerically zero.
std::vector<cplx> solve_rank_one(const LaplaceSystem& system);

/// Direct evaluation of the product/sum closed form for beta_i(s).
std::vector<cplx> beta_closed_form(const RouterConfig& config,
                                   const PulseSpec& pulse, cplx s);

enum class SolveMethod { Dense, RankOne };

/// Long-time transfer coefficients through the linear system evaluated at
/// s = -ik with the drive stripped: x = M^-1 g_minus,
/// alpha_out[i] = -2 pi g_plus_i x_i, alpha_back = 1 - 2 pi sum g_minus_j x_j
/// with g_i = sqrt(gamma_i / 2 pi). Independent route to the same
/// amplitudes as eval_amplitudes.
ScatteringAmplitudes transfer_amplitudes(const RouterConfig& config, double k,
                                         SolveMethod method = SolveMethod::Dense);

}  // namespace router
