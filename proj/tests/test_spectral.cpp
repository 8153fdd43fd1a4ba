#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "router/core.hpp"
#include "router/spectral.hpp"

using namespace router;

namespace {

constexpr double kPi = 3.14159265358979323846;

RouterConfig random_config(std::mt19937_64& rng, int n_min, int n_max) {
  std::uniform_int_distribution<int> pick_n(n_min, n_max);
  std::uniform_real_distribution<double> omega(-3.0, 3.0);
  std::uniform_real_distribution<double> gamma(0.1, 4.0);
  RouterConfig cfg;
  const int n = pick_n(rng);
  for (int i = 0; i < n; ++i)
    cfg.channels.push_back(ChannelParams{omega(rng), gamma(rng), gamma(rng)});
  return cfg;
}

cplx random_s(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(0.0, 2.0);
  std::uniform_real_distribution<double> im(-4.0, 4.0);
  return cplx(re(rng), im(rng));
}

double max_amp_dev(const ScatteringAmplitudes& a, const ScatteringAmplitudes& b) {
  double d = std::abs(a.alpha_back - b.alpha_back);
  for (std::size_t i = 0; i < a.alpha_out.size(); ++i)
    d = std::max(d, std::abs(a.alpha_out[i] - b.alpha_out[i]));
  return d;
}

}  // namespace

TEST_CASE("system assembly") {
  SUBCASE("n=1 entries at s=0") {
    RouterConfig cfg;
    cfg.channels = {ChannelParams{0.0, 1.0, 1.0}};
    const auto sys = assemble_system(cfg, PulseSpec{0.0, 1.0}, cplx(0.0, 0.0));
    CHECK(std::abs(sys.diag[0] - cplx(0.5, 0.0)) < 1e-15);
    CHECK(sys.rank_one[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    // drive for epsilon = 1, varpi = 0 at s = 0 collapses to sqrt(2)
    CHECK(std::abs(sys.drive[0] - cplx(std::sqrt(2.0), 0.0)) < 1e-14);
  }
  SUBCASE("a channel without input coupling decouples the matrix") {
    RouterConfig cfg;
    cfg.channels = {ChannelParams{0.0, 1.0, 1.0}, ChannelParams{1.0, 0.0, 2.0}};
    const auto sys = assemble_system(cfg, PulseSpec{0.0, 0.5}, cplx(0.1, 0.2));
    CHECK(sys.rank_one[1] == 0.0);
    const auto m = sys.matrix();
    CHECK(m[0][1] == cplx(0.0, 0.0));
    CHECK(m[1][0] == cplx(0.0, 0.0));
  }
  SUBCASE("matrix equals diagonal plus outer product entrywise") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      const auto cfg = random_config(rng, 1, 8);
      const auto sys = assemble_system(cfg, PulseSpec{0.3, 0.05}, random_s(rng));
      const auto m = sys.matrix();
      for (std::size_t i = 0; i < sys.size(); ++i)
        for (std::size_t j = 0; j < sys.size(); ++j) {
          const cplx expected = sys.rank_one[i] * sys.rank_one[j] +
                                (i == j ? sys.diag[i] : cplx(0.0, 0.0));
          CHECK(std::abs(m[i][j] - expected) == 0.0);
        }
    }
  }
}

TEST_CASE("dense solve") {
  SUBCASE("n=1 closed form") {
    RouterConfig cfg;
    cfg.channels = {ChannelParams{0.0, 1.0, 1.0}};
    const auto sys = assemble_system(cfg, PulseSpec{0.0, 1.0}, cplx(0.0, 0.0));
    const auto beta = solve_dense(sys);
    const cplx expected = -sys.drive[0] / (sys.diag[0] + 0.5);
    CHECK(std::abs(beta[0] - expected) < 1e-14);
  }
  SUBCASE("random n=8 residual") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      const auto cfg = random_config(rng, 8, 8);
      const auto sys = assemble_system(cfg, PulseSpec{0.1, 0.2}, random_s(rng));
      const auto beta = solve_dense(sys);
      const auto m = sys.matrix();
      double residual = 0.0, rhs_norm = 0.0;
      for (std::size_t i = 0; i < sys.size(); ++i) {
        cplx acc = sys.drive[i];
        for (std::size_t j = 0; j < sys.size(); ++j) acc += m[i][j] * beta[j];
        residual += std::norm(acc);
        rhs_norm += std::norm(sys.drive[i]);
      }
      CHECK(std::sqrt(residual) <= 1e-12 * std::sqrt(rhs_norm));
    }
  }
  SUBCASE("no input coupling reduces to the diagonal system") {
    RouterConfig cfg;
    cfg.channels = {ChannelParams{0.5, 0.0, 1.0}, ChannelParams{-0.5, 0.0, 2.0}};
    const auto sys = assemble_system(cfg, PulseSpec{0.0, 0.1}, cplx(0.2, 0.0));
    const auto beta = solve_dense(sys);
    for (std::size_t i = 0; i < sys.size(); ++i)
      CHECK(std::abs(beta[i] - (-sys.drive[i] / sys.diag[i])) < 1e-14);
  }
  SUBCASE("singular matrix throws") {
    LaplaceSystem sys;
    sys.s = cplx(0.0, 0.0);
    sys.diag = {cplx(1.0, 0.0), cplx(1e-20, 0.0)};
    sys.rank_one = {0.0, 0.0};
    sys.drive = {cplx(1.0, 0.0), cplx(1.0, 0.0)};
    CHECK_THROWS_AS(solve_dense(sys), SingularSystem);
  }
}

TEST_CASE("rank-one solve matches dense") {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto cfg = random_config(rng, 1, 32);
    const auto sys = assemble_system(cfg, PulseSpec{0.2, 0.1}, random_s(rng));
    const auto dense = solve_dense(sys);
    const auto fast = solve_rank_one(sys);
    for (std::size_t i = 0; i < sys.size(); ++i)
      worst = std::max(worst, std::abs(dense[i] - fast[i]));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("rank-one solve rejects a vanishing diagonal") {
  LaplaceSystem sys;
  sys.s = cplx(0.0, 0.0);
  sys.diag = {cplx(0.0, 0.0)};
  sys.rank_one = {std::sqrt(0.5)};
  sys.drive = {cplx(1.0, 0.0)};
  CHECK_THROWS_AS(solve_rank_one(sys), SingularSystem);
}

TEST_CASE("closed-form emitter amplitudes") {
  SUBCASE("match the dense solve on random devices") {
    std::mt19937_64 rng(23);
    double worst = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
      const auto cfg = random_config(rng, 1, 12);
      const PulseSpec pulse{0.15, 0.3};
      const cplx s = random_s(rng);
      const auto direct = beta_closed_form(cfg, pulse, s);
      const auto dense = solve_dense(assemble_system(cfg, pulse, s));
      for (std::size_t i = 0; i < direct.size(); ++i)
        worst = std::max(worst, std::abs(direct[i] - dense[i]));
    }
    CHECK(worst < 1e-10);
  }
  SUBCASE("no input coupling means no excitation") {
    RouterConfig cfg;
    cfg.channels = {ChannelParams{0.3, 0.0, 1.0}, ChannelParams{-0.2, 0.0, 0.5}};
    const auto beta = beta_closed_form(cfg, PulseSpec{0.0, 0.1}, cplx(0.1, 0.4));
    for (const auto& b : beta) CHECK(b == cplx(0.0, 0.0));
  }
  SUBCASE("overdamped emitter empties") {
    RouterConfig cfg;
    cfg.channels = {ChannelParams{0.0, 1.0, 1e8}};
    const auto beta = beta_closed_form(cfg, PulseSpec{0.0, 0.01}, cplx(0.0, -0.3));
    CHECK(std::abs(beta[0]) < 1e-4);
  }
}

TEST_CASE("transfer amplitudes") {
  SUBCASE("n=1 resonant symmetric routes completely") {
    RouterConfig cfg;
    cfg.channels = {ChannelParams{0.0, 1.0, 1.0}};
    const auto amps = transfer_amplitudes(cfg, 0.0);
    CHECK(std::abs(amps.alpha_back) < 1e-14);
    CHECK(std::abs(amps.alpha_out[0] - cplx(-1.0, 0.0)) < 1e-14);
  }
  SUBCASE("decoupled channel carries nothing") {
    RouterConfig cfg;
    cfg.channels = {ChannelParams{0.0, 1.0, 1.0}, ChannelParams{0.4, 0.0, 2.0}};
    const auto amps = transfer_amplitudes(cfg, 0.3);
    CHECK(amps.alpha_out[1] == cplx(0.0, 0.0));
  }
  SUBCASE("agrees with the closed form over random devices") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> k_dist(-3.0, 3.0);
    double worst_dense = 0.0, worst_fast = 0.0, worst_flux = 0.0;
    for (int trial = 0; trial < 2000; ++trial) {
      const auto cfg = random_config(rng, 1, 16);
      const double k = k_dist(rng);
      const auto closed = eval_amplitudes(cfg, k);
      const auto dense = transfer_amplitudes(cfg, k, SolveMethod::Dense);
      const auto fast = transfer_amplitudes(cfg, k, SolveMethod::RankOne);
      worst_dense = std::max(worst_dense, max_amp_dev(closed, dense));
      worst_fast = std::max(worst_fast, max_amp_dev(closed, fast));
      worst_flux =
          std::max(worst_flux, std::abs(dense.conservation_sum() - 1.0));
    }
    CHECK(worst_dense < 1e-10);
    CHECK(worst_fast < 1e-10);
    CHECK(worst_flux < 1e-9);
  }
  SUBCASE("invariant under common rescaling of rates, detunings and k") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> k_dist(-3.0, 3.0);
    for (const double lambda : {0.1, 3.7, 42.0}) {
      for (int trial = 0; trial < 200; ++trial) {
        const auto cfg = random_config(rng, 1, 8);
        const double k = k_dist(rng);
        RouterConfig scaled = cfg;
        for (auto& ch : scaled.channels) {
          ch.omega *= lambda;
          ch.gamma_minus *= lambda;
          ch.gamma_plus *= lambda;
        }
        const auto base = transfer_amplitudes(cfg, k);
        const auto rescaled = transfer_amplitudes(scaled, lambda * k);
        CHECK(max_amp_dev(base, rescaled) < 1e-12);
      }
    }
  }
}

TEST_CASE("drive normalization is consistent with the wavepacket") {
  // |c_i|^2 at s = -ik must equal 2 pi gamma_minus |alpha_k(0)|^2, which
  // ties the Laplace drive to the stored spectral amplitude.
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> k_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> eps_dist(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    RouterConfig cfg;
    cfg.channels = {ChannelParams{0.0, 1.7, 0.4}};
    const PulseSpec pulse{k_dist(rng), eps_dist(rng)};
    const double k = k_dist(rng);
    const auto sys = assemble_system(cfg, pulse, cplx(0.0, -k));
    const double expected =
        2.0 * kPi * 1.7 * std::norm(pulse.spectral_amplitude(k));
    CHECK(std::norm(sys.drive[0]) == doctest::Approx(expected).epsilon(1e-10));
  }
}
