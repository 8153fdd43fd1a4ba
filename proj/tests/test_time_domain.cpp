#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "router/core.hpp"
#include "router/time_domain.hpp"

using namespace router;

namespace {

RouterConfig identical_config(int n, double omega, double gm, double gp) {
  RouterConfig cfg;
  cfg.channels.assign(n, ChannelParams{omega, gm, gp});
  return cfg;
}

}  // namespace

TEST_CASE("time grid guards") {
  CHECK_THROWS_AS(TimeGrid(1e6, 1e-9), ValueError);
  CHECK_THROWS_AS(TimeGrid(-1.0, 0.1), ValueError);
  CHECK_THROWS_AS(TimeGrid(1.0, 0.0), ValueError);
  const TimeGrid grid(10.0, 0.5);
  // dt * max rate above 0.1 violates the stability bound
  CHECK_THROWS_AS(grid.check_stability(identical_config(1, 0, 1, 1), PulseSpec{0, 0.01}),
                  StabilityViolation);
  const TimeGrid fine(10.0, 0.05);
  CHECK_NOTHROW(fine.check_stability(identical_config(1, 0, 1, 1), PulseSpec{0, 0.01}));
}

TEST_CASE("undriven emitters stay empty") {
  const auto cfg = identical_config(2, 0.5, 0.0, 1.0);
  const auto traj = simulate_markov(cfg, PulseSpec{0.0, 0.01}, TimeGrid(50.0, 0.05, 100));
  for (std::size_t row = 0; row < traj.times.size(); ++row) {
    CHECK(traj.emitter_norm(row) == 0.0);
    for (double f : traj.flux_out[row]) CHECK(f == 0.0);
  }
}

TEST_CASE("resonant symmetric channel absorbs the full pulse") {
  const auto cfg = identical_config(1, 0.0, 1.0, 1.0);
  const PulseSpec pulse{0.0, 0.01};
  const auto traj = simulate_markov(cfg, pulse, TimeGrid(2000.0, 0.05, 1000));

  const double flux = traj.final_flux()[0];
  CHECK(std::abs(flux - 1.0) < 0.05);
  // sharper: the spectrally averaged transfer equals 1/(1+epsilon)
  CHECK(flux == doctest::Approx(1.0 / 1.01).epsilon(1e-3));

  // emitter occupation never exceeds 1 and has emptied by t_end
  for (std::size_t row = 0; row < traj.times.size(); ++row)
    CHECK(traj.emitter_norm(row) <= 1.0 + 1e-6);
  CHECK(traj.emitter_norm(traj.times.size() - 1) <= 1e-6);

  const auto dist = longtime_distribution(traj, cfg);
  CHECK(std::abs(dist.p_out[0] - 1.0) < 0.05);
  CHECK(dist.p_back < 0.05);
}

TEST_CASE("halving the spectral width halves the deviation") {
  const auto cfg = identical_config(1, 0.0, 1.0, 1.0);
  auto deviation = [&](double eps) {
    const auto traj =
        simulate_markov(cfg, PulseSpec{0.0, eps}, TimeGrid(6.0 / eps, 0.05, 4000));
    return std::abs(traj.final_flux()[0] - 1.0);
  };
  const double coarse = deviation(0.02);
  const double fine = deviation(0.01);
  const double ratio = fine / coarse;
  CHECK(ratio > 0.3);
  CHECK(ratio < 0.7);
}

TEST_CASE("long-time distribution for the half-half splitter") {
  const auto cfg = identical_config(2, 0.0, 1.0, 2.0);
  const PulseSpec pulse{0.0, 0.005};
  const auto traj = simulate_markov(cfg, pulse, TimeGrid(1400.0, 0.04, 2000));
  const auto dist = longtime_distribution(traj, cfg);
  CHECK(std::abs(dist.p_out[0] - 0.5) < 0.03);
  CHECK(std::abs(dist.p_out[1] - 0.5) < 0.03);
  CHECK(dist.p_back < 0.03);
}

TEST_CASE("early truncation is reported") {
  const auto cfg = identical_config(1, 0.0, 1.0, 1.0);
  const auto traj =
      simulate_markov(cfg, PulseSpec{0.0, 0.01}, TimeGrid(5.0, 0.05));
  CHECK_THROWS_AS(longtime_distribution(traj, cfg), NotConverged);
}

TEST_CASE("mode discretization guards") {
  CHECK_THROWS_AS(ModeDiscretization(2, 10.0), ValueError);
  CHECK_THROWS_AS(ModeDiscretization(4, 10.0), ValueError);
  CHECK_THROWS_AS(ModeDiscretization(5, -1.0), ValueError);
  // bandwidth must exceed 10x the fastest rate
  CHECK_THROWS_AS(simulate_full_hamiltonian(identical_config(1, 0, 1, 1),
                                            PulseSpec{0.0, 0.05},
                                            ModeDiscretization(11, 5.0),
                                            TimeGrid(1.0, 0.01)),
                  ValueError);
}

TEST_CASE("free mode evolution only rotates phases") {
  const auto cfg = identical_config(1, 0.0, 0.0, 0.0);
  const PulseSpec pulse{0.0, 0.05};
  const ModeDiscretization disc(41, 20.0);
  const auto dist =
      simulate_full_hamiltonian(cfg, pulse, disc, TimeGrid(5.0, 0.0005, 1000));
  // nothing couples, so the populations stay in the input guide
  CHECK(std::abs(dist.p_back - 1.0) < 1e-9);
  CHECK(dist.p_out[0] < 1e-12);
}

TEST_CASE("discretized dynamics reproduce the closed-form routing") {
  SUBCASE("single resonant symmetric channel") {
    const auto cfg = identical_config(1, 0.0, 1.0, 1.0);
    const PulseSpec pulse{0.0, 0.05};
    // 801 modes over bandwidth 40: the recurrence sits at 2 pi / dk = 125.7,
    // so integrate to t = 122, after the emitters have emptied
    const ModeDiscretization disc(801, 40.0);
    const auto dist =
        simulate_full_hamiltonian(cfg, pulse, disc, TimeGrid(122.0, 0.002, 5000));
    CHECK(std::abs(dist.p_out[0] - 1.0) < 0.05);
    CHECK(dist.p_back < 0.05);
  }
  SUBCASE("three identical channels split into quarters") {
    const auto cfg = identical_config(3, 0.0, 1.0, 1.0);
    const PulseSpec pulse{0.0, 0.05};
    const ModeDiscretization disc(401, 20.0);
    const auto dist =
        simulate_full_hamiltonian(cfg, pulse, disc, TimeGrid(122.0, 0.002, 5000));
    for (double p : dist.p_out) {
      CHECK(std::abs(p - dist.p_out[0]) < 1e-6);
      CHECK(std::abs(p - 0.25) < 0.05);
    }
    CHECK(std::abs(dist.p_back - 0.25) < 0.05);
  }
}

TEST_CASE("a coarse step trips the norm guard") {
  const auto cfg = identical_config(1, 0.0, 1.0, 1.0);
  const PulseSpec pulse{0.0, 0.05};
  const ModeDiscretization disc(401, 20.0);
  CHECK_THROWS_AS(
      simulate_full_hamiltonian(cfg, pulse, disc, TimeGrid(50.0, 0.1, 50)),
      NormDrift);
}

TEST_CASE("truncating the hamiltonian run is reported") {
  const auto cfg = identical_config(1, 0.0, 1.0, 1.0);
  const PulseSpec pulse{0.0, 0.05};
  const ModeDiscretization disc(401, 20.0);
  CHECK_THROWS_AS(
      simulate_full_hamiltonian(cfg, pulse, disc, TimeGrid(10.0, 0.002, 5000)),
      NotConverged);
}

TEST_CASE("state dimension budget") {
  const auto cfg = identical_config(1, 0.0, 1.0, 1.0);
  CHECK_THROWS_AS(simulate_full_hamiltonian(cfg, PulseSpec{0.0, 0.05},
                                            ModeDiscretization(800001, 40.0),
                                            TimeGrid(1.0, 0.001)),
                  ValueError);
}
