#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <complex>

#include "doctest.h"
#include "router/core.hpp"
#include "router/validate.hpp"

using namespace router;

namespace {

RouterConfig symmetric_n1() {
  RouterConfig cfg;
  cfg.channels = {ChannelParams{0.0, 1.0, 1.0}};
  return cfg;
}

}  // namespace

TEST_CASE("the default suite passes") {
  const auto report =
      run_validation(symmetric_n1(), PulseSpec{0.0, 0.01}, 0.0, 100, 7);
  CHECK(report.pass());
  CHECK(report.analytic_n1_deviation <= 1e-12);
  CHECK(report.max_dev_dense <= 1e-10);
  CHECK(report.max_dev_rank_one <= 1e-10);
  CHECK(report.time_domain_deviation <= 0.05);
}

TEST_CASE("a corrupted evaluator is caught and named") {
  // Perturb one output amplitude; the cross-check must fail and point at
  // a specific comparison.
  const AmplitudeEvaluator corrupted = [](const RouterConfig& cfg, double k) {
    auto amps = eval_amplitudes(cfg, k);
    amps.alpha_out[0] += cplx(1e-4, 0.0);
    return amps;
  };
  const auto report = run_validation(symmetric_n1(), PulseSpec{0.0, 0.01}, 0.0,
                                     20, 7, corrupted);
  CHECK(!report.pass());
  CHECK(!report.spectral_pass());
  CHECK(report.worst.deviation >= 1e-5);
  const bool named = report.worst.route == "dense-vs-closed" ||
                     report.worst.route == "rank-one-vs-closed" ||
                     report.worst.route == "analytic-n1";
  CHECK(named);
}

TEST_CASE("zero trials still exercises the given configuration") {
  const auto report =
      run_validation(symmetric_n1(), PulseSpec{0.0, 0.01}, 0.0, 0, 7);
  CHECK(report.trials == 0);
  CHECK(report.pass());
}
