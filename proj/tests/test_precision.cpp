#include <cmath>

#include "doctest.h"
#include "passlab/errors.hpp"
#include "passlab/precision.hpp"

using namespace passlab;

namespace {

const ParticleSpec kCs = ParticleSpec::cesium();
constexpr double kD = 100e-6;
constexpr double kV0 = 7.17e-3;

double round3(double x) {
  const double e = std::floor(std::log10(std::abs(x))) - 2.0;
  return std::round(x / std::pow(10.0, e)) * std::pow(10.0, e);
}

}  // namespace

TEST_CASE("optimal plan for the cesium example") {
  const auto p = optimal_plan(kD, kCs, kV0);
  CHECK(p.delta_x_opt == doctest::Approx(1.8254593964011879e-06).epsilon(1e-12));
  CHECK(p.a_opt == doctest::Approx(1963.889203489088).epsilon(1e-12));
  CHECK(p.energy == doctest::Approx(5.6727150705e-30).epsilon(1e-10));
  CHECK(p.delta_tau_opt == doctest::Approx(1.1385917156258832e-3).epsilon(1e-12));
  CHECK(p.detection_length_L == doctest::Approx(2.0 * p.delta_x_opt));
  CHECK(round3(p.delta_x_opt) == doctest::Approx(1.83e-6));
  CHECK(round3(p.a_opt) == doctest::Approx(round3(1.959e3)));
  CHECK(round3(optimal_rate(1e-6, kV0)) == doctest::Approx(3.59e3));
  CHECK(optimal_rate(1e-6, kV0) == doctest::Approx(3.585e3));
  // Matches the closed form sqrt(m / 2 hbar d) v0^(3/2).
  CHECK(p.a_opt == doctest::Approx(std::sqrt(kCs.mass / (2.0 * kCs.hbar * kD)) * std::pow(kV0, 1.5)));
}

TEST_CASE("width budget balance at the optimum") {
  const auto p = optimal_plan(kD, kCs, kV0);
  const auto b = width_estimate(p.delta_x_opt, p.a_opt, kD, kCs, kV0);
  CHECK(b.reset_x_term == doctest::Approx(b.reset_p_term).epsilon(1e-14));
  CHECK(b.total == doctest::Approx(b.delay_term + b.reset_x_term + b.reset_p_term));
  CHECK(b.delay_term == doctest::Approx(2.0 / p.a_opt));
  CHECK(b.total == doctest::Approx(6.0 * p.delta_x_opt / kV0).epsilon(1e-12));
  // sqrt(5) prefactor: quadrature sum of 2/A and the reset part.
  CHECK(p.delta_tau_opt == doctest::Approx(std::hypot(b.delay_term, b.reset_x_term + b.reset_p_term)).epsilon(1e-12));
}

TEST_CASE("width estimate minimum sits at the optimal reset width") {
  const auto p = optimal_plan(kD, kCs, kV0);
  const double step = 1e-9;
  double best = 1e300, arg = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    const double dx = i * step;
    const double t = width_estimate(dx, 2e3, kD, kCs, kV0).total;
    if (t < best) {
      best = t;
      arg = dx;
    }
  }
  CHECK(std::abs(arg - p.delta_x_opt) <= step);
}

TEST_CASE("width estimate limits") {
  const auto fast = width_estimate(1e-9, 1e9, kD, kCs, kV0);
  CHECK(fast.reset_p_term > 100.0 * (fast.delay_term + fast.reset_x_term));
  const auto slow = width_estimate(1.8e-6, 1.0, kD, kCs, kV0);
  CHECK(slow.delay_term > 100.0 * (slow.reset_x_term + slow.reset_p_term));
  CHECK_THROWS_AS(width_estimate(0.0, 1.0, kD, kCs, kV0), InvalidArgument);
  CHECK_THROWS_AS(width_estimate(1e-6, -1.0, kD, kCs, kV0), InvalidArgument);
}

TEST_CASE("closed-form scaling in distance and energy") {
  const auto a = optimal_plan(kD, kCs, kV0);
  const auto b = optimal_plan(4.0 * kD, kCs, kV0);
  CHECK(b.delta_tau_opt / a.delta_tau_opt == doctest::Approx(2.0).epsilon(1e-12));
  const auto c = optimal_plan(kD, kCs, 2.0 * kV0);
  CHECK(c.energy / a.energy == doctest::Approx(4.0));
  CHECK(std::log(c.delta_tau_opt / a.delta_tau_opt) / std::log(c.energy / a.energy) ==
        doctest::Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("sweep configuration follows the optimal plan") {
  ExperimentConfig base;
  base.absorber = BoundaryAbsorber{10e-6, 1e5};
  for (double v0 : {3e-3, 7.17e-3, 30e-3}) {
    const auto cfg = sweep_config(base, v0);
    const auto plan = optimal_plan(100e-6, kCs, v0);
    CHECK(cfg.distance() == doctest::Approx(100e-6).epsilon(1e-12));
    CHECK(cfg.packet.sigma_x == doctest::Approx(plan.delta_x_opt));
    CHECK(cfg.detector1.rates.decay_a == doctest::Approx(plan.a_opt));
    const double len = cfg.detector1.profile.support_end() - cfg.detector1.profile.support_begin();
    CHECK(len >= 4.0 * plan.detection_length_L * (1.0 - 1e-12));
    CHECK(len < 4.0 * plan.detection_length_L + 1.01 * cfg.grid.dx());
    // Edges on grid points.
    for (double e : {cfg.detector1.profile.support_begin(), cfg.detector2.profile.support_begin(),
                     cfg.detector2.profile.support_end()}) {
      const double s = (e - cfg.grid.x_min()) / cfg.grid.dx();
      CHECK(std::abs(s - std::round(s)) < 1e-6);
    }
    const double k0 = kCs.mass * v0 / kCs.hbar;
    CHECK(cfg.grid.k_max() / k0 >= 8.0);
    CHECK_NOTHROW(validate(cfg));
    CHECK_NOTHROW(gaussian_free_state(cfg.packet, kCs, auto_start_time(cfg.packet, kCs, 0.0), cfg.grid));
  }
}

TEST_CASE("sweep rejects degenerate input") {
  ExperimentConfig base;
  CHECK_THROWS_AS(scaling_sweep(base, {7e-3}), InvalidArgument);
  CHECK_THROWS_AS(fit_line(std::vector<double>{1.0, 1.0}, std::vector<double>{2.0, 3.0}), InvalidArgument);
  CHECK_THROWS_AS(optimal_plan(0.0, kCs, 1.0), InvalidArgument);
}
