#include <cmath>

#include "doctest.h"
#include "passlab/constants.hpp"
#include "passlab/errors.hpp"
#include "passlab/numeric.hpp"
#include "passlab/passage.hpp"

using namespace passlab;

namespace {

const ParticleSpec kCs = ParticleSpec::cesium();

ExperimentConfig compact(double a) {
  ExperimentConfig cfg;
  cfg.packet = GaussianPacketSpec(0.0, 1e-6, 7.17e-3);
  cfg.detector1 = DetectorSpec::direct(SensitivityProfile::rectangular(0.0, 5e-6), a);
  cfg.detector2 = DetectorSpec::direct(SensitivityProfile::rectangular(20e-6, 25e-6), a);
  cfg.grid = build_grid(-25e-6, 45e-6, 2048);
  cfg.absorber = BoundaryAbsorber{8e-6, 1e5};
  cfg.dt = 1e-7;
  cfg.stage2_dt = 1e-6;
  cfg.n_entry = 64;
  return cfg;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("auto start time puts the leading edge at the detector") {
  const GaussianPacketSpec p(0.0, 1e-6, 7.17e-3);
  const double t = auto_start_time(p, kCs, 0.0);
  CHECK(t < 0.0);
  CHECK(p.center_x0 + p.mean_velocity_v0 * t + 6.0 * free_width(p, kCs, t) == doctest::Approx(0.0).epsilon(1e-12));
  // Closed form for x0 = detector start: t^2 = 36 sigma^2 / (v0^2 - 36 sigma_v^2).
  const double sv = momentum_width(p, kCs) / kCs.mass;
  CHECK(t == doctest::Approx(-6e-6 / std::sqrt(p.mean_velocity_v0 * p.mean_velocity_v0 - 36.0 * sv * sv)));
  CHECK_THROWS_AS(auto_start_time(GaussianPacketSpec(0.0, 1e-6, 5.0 * sv), kCs, 0.0), RegimeError);
}

TEST_CASE("configuration validation") {
  auto cfg = compact(2.3895e4);
  cfg.detector2 = DetectorSpec::direct(SensitivityProfile::rectangular(4e-6, 10e-6), 1e3);
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
  cfg = compact(2.3895e4);
  cfg.detector2 = DetectorSpec::direct(SensitivityProfile::rectangular(30e-6, 60e-6), 1e3);
  CHECK_THROWS_AS(validate(cfg), GridError);
  cfg = compact(2.3895e4);
  CHECK(cfg.distance() == doctest::Approx(20e-6));
  auto none = compact(2.3895e4);
  none.detector1 = DetectorSpec::direct(SensitivityProfile::rectangular(0.0, 5e-6), 0.0);
  CHECK_THROWS_AS(arrival_stage(none), ZeroOverlapError);
}

TEST_CASE("arrival stage: reset norms and entry coverage") {
  const auto cfg = compact(2.3895e4);
  const auto ar = arrival_stage(cfg);
  REQUIRE(ar.reset_states.size() >= 60);
  CHECK(ar.reset_states.size() <= 65);
  CHECK(ar.detected > 0.99);
  CHECK(ar.entry_coverage / ar.detected > 0.998);
  const double h = ar.record.times[1] - ar.record.times[0];
  for (std::size_t k = 0; k < ar.entry_times.size(); ++k) {
    const auto i = static_cast<std::size_t>(std::llround((ar.entry_times[k] - ar.record.times[0]) / h));
    const double w1 = ar.record.density_w1[i];
    CHECK(std::abs(ar.reset_states[k].norm_sq() - w1) <= 1e-10 * w1);
  }
  const auto& r = ar.record;
  for (std::size_t i = 0; i < r.size(); i += 97)
    CHECK(std::abs(r.survival_p0[i] + r.cumulative_detected[i] + r.boundary_absorbed[i] - 1.0) < 1e-5);
}

TEST_CASE("bilinearity: unnormalized reset state equals w1 times the normalized one") {
  const auto cfg = compact(2.3895e4);
  const auto ar = arrival_stage(cfg);
  const auto& raw = ar.reset_states[ar.reset_states.size() / 2];
  WaveFunction unit = raw;
  const double w1 = raw.norm_sq();
  for (auto& z : unit.data()) z /= std::sqrt(w1);
  const auto a = stage_two(cfg, raw);
  const auto b = stage_two(cfg, unit);
  REQUIRE(a.w1.size() == b.w1.size());
  const double scale = max_abs(a.w1);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.w1.size(); ++i) worst = std::max(worst, std::abs(a.w1[i] - w1 * b.w1[i]));
  CHECK(worst / scale < 1e-10);
}

TEST_CASE("per-entry and ensemble methods agree") {
  auto cfg = compact(2.3895e4);
  const auto ar = arrival_stage(cfg);
  cfg.method = PassageMethod::per_entry;
  const auto a = passage_distribution(cfg, ar);
  cfg.method = PassageMethod::ensemble;
  const auto b = passage_distribution(cfg, ar);
  REQUIRE(a.g_tau.size() == b.g_tau.size());
  CHECK(b.propagated_states < a.propagated_states);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.g_tau.size(); ++i) worst = std::max(worst, std::abs(a.g_tau[i] - b.g_tau[i]));
  CHECK(worst / max_abs(a.g_tau) < 1e-6);
  CHECK(a.mean_tau == doctest::Approx(b.mean_tau).epsilon(1e-7));
  CHECK(a.std_tau == doctest::Approx(b.std_tau).epsilon(1e-6));
  CHECK(a.total_probability == doctest::Approx(b.total_probability).epsilon(1e-7));
}

TEST_CASE("passage bookkeeping and positivity") {
  const auto cfg = compact(2.3895e3);
  const auto g = passage_distribution(cfg);
  for (double v : g.g_tau) CHECK(v >= 0.0);
  CHECK(std::abs(g.total_probability + g.leakage.total() - 1.0) < 1e-3);
  CHECK(g.total_probability <= 1.0 + 1e-3);
  CHECK(g.mean_tau == doctest::Approx(20e-6 / 7.17e-3).epsilon(0.1));
}

TEST_CASE("entry-grid convergence") {
  auto cfg = compact(2.3895e3);
  cfg.n_entry = 128;
  const auto a = passage_distribution(cfg);
  cfg.n_entry = 256;
  const auto b = passage_distribution(cfg);
  CHECK(std::abs(a.mean_tau - b.mean_tau) / b.mean_tau < 1e-3);
  CHECK(std::abs(a.std_tau - b.std_tau) / b.std_tau < 1e-3);
}

TEST_CASE("stage-2 step convergence") {
  auto cfg = compact(2.3895e3);
  const auto ar = arrival_stage(cfg);
  cfg.stage2_dt = 2e-6;
  const auto coarse = passage_distribution(cfg, ar);
  cfg.stage2_dt = 5e-7;
  const auto fine = passage_distribution(cfg, ar);
  CHECK(std::abs(coarse.mean_tau - fine.mean_tau) / fine.mean_tau < 1e-3);
  CHECK(std::abs(coarse.std_tau - fine.std_tau) / fine.std_tau < 1e-3);
  CHECK(std::abs(coarse.total_probability - fine.total_probability) < 1e-3);
}

TEST_CASE("passage is bit-reproducible") {
  const auto cfg = compact(2.3895e4);
  const auto a = passage_distribution(cfg);
  const auto b = passage_distribution(cfg);
  CHECK(a.g_tau == b.g_tau);
  CHECK(a.std_tau == b.std_tau);
}

TEST_CASE("explicit tau grid interpolates the stage-2 record") {
  auto cfg = compact(2.3895e4);
  const auto ar = arrival_stage(cfg);
  const auto dense = passage_distribution(cfg, ar);
  cfg.tau_max = dense.tau.back();
  cfg.tau_grid = {0.0, 1e-3, 2.5e-3, dense.tau.back()};
  const auto sparse = passage_distribution(cfg, ar);
  REQUIRE(sparse.tau.size() == 4);
  const double h = dense.tau[1];
  const auto i = static_cast<std::size_t>(std::llround(2.5e-3 / h));
  CHECK(sparse.g_tau[2] == doctest::Approx(dense.g_tau[i]).epsilon(0.05));
}

TEST_CASE("classical passage density") {
  const GaussianPacketSpec p(0.0, 1e-6, 7.17e-3);
  const double d = 100e-6;
  std::vector<double> tau;
  for (int i = 1; i <= 200000; ++i) tau.push_back(i * 1e-7);
  const auto g = classical_passage(p, kCs, d, tau);
  const auto m = density_moments(tau, g);
  CHECK(m.mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(m.mean >= d / 7.17e-3);
  CHECK(m.mean == doctest::Approx(d / 7.17e-3).epsilon(1e-2));

  // Narrow momentum spread concentrates the density at d / v0.
  const GaussianPacketSpec wide(0.0, 1e-4, 7.17e-3);
  const auto narrow = classical_passage(wide, kCs, d, tau);
  const auto mn = density_moments(tau, narrow);
  CHECK(mn.mean == doctest::Approx(d / 7.17e-3).epsilon(1e-5));
  CHECK(mn.std < 1e-3 * mn.mean);

  const GaussianPacketSpec slow(0.0, 1e-6, 1e-4);
  CHECK_THROWS_AS(classical_passage(slow, kCs, d, tau), RegimeError);
}

TEST_CASE("Kijowski distribution") {
  const GaussianPacketSpec p(0.0, 1e-6, 7.17e-3);
  std::vector<double> t;
  for (int i = 0; i <= 4000; ++i) t.push_back(-2e-3 + i * 1e-6);
  const auto k = kijowski_distribution(p, kCs, 0.0, t);
  const auto m = density_moments(t, k);
  CHECK(m.mass == doctest::Approx(1.0).epsilon(1e-4));
  for (double v : k) CHECK(v >= 0.0);
  CHECK(std::abs(m.mean) < 2e-6);

  const GaussianPacketSpec wide(0.0, 20e-6, 7.17e-3);
  std::vector<double> t2;
  for (int i = 0; i <= 4000; ++i) t2.push_back(i * 5e-6);
  const auto k2 = kijowski_distribution(wide, kCs, 50e-6, t2);
  std::size_t pk = 0;
  for (std::size_t i = 0; i < k2.size(); ++i)
    if (k2[i] > k2[pk]) pk = i;
  CHECK(t2[pk] == doctest::Approx(50e-6 / 7.17e-3).epsilon(0.01));
  CHECK_THROWS_AS(kijowski_distribution(GaussianPacketSpec(0.0, 1e-6, 1e-4), kCs, 0.0, t), RegimeError);
}

TEST_CASE("reset snapshot is normalized and narrower than the free packet") {
  auto cfg = compact(2.3895e4);
  const auto s = reset_snapshot(cfg, cfg.detector1, 4.1e-5);
  CHECK(s.reset.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.reset_moments.std_x < s.free_moments.std_x);
  CHECK(s.reset_moments.std_p > s.free_moments.std_p);
  CHECK(s.reset_moments.std_x * s.reset_moments.std_p >= 0.5 * kCs.hbar);
  CHECK(s.w1 > 0.0);
}
