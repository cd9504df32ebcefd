#include <cmath>

#include "doctest.h"
#include "passlab/constants.hpp"
#include "passlab/discrete_oracle.hpp"
#include "passlab/errors.hpp"
#include "passlab/gaussian.hpp"

using namespace passlab;

namespace {

const ParticleSpec kCs = ParticleSpec::cesium();
const GaussianPacketSpec kFig2Packet(0.0, 50e-9, 1.79);
constexpr double kW0 = 2.38e12;

// Free propagation by an explicit O(n^2) DFT, unrelated to the FFT path.
std::vector<cplx> dft_propagate(const SpatialGrid& g, const std::vector<cplx>& in, double t) {
  const std::size_t n = g.size();
  std::vector<cplx> twiddle(n), spec(n), out(n);
  for (std::size_t i = 0; i < n; ++i) twiddle[i] = std::polar(1.0, -2.0 * kPi * double(i) / double(n));
  for (std::size_t j = 0; j < n; ++j) {
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) s += in[i] * twiddle[i * j % n];
    spec[j] = s * std::polar(1.0, -kCs.hbar * g.k(j) * g.k(j) * t / (2.0 * kCs.mass));
  }
  for (std::size_t i = 0; i < n; ++i) {
    cplx s(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) s += spec[j] * std::conj(twiddle[i * j % n]);
    out[i] = s / double(n);
  }
  return out;
}

}  // namespace

TEST_CASE("single resonant mode against a brute-force double integral") {
  const auto g = build_grid(-400e-9, 400e-9, 1024);
  const DiscreteBathSpec bath(1, kW0, 2.782e3, kW0);
  DiscreteResetConfig cfg{bath, kFig2Packet, kCs, 100.0 / kW0, 65, 0.0, false};
  const auto fast = discrete_reset_density(cfg, g);

  // sum over t of U(dt - t) Theta psi(t), each term propagated on its own.
  const std::size_t nodes = cfg.n_time_samples;
  const double h = cfg.delta_t / double(nodes - 1);
  std::vector<cplx> field(g.size(), cplx(0.0, 0.0));
  for (std::size_t q = 0; q < nodes; ++q) {
    const double t = double(q) * h;
    const double w = (q == 0 || q + 1 == nodes) ? 0.5 * h : h;
    std::vector<cplx> theta(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      theta[i] = g.x(i) >= 0.0 ? free_gaussian_amplitude(kFig2Packet, kCs, g.x(i), t) : cplx(0.0, 0.0);
    const auto moved = dft_propagate(g, theta, cfg.delta_t - t);
    for (std::size_t i = 0; i < g.size(); ++i) field[i] += w * moved[i];
  }
  double worst = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double ref = bath.coupling_sq(1) * std::norm(field[i]) / cfg.delta_t;
    worst = std::max(worst, std::abs(ref - fast.values[i]));
    peak = std::max(peak, ref);
  }
  CHECK(worst / peak < 1e-9);
}

TEST_CASE("vanishing delta_t reduces to the projected initial density") {
  const auto g = build_grid(-400e-9, 400e-9, 1024);
  const DiscreteBathSpec bath(15, 4.6 * kW0, 2.782e3, kW0);
  DiscreteResetConfig cfg{bath, kFig2Packet, kCs, 1e-3 / kW0, 65, 0.0, false};
  const auto d = discrete_reset_density(cfg, g);
  const double k0 = kappa(bath, 0.0, KappaMode::discrete).real();
  const auto psi = gaussian_free_state(kFig2Packet, kCs, 0.0, g);
  double worst = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double ref = g.x(i) >= 0.0 ? k0 * cfg.delta_t * std::norm(psi.amplitudes()[i]) : 0.0;
    worst = std::max(worst, std::abs(ref - d.values[i]));
    peak = std::max(peak, ref);
  }
  CHECK(worst / peak < 1e-3);
}

TEST_CASE("compare_densities extremes and errors") {
  const auto g = build_grid(0.0, 1.0, 8);
  DensityProfile a{g, {1, 1, 0, 0, 0, 0, 0, 0}, 0.0};
  DensityProfile b{g, {0, 0, 0, 0, 0, 0, 1, 1}, 0.0};
  CHECK(compare_densities(a, a, {0.0, 0.0}).l1_full == 0.0);
  CHECK(compare_densities(a, b, {0.0, 0.0}).l1_full == doctest::Approx(2.0));
  CHECK(compare_densities(a, b, {0.0, 0.3}).l1_masked == doctest::Approx(1.0));
  DensityProfile z{g, std::vector<double>(8, 0.0), 0.0};
  CHECK_THROWS_AS(compare_densities(a, z, {0.0, 0.0}), ZeroNormError);
  DensityProfile other{build_grid(0.0, 2.0, 8), a.values, 0.0};
  CHECK_THROWS_AS(compare_densities(a, other, {0.0, 0.0}), GridMismatch);
}

TEST_CASE("undersampled time quadrature is rejected") {
  const DiscreteBathSpec bath(15, 4.6 * kW0, 2.782e3, kW0);
  DiscreteResetConfig cfg{bath, kFig2Packet, kCs, 100.0 / kW0, 512, 0.0, true};
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
  cfg.delta_t = -1.0;
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
}

TEST_CASE("discrete density agrees with the continuum reset state away from the edge") {
  const auto g = build_grid(-800e-9, 800e-9, 2048);
  const double dx = 50e-9;
  for (std::size_t n : {5, 15, 60}) {
    const DiscreteBathSpec bath(n, 4.6 * kW0, 2.782e3, kW0);
    DiscreteResetConfig cfg{bath, kFig2Packet, kCs, 100.0 / kW0, 8192, 0.0, n == 15};
    const auto d = discrete_reset_density(cfg, g);
    const auto c = continuum_reset_density(cfg, g);
    const auto m = compare_densities(d, c, {-2 * dx, 2 * dx});
    MESSAGE("N=" << n << " masked L1=" << m.l1_masked << " full L1=" << m.l1_full);
    CHECK(m.l1_masked < 0.05);
    CHECK(m.l1_full < 0.05);
  }
}
