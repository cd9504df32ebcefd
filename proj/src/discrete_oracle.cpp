#include "passlab/discrete_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "passlab/constants.hpp"
#include "passlab/errors.hpp"
#include "passlab/fft.hpp"

namespace passlab {

namespace {

// Fixed number of partial accumulators, independent of the thread count, so
// the reduction order (and the result) never depends on scheduling.
constexpr std::size_t kChunks = 16;

double fastest_detuning(const DiscreteBathSpec& bath) {
  double m = 0.0;
  for (std::size_t n = 1; n <= bath.n_modes; ++n)
    m = std::max(m, std::abs(bath.mode_frequency(n) - bath.omega_0));
  return m;
}

double unit_l1(const DensityProfile& a, const DensityProfile& b, double lo, double hi, bool masked) {
  const auto& g = a.grid;
  const double na = pairwise_sum(a.values) * g.dx();
  const double nb = pairwise_sum(b.values) * g.dx();
  if (!(na > 0.0) || !(nb > 0.0)) throw ZeroNormError("compare_densities: density with zero integral");
  std::vector<double> d(a.values.size(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double x = g.x(i);
    if (masked && x >= lo && x <= hi) continue;
    d[i] = std::abs(a.values[i] / na - b.values[i] / nb);
  }
  return pairwise_sum(d) * g.dx();
}

DensityProfile make_profile(const SpatialGrid& grid, std::vector<double> v) {
  const double norm = pairwise_sum(v) * grid.dx();
  return DensityProfile{grid, std::move(v), norm};
}

DensityProfile discrete_density_with(const DiscreteResetConfig& cfg, const SpatialGrid& grid,
                                     std::size_t n_nodes) {
  const std::size_t n = grid.size();
  const std::size_t modes = cfg.bath.n_modes;
  const double h = cfg.delta_t / static_cast<double>(n_nodes - 1);
  const double hbar_over_2m = cfg.particle.hbar / (2.0 * cfg.particle.mass);
  const std::size_t edge_index = grid.lower_index(cfg.edge);

  std::vector<double> kinetic_rate(n);  // E_k / hbar
  for (std::size_t j = 0; j < n; ++j) kinetic_rate[j] = hbar_over_2m * grid.k(j) * grid.k(j);
  std::vector<double> detuning(modes);
  for (std::size_t l = 0; l < modes; ++l) detuning[l] = cfg.bath.mode_frequency(l + 1) - cfg.bath.omega_0;

  const std::size_t chunks = std::min(kChunks, n_nodes);
  std::vector<std::vector<cplx>> partial(chunks, std::vector<cplx>(modes * n, cplx(0.0, 0.0)));

#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = c * n_nodes / chunks;
    const std::size_t end = (c + 1) * n_nodes / chunks;
    Fft fft(n);
    std::vector<cplx> buf(n);
    auto& acc = partial[c];
    for (std::size_t q = begin; q < end; ++q) {
      const double t = static_cast<double>(q) * h;
      const double weight = (q == 0 || q + 1 == n_nodes) ? 0.5 * h : h;
      // Theta(x - edge) applied to the freely evolved packet at t.
      for (std::size_t i = 0; i < n; ++i)
        buf[i] = i >= edge_index ? free_gaussian_amplitude(cfg.packet, cfg.particle, grid.x(i), t) : cplx(0.0, 0.0);
      fft.forward(buf);
      // Back-propagate by -t: multiply by exp(+i E_k t / hbar).
      for (std::size_t j = 0; j < n; ++j) buf[j] *= std::polar(1.0, kinetic_rate[j] * t);
      for (std::size_t l = 0; l < modes; ++l) {
        const cplx phase = weight * std::polar(1.0, detuning[l] * t);
        cplx* a = acc.data() + l * n;
        for (std::size_t j = 0; j < n; ++j) a[j] += phase * buf[j];
      }
    }
  }

  std::vector<cplx> field(n);
  std::vector<double> density(n, 0.0);
  Fft fft(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t l = 0; l < modes; ++l) {
    std::fill(field.begin(), field.end(), cplx(0.0, 0.0));
    for (std::size_t c = 0; c < chunks; ++c) {
      const cplx* a = partial[c].data() + l * n;
      for (std::size_t j = 0; j < n; ++j) field[j] += a[j];
    }
    for (std::size_t j = 0; j < n; ++j) field[j] *= std::polar(inv_n, -kinetic_rate[j] * cfg.delta_t);
    fft.backward(field);
    const double g2 = cfg.bath.coupling_sq(l + 1);
    for (std::size_t i = 0; i < n; ++i) density[i] += g2 * std::norm(field[i]);
  }
  for (auto& d : density) d /= cfg.delta_t;
  return make_profile(grid, std::move(density));
}

}  // namespace

void validate(const DiscreteResetConfig& cfg) {
  if (!(cfg.delta_t > 0.0) || !std::isfinite(cfg.delta_t)) throw InvalidArgument("delta_t must be positive");
  if (cfg.n_time_samples < 2) throw InvalidArgument("need at least two time samples");
  const double fastest = fastest_detuning(cfg.bath);
  if (fastest > 0.0) {
    const double per_period =
        static_cast<double>(cfg.n_time_samples - 1) * 2.0 * kPi / (fastest * cfg.delta_t);
    if (per_period < 20.0) {
      std::ostringstream os;
      os << "time quadrature undersampled: " << per_period
         << " samples per period of the fastest mode phase (need >= 20)";
      throw InvalidArgument(os.str());
    }
  }
}

DensityProfile discrete_reset_density(const DiscreteResetConfig& cfg, const SpatialGrid& grid) {
  validate(cfg);
  // Packet resolution at both ends of the interval.
  (void)gaussian_free_state(cfg.packet, cfg.particle, 0.0, grid);
  (void)gaussian_free_state(cfg.packet, cfg.particle, cfg.delta_t, grid);
  auto result = discrete_density_with(cfg, grid, cfg.n_time_samples);
  if (cfg.check_convergence) {
    const auto finer = discrete_density_with(cfg, grid, 2 * cfg.n_time_samples - 1);
    const double change = unit_l1(result, finer, 0.0, 0.0, false);
    if (change >= 1e-2) {
      std::ostringstream os;
      os << "discrete reset density not converged in time sampling: L1 change " << change
         << " on doubling n_time_samples=" << cfg.n_time_samples;
      throw ConvergenceError(os.str());
    }
  }
  return result;
}

DensityProfile continuum_reset_density(const DiscreteResetConfig& cfg, const SpatialGrid& grid) {
  const double a = continuum_rates(cfg.bath).decay_a;
  const auto psi = gaussian_free_state(cfg.packet, cfg.particle, cfg.delta_t, grid);
  const std::size_t edge_index = grid.lower_index(cfg.edge);
  std::vector<double> v(grid.size(), 0.0);
  const auto amp = psi.amplitudes();
  for (std::size_t i = edge_index; i < grid.size(); ++i) v[i] = a * std::norm(amp[i]);
  return make_profile(grid, std::move(v));
}

ComparisonMetrics compare_densities(const DensityProfile& a, const DensityProfile& b,
                                    std::pair<double, double> exclusion) {
  if (!(a.grid == b.grid)) throw GridMismatch("compare_densities: profiles live on different grids");
  ComparisonMetrics m;
  m.exclusion = exclusion;
  m.l1_full = unit_l1(a, b, 0.0, 0.0, false);
  m.l1_masked = unit_l1(a, b, exclusion.first, exclusion.second, true);
  return m;
}

}  // namespace passlab
