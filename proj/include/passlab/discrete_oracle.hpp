#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "passlab/detector.hpp"
#include "passlab/gaussian.hpp"

namespace passlab {

/// Inputs of the discrete N-mode reset calculation with chi = Theta(x - edge).
struct DiscreteResetConfig {
  DiscreteBathSpec bath;
  GaussianPacketSpec packet;
  ParticleSpec particle;
  double delta_t;                      ///< s
  std::size_t n_time_samples = 8192;   ///< trapezoid nodes on [0, delta_t]
  double edge = 0.0;                   ///< m
  bool check_convergence = true;       ///< rerun with doubled sampling, require < 1% change
};

struct DensityProfile {
  SpatialGrid grid;
  std::vector<double> values;  ///< 1/m (per unit delta_t for reset densities)
  double normalization = 0.0;  ///< integral of values over the grid
};

/// Throws InvalidArgument when delta_t <= 0 or the fastest mode phase is
/// sampled with fewer than 20 nodes per period.
void validate(const DiscreteResetConfig& cfg);

/// Post-detection particle density of the discrete model,
///   (1/dt) sum_l |g_l int_0^dt dt' e^{i(w_l - w0)t'} <x|U(dt-t') Theta U(t')|psi>|^2.
/// Throws ConvergenceError when doubling the time sampling changes the
/// unit-normalized profile by 1% or more in L1.
DensityProfile discrete_reset_density(const DiscreteResetConfig& cfg, const SpatialGrid& grid);

/// Continuum counterpart A |Theta psi(delta_t)|^2, with the packet freely
/// evolved to delta_t before projection.
DensityProfile continuum_reset_density(const DiscreteResetConfig& cfg, const SpatialGrid& grid);

struct ComparisonMetrics {
  double l1_full = 0.0;
  double l1_masked = 0.0;
  std::pair<double, double> exclusion{0.0, 0.0};
};

/// L1 distance of the two unit-normalized densities, over the whole grid and
/// outside the exclusion window [lo, hi]. Throws ZeroNormError for an input
/// with zero integral and GridMismatch for differing grids.
ComparisonMetrics compare_densities(const DensityProfile& a, const DensityProfile& b,
                                    std::pair<double, double> exclusion);

}  // namespace passlab
