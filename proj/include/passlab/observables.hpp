#pragma once

#include <vector>

#include "passlab/wavefunction.hpp"

namespace passlab {

struct Moments {
  double norm_sq = 0.0;
  double mean_x = 0.0;
  double std_x = 0.0;
  double mean_p = 0.0;
  double std_p = 0.0;
};

/// Position moments by quadrature and momentum moments over the discrete
/// Fourier dual. Throws ZeroNormError for a state with vanishing norm.
Moments observables(const WaveFunction& psi);

/// Momentum-space density |phi(k)|^2 (per unit k, integrating to the squared
/// norm) on the grid's wave numbers, reordered to increasing k.
struct MomentumDensity {
  std::vector<double> k;
  std::vector<double> density;
};
MomentumDensity momentum_density(const WaveFunction& psi);

/// Squared norm computed in momentum space (Parseval partner of norm_sq).
double momentum_norm_sq(const WaveFunction& psi);

}  // namespace passlab
