#include "passlab/wavefunction.hpp"

#include <cmath>
#include <string>

#include "passlab/constants.hpp"
#include "passlab/errors.hpp"

namespace passlab {

ParticleSpec::ParticleSpec(double mass_kg, double hbar_js) : mass(mass_kg), hbar(hbar_js) {
  if (!(mass_kg > 0.0) || !std::isfinite(mass_kg)) throw InvalidArgument("particle mass must be positive");
  if (!(hbar_js > 0.0)) throw InvalidArgument("hbar must be positive");
}

ParticleSpec ParticleSpec::cesium() { return ParticleSpec(kCesiumMass, kHbar); }

WaveFunction::WaveFunction(SpatialGrid grid, std::vector<cplx> amplitudes, double time)
    : grid_(grid), psi_(std::move(amplitudes)), time_(time) {
  if (psi_.size() != grid_.size())
    throw GridMismatch("wave function has " + std::to_string(psi_.size()) +
                       " samples on a grid of " + std::to_string(grid_.size()));
}

double WaveFunction::norm_sq() const { return pairwise_norm_sq(psi_) * grid_.dx(); }

void WaveFunction::validate(double max_norm_sq) const {
  for (const auto& z : psi_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw InstabilityError("wave function contains non-finite amplitudes at t=" + std::to_string(time_));
  const double n = norm_sq();
  if (n > max_norm_sq * (1.0 + kNormTolerance))
    throw InvalidArgument("wave function squared norm " + std::to_string(n) + " exceeds its bound");
}

double l2_distance(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch("l2_distance: grids differ");
  std::vector<cplx> d(a.psi_.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.psi_[i] - b.psi_[i];
  return std::sqrt(pairwise_norm_sq(d) * a.grid().dx());
}

}  // namespace passlab
