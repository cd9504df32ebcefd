#pragma once

#include <span>
#include <vector>

#include "passlab/grid.hpp"
#include "passlab/numeric.hpp"

namespace passlab {

/// Particle properties. hbar is stored alongside the mass so that every
/// consumer uses the same constant.
struct ParticleSpec {
  double mass;
  double hbar;

  /// Throws InvalidArgument unless mass > 0 and hbar > 0.
  ParticleSpec(double mass_kg, double hbar_js);
  static ParticleSpec cesium();

  bool operator==(const ParticleSpec&) const = default;
};

/// Tolerance on the squared norm above one.
inline constexpr double kNormTolerance = 1e-9;

/// Complex amplitudes on a spatial grid at a given time. The norm is not
/// forced to one: conditional states lose norm as detection proceeds.
class WaveFunction {
 public:
  WaveFunction(SpatialGrid grid, std::vector<cplx> amplitudes, double time);

  const SpatialGrid& grid() const noexcept { return grid_; }
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }

  std::span<const cplx> amplitudes() const noexcept { return psi_; }
  std::span<cplx> amplitudes() noexcept { return psi_; }
  std::vector<cplx>& data() noexcept { return psi_; }

  /// Sum |psi_i|^2 dx.
  double norm_sq() const;

  /// Throws InstabilityError if any amplitude is NaN/Inf and InvalidArgument
  /// if the squared norm exceeds max_norm_sq * (1 + kNormTolerance).
  /// Unnormalized states (reset states) pass their own bound.
  void validate(double max_norm_sq = 1.0) const;

  /// L2 distance sqrt(sum |a-b|^2 dx). Grids must match.
  friend double l2_distance(const WaveFunction& a, const WaveFunction& b);

 private:
  SpatialGrid grid_;
  std::vector<cplx> psi_;
  double time_;
};

}  // namespace passlab
