#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "passlab/grid.hpp"

namespace passlab {

/// Samples of the complex potential (hbar/2)[delta_shift(x) - i A(x)] on a
/// grid, stored as the two rate fields in 1/s.
class ComplexPotentialField {
 public:
  /// Throws InvalidArgument if lengths disagree with the grid, any sample is
  /// non-finite, or any decay rate is negative.
  ComplexPotentialField(SpatialGrid grid, std::vector<double> real_shift, std::vector<double> decay_rate);

  static ComplexPotentialField zero(const SpatialGrid& grid);
  static ComplexPotentialField uniform(const SpatialGrid& grid, double decay_rate, double shift = 0.0);

  const SpatialGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& real_shift() const noexcept { return shift_; }
  const std::vector<double>& decay_rate() const noexcept { return decay_; }

  /// Pointwise sum of two fields on the same grid.
  ComplexPotentialField operator+(const ComplexPotentialField& other) const;

  /// Maximal runs [begin, end) of indices where the field is nonzero.
  std::vector<std::pair<std::size_t, std::size_t>> support_ranges() const;

 private:
  SpatialGrid grid_;
  std::vector<double> shift_;
  std::vector<double> decay_;
};

/// Absorbing layers at both ends of the periodic domain. Probability removed
/// there is bookkept as boundary loss, never as detection. The rate rises
/// quadratically from zero at the inner edge to `strength` at the boundary.
struct BoundaryAbsorber {
  double width = 0.0;     ///< m, per side
  double strength = 0.0;  ///< 1/s, peak rate at the domain edge

  bool enabled() const noexcept { return width > 0.0 && strength > 0.0; }
  bool operator==(const BoundaryAbsorber&) const = default;
};

/// Absorber rate samples on `grid` (zero in the interior).
std::vector<double> absorber_rates(const SpatialGrid& grid, const BoundaryAbsorber& absorber);

}  // namespace passlab
