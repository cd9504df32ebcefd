#include "passlab/potential.hpp"

#include <cmath>

#include "passlab/errors.hpp"

namespace passlab {

ComplexPotentialField::ComplexPotentialField(SpatialGrid grid, std::vector<double> real_shift,
                                             std::vector<double> decay_rate)
    : grid_(grid), shift_(std::move(real_shift)), decay_(std::move(decay_rate)) {
  if (shift_.size() != grid_.size() || decay_.size() != grid_.size())
    throw InvalidArgument("potential samples do not match the grid size");
  for (std::size_t i = 0; i < decay_.size(); ++i) {
    if (!std::isfinite(shift_[i]) || !std::isfinite(decay_[i]))
      throw InvalidArgument("potential contains non-finite samples");
    if (decay_[i] < 0.0) throw InvalidArgument("decay rate must be non-negative everywhere");
  }
}

ComplexPotentialField ComplexPotentialField::zero(const SpatialGrid& grid) {
  return {grid, std::vector<double>(grid.size(), 0.0), std::vector<double>(grid.size(), 0.0)};
}

ComplexPotentialField ComplexPotentialField::uniform(const SpatialGrid& grid, double decay_rate, double shift) {
  return {grid, std::vector<double>(grid.size(), shift), std::vector<double>(grid.size(), decay_rate)};
}

ComplexPotentialField ComplexPotentialField::operator+(const ComplexPotentialField& other) const {
  if (!(grid_ == other.grid_)) throw GridMismatch("cannot add potentials on different grids");
  auto s = shift_;
  auto d = decay_;
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] += other.shift_[i];
    d[i] += other.decay_[i];
  }
  return {grid_, std::move(s), std::move(d)};
}

std::vector<std::pair<std::size_t, std::size_t>> ComplexPotentialField::support_ranges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t n = decay_.size();
  std::size_t i = 0;
  while (i < n) {
    if (decay_[i] == 0.0 && shift_[i] == 0.0) {
      ++i;
      continue;
    }
    const std::size_t b = i;
    while (i < n && (decay_[i] != 0.0 || shift_[i] != 0.0)) ++i;
    out.emplace_back(b, i);
  }
  return out;
}

std::vector<double> absorber_rates(const SpatialGrid& grid, const BoundaryAbsorber& absorber) {
  std::vector<double> w(grid.size(), 0.0);
  if (!absorber.enabled()) return w;
  if (2.0 * absorber.width >= grid.length()) throw InvalidArgument("absorber layers cover the whole grid");
  const double left_edge = grid.x_min() + absorber.width;
  const double right_edge = grid.x_max() - absorber.width;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    double depth = 0.0;
    if (x < left_edge) depth = (left_edge - x) / absorber.width;
    else if (x > right_edge) depth = (x - right_edge) / absorber.width;
    w[i] = absorber.strength * depth * depth;
  }
  return w;
}

}  // namespace passlab
