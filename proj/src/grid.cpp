#include "passlab/grid.hpp"

#include <cmath>
#include <string>

#include "passlab/constants.hpp"
#include "passlab/errors.hpp"
#include "passlab/numeric.hpp"

namespace passlab {

SpatialGrid::SpatialGrid(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_(n_points), dx_(0.0) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max))
    throw GridError("grid bounds must be finite");
  if (!(x_max > x_min)) throw GridError("grid requires x_max > x_min");
  if (n_points < 2 || !is_power_of_two(n_points))
    throw GridError("grid size must be a power of two >= 2, got " + std::to_string(n_points));
  dx_ = (x_max - x_min) / static_cast<double>(n_points);
}

double SpatialGrid::dk() const noexcept { return 2.0 * kPi / (static_cast<double>(n_) * dx_); }

double SpatialGrid::k_max() const noexcept { return kPi / dx_; }

double SpatialGrid::k(std::size_t j) const noexcept {
  const auto n = static_cast<long long>(n_);
  auto jj = static_cast<long long>(j);
  if (jj >= n / 2) jj -= n;
  return dk() * static_cast<double>(jj);
}

std::vector<double> SpatialGrid::positions() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
  return out;
}

std::vector<double> SpatialGrid::wave_numbers() const {
  std::vector<double> out(n_);
  for (std::size_t j = 0; j < n_; ++j) out[j] = k(j);
  return out;
}

std::size_t SpatialGrid::lower_index(double xv) const noexcept {
  const double s = (xv - x_min_) / dx_;
  if (s <= 0.0) return 0;
  // Points within 1e-6 dx of x count as >= x, which makes grid-aligned edges inclusive.
  const double c = std::ceil(s - 1e-6);
  if (c >= static_cast<double>(n_)) return n_;
  return static_cast<std::size_t>(c);
}

}  // namespace passlab
