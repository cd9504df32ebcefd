#pragma once

#include <cstddef>
#include <vector>

namespace passlab {

/// Uniform periodic 1D grid with its discrete Fourier dual.
///
/// Sample i sits at x_min + i*dx for i in [0, n); x_max itself is the periodic
/// image of x_min. The momentum grid uses FFT ordering (non-negative wave
/// numbers first).
class SpatialGrid {
 public:
  /// Throws GridError unless x_max > x_min, both finite, and n a power of two >= 2.
  SpatialGrid(double x_min, double x_max, std::size_t n_points);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_; }
  double dx() const noexcept { return dx_; }
  double length() const noexcept { return x_max_ - x_min_; }
  double dk() const noexcept;
  double k_max() const noexcept;  ///< Nyquist wave number pi/dx.

  double x(std::size_t i) const noexcept { return x_min_ + static_cast<double>(i) * dx_; }
  double k(std::size_t j) const noexcept;

  std::vector<double> positions() const;
  std::vector<double> wave_numbers() const;

  /// Index of the first sample with x_i >= x (within a small fraction of dx).
  std::size_t lower_index(double x) const noexcept;

  bool operator==(const SpatialGrid& other) const noexcept {
    return x_min_ == other.x_min_ && x_max_ == other.x_max_ && n_ == other.n_;
  }

 private:
  double x_min_;
  double x_max_;
  std::size_t n_;
  double dx_;
};

inline SpatialGrid build_grid(double x_min, double x_max, std::size_t n_points) {
  return SpatialGrid(x_min, x_max, n_points);
}

}  // namespace passlab
