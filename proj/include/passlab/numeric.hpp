#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace passlab {

using cplx = std::complex<double>;

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// length of the input, so results are reproducible regardless of how the
/// values were produced.
double pairwise_sum(std::span<const double> values);

/// Sum of |z|^2 with the same fixed reduction tree as pairwise_sum.
double pairwise_norm_sq(std::span<const cplx> values);

/// Trapezoid integral of uniformly spaced samples.
double trapezoid(std::span<const double> y, double h);

/// Trapezoid integral on an arbitrary increasing abscissa.
double trapezoid(std::span<const double> x, std::span<const double> y);

/// Running trapezoid integral; out[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y);

/// Mean and standard deviation of a tabulated density (trapezoid weights).
/// The density need not be normalized; `mass` receives its integral.
struct DensityMoments {
  double mass = 0.0;
  double mean = 0.0;
  double std = 0.0;
};
DensityMoments density_moments(std::span<const double> x, std::span<const double> density);

/// Abscissa at which the running integral reaches `fraction` of the total
/// (linear interpolation inside the bracketing interval).
double quantile(std::span<const double> x, std::span<const double> density, double fraction);

/// Least-squares slope and intercept of y against x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

bool is_power_of_two(std::size_t n);

}  // namespace passlab
