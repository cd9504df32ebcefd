#include "passlab/numeric.hpp"

#include <algorithm>
#include <cmath>

#include "passlab/errors.hpp"

namespace passlab {

namespace {

constexpr std::size_t kPairwiseBlock = 32;

template <class F>
double pairwise(std::size_t lo, std::size_t hi, const F& term) {
  if (hi - lo <= kPairwiseBlock) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise(lo, mid, term) + pairwise(mid, hi, term);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise(0, values.size(), [&](std::size_t i) { return values[i]; });
}

double pairwise_norm_sq(std::span<const cplx> values) {
  return pairwise(0, values.size(), [&](std::size_t i) { return std::norm(values[i]); });
}

double trapezoid(std::span<const double> y, double h) {
  if (y.size() < 2) return 0.0;
  const double interior = pairwise(1, y.size() - 1, [&](std::size_t i) { return y[i]; });
  return h * (interior + 0.5 * (y.front() + y.back()));
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("trapezoid: abscissa and ordinate differ in length");
  if (y.size() < 2) return 0.0;
  return pairwise(0, y.size() - 1,
                  [&](std::size_t i) { return 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]); });
}

std::vector<double> cumulative_trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("cumulative_trapezoid: length mismatch");
  std::vector<double> out(y.size(), 0.0);
  for (std::size_t i = 1; i < y.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return out;
}

DensityMoments density_moments(std::span<const double> x, std::span<const double> density) {
  if (x.size() != density.size()) throw InvalidArgument("density_moments: length mismatch");
  DensityMoments m;
  m.mass = trapezoid(x, density);
  if (!(m.mass > 0.0)) throw ZeroNormError("density_moments: density integrates to zero");
  std::vector<double> w(density.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = x[i] * density[i];
  m.mean = trapezoid(x, w) / m.mass;
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (x[i] - m.mean) * (x[i] - m.mean) * density[i];
  m.std = std::sqrt(std::max(0.0, trapezoid(x, w) / m.mass));
  return m;
}

double quantile(std::span<const double> x, std::span<const double> density, double fraction) {
  const auto cum = cumulative_trapezoid(x, density);
  const double total = cum.back();
  if (!(total > 0.0)) throw ZeroNormError("quantile: density integrates to zero");
  const double target = std::clamp(fraction, 0.0, 1.0) * total;
  const auto it = std::lower_bound(cum.begin(), cum.end(), target);
  if (it == cum.begin()) return x.front();
  if (it == cum.end()) return x.back();
  const std::size_t i = static_cast<std::size_t>(it - cum.begin());
  const double span = cum[i] - cum[i - 1];
  const double s = span > 0.0 ? (target - cum[i - 1]) / span : 0.0;
  return x[i - 1] + s * (x[i] - x[i - 1]);
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = pairwise_sum(x) / n;
  const double my = pairwise_sum(y) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 1e-300)) throw InvalidArgument("fit_line: degenerate abscissa (all x equal)");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace passlab
