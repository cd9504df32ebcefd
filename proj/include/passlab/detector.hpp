#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "passlab/numeric.hpp"
#include "passlab/potential.hpp"
#include "passlab/wavefunction.hpp"

namespace passlab {

/// Rectangular indicator on the left-closed interval [a, b).
struct RectangularProfile {
  double a;
  double b;
  bool operator==(const RectangularProfile&) const = default;
};

/// Sensitivity samples on their own grid; evaluated elsewhere by linear
/// interpolation and taken as zero outside the tabulated range.
struct TabulatedProfile {
  std::vector<double> x;
  std::vector<double> chi;
  bool operator==(const TabulatedProfile&) const = default;
};

/// Sensitivity function chi(x) with 0 <= chi <= 1.
class SensitivityProfile {
 public:
  static SensitivityProfile rectangular(double a, double b);
  static SensitivityProfile tabulated(std::vector<double> x, std::vector<double> chi);

  /// chi sampled on the grid points.
  std::vector<double> sample(const SpatialGrid& grid) const;

  /// True when chi^2 == chi at every point (indicator functions).
  bool is_indicator() const noexcept;

  /// Smallest interval containing the support.
  double support_begin() const noexcept;
  double support_end() const noexcept;

  const std::variant<RectangularProfile, TabulatedProfile>& shape() const noexcept { return shape_; }
  bool operator==(const SensitivityProfile&) const = default;

 private:
  explicit SensitivityProfile(std::variant<RectangularProfile, TabulatedProfile> s) : shape_(std::move(s)) {}
  std::variant<RectangularProfile, TabulatedProfile> shape_;
};

/// N bath modes with omega_n = omega_max n / N and g_n = -i G sqrt(omega_n / N).
struct DiscreteBathSpec {
  std::size_t n_modes;
  double omega_max;   ///< rad/s
  double coupling_G;  ///< s^(-1/2)
  double omega_0;     ///< spin resonance, rad/s

  DiscreteBathSpec(std::size_t n, double omega_max, double coupling, double omega_0);

  double mode_frequency(std::size_t n) const noexcept;  ///< n in [1, N]
  double coupling_sq(std::size_t n) const noexcept;     ///< |g_n|^2 in 1/s
  bool operator==(const DiscreteBathSpec&) const = default;
};

struct ContinuumRates {
  double decay_a = 0.0;           ///< A, 1/s
  double shift = 0.0;             ///< delta_shift, 1/s
  double correlation_time = 0.0;  ///< tau_c ~ 1/omega_0, s
  bool operator==(const ContinuumRates&) const = default;
};

/// Closed-form continuum limit of the N-mode bath. Requires omega_max > omega_0.
ContinuumRates continuum_rates(const DiscreteBathSpec& bath);

enum class KappaMode { discrete, continuum };

/// Bath correlation function kappa(tau) = sum_n |g_n|^2 exp(-i(omega_n - omega_0) tau)
/// or its N -> infinity limit. tau = 0 is handled through the analytic limit.
cplx kappa(const DiscreteBathSpec& bath, double tau, KappaMode mode);

/// A detector: sensitivity profile plus its continuum rates.
struct DetectorSpec {
  SensitivityProfile profile;
  ContinuumRates rates;

  static DetectorSpec from_bath(SensitivityProfile profile, const DiscreteBathSpec& bath);
  static DetectorSpec direct(SensitivityProfile profile, double decay_a, double shift = 0.0);

  /// A chi^2 and delta_shift chi^2 on the grid; the shift is dropped unless requested.
  ComplexPotentialField potential(const SpatialGrid& grid, bool include_shift) const;
  bool operator==(const DetectorSpec&) const = default;
};

/// Squared-norm floor below which a reset state counts as zero overlap.
inline constexpr double kZeroOverlapThreshold = 1e-30;

/// State right after the first detection: sqrt(A) chi(x) psi_cond(x).
/// Its squared norm is A * int chi^2 |psi|^2, i.e. the detection density w1
/// for indicator profiles. Throws ZeroOverlapError when that is below
/// kZeroOverlapThreshold and GridError if the grid does not cover the support.
WaveFunction reset(const WaveFunction& psi_cond, const DetectorSpec& detector);

}  // namespace passlab
