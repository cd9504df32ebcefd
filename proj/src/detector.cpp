#include "passlab/detector.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "passlab/constants.hpp"
#include "passlab/errors.hpp"

namespace passlab {

SensitivityProfile SensitivityProfile::rectangular(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a))
    throw InvalidArgument("rectangular sensitivity profile requires b > a");
  return SensitivityProfile(RectangularProfile{a, b});
}

SensitivityProfile SensitivityProfile::tabulated(std::vector<double> x, std::vector<double> chi) {
  if (x.size() != chi.size() || x.size() < 2) throw InvalidArgument("tabulated profile needs >= 2 matching samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(chi[i] >= 0.0 && chi[i] <= 1.0)) throw InvalidArgument("sensitivity values must lie in [0, 1]");
    if (i > 0 && !(x[i] > x[i - 1])) throw InvalidArgument("tabulated profile abscissa must increase");
  }
  return SensitivityProfile(TabulatedProfile{std::move(x), std::move(chi)});
}

std::vector<double> SensitivityProfile::sample(const SpatialGrid& grid) const {
  std::vector<double> out(grid.size(), 0.0);
  if (const auto* r = std::get_if<RectangularProfile>(&shape_)) {
    const std::size_t lo = grid.lower_index(r->a);
    const std::size_t hi = grid.lower_index(r->b);
    for (std::size_t i = lo; i < hi; ++i) out[i] = 1.0;
    return out;
  }
  const auto& t = std::get<TabulatedProfile>(shape_);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.x(i);
    if (x < t.x.front() || x > t.x.back()) continue;
    const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    if (it == t.x.end()) {
      out[i] = t.chi.back();
      continue;
    }
    const std::size_t j = static_cast<std::size_t>(it - t.x.begin());
    const double s = (x - t.x[j - 1]) / (t.x[j] - t.x[j - 1]);
    out[i] = (1.0 - s) * t.chi[j - 1] + s * t.chi[j];
  }
  return out;
}

bool SensitivityProfile::is_indicator() const noexcept {
  if (std::holds_alternative<RectangularProfile>(shape_)) return true;
  const auto& t = std::get<TabulatedProfile>(shape_);
  // Interpolation between unequal neighbours produces values strictly inside (0, 1).
  const double first = t.chi.front();
  return (first == 0.0 || first == 1.0) &&
         std::all_of(t.chi.begin(), t.chi.end(), [first](double c) { return c == first; });
}

double SensitivityProfile::support_begin() const noexcept {
  if (const auto* r = std::get_if<RectangularProfile>(&shape_)) return r->a;
  const auto& t = std::get<TabulatedProfile>(shape_);
  for (std::size_t i = 0; i < t.chi.size(); ++i)
    if (t.chi[i] > 0.0) return i == 0 ? t.x[0] : t.x[i - 1];
  return t.x.front();
}

double SensitivityProfile::support_end() const noexcept {
  if (const auto* r = std::get_if<RectangularProfile>(&shape_)) return r->b;
  const auto& t = std::get<TabulatedProfile>(shape_);
  for (std::size_t i = t.chi.size(); i-- > 0;)
    if (t.chi[i] > 0.0) return i + 1 == t.chi.size() ? t.x.back() : t.x[i + 1];
  return t.x.back();
}

DiscreteBathSpec::DiscreteBathSpec(std::size_t n, double omega_max_, double coupling, double omega_0_)
    : n_modes(n), omega_max(omega_max_), coupling_G(coupling), omega_0(omega_0_) {
  if (n == 0) throw InvalidArgument("bath needs at least one mode");
  if (!(omega_max_ > 0.0) || !std::isfinite(omega_max_)) throw InvalidArgument("omega_max must be positive");
  if (!std::isfinite(coupling) || !std::isfinite(omega_0_)) throw InvalidArgument("bath parameters must be finite");
}

double DiscreteBathSpec::mode_frequency(std::size_t n) const noexcept {
  return omega_max * static_cast<double>(n) / static_cast<double>(n_modes);
}

double DiscreteBathSpec::coupling_sq(std::size_t n) const noexcept {
  return coupling_G * coupling_G * mode_frequency(n) / static_cast<double>(n_modes);
}

ContinuumRates continuum_rates(const DiscreteBathSpec& bath) {
  const double w0 = bath.omega_0;
  const double wm = bath.omega_max;
  if (!(wm > w0)) throw InvalidArgument("continuum rates require omega_max > omega_0");
  if (!(w0 > 0.0)) throw InvalidArgument("continuum rates require omega_0 > 0");
  const double g2 = bath.coupling_G * bath.coupling_G;
  ContinuumRates r;
  r.decay_a = 2.0 * kPi * g2 * w0 / wm;
  r.shift = 2.0 * g2 * (w0 / wm * std::log(w0 / (wm - w0)) - 1.0);
  r.correlation_time = 1.0 / w0;
  return r;
}

namespace {

// int_0^1 xi exp(-i a xi) d xi
cplx first_moment_phase_integral(double a) {
  if (std::abs(a) < 0.5) {
    // sum_k (-i a)^k / (k! (k + 2))
    cplx term(1.0, 0.0);  // (-i a)^k / k!
    cplx sum(0.5, 0.0);
    for (int k = 1; k < 40; ++k) {
      term *= cplx(0.0, -a) / static_cast<double>(k);
      sum += term / static_cast<double>(k + 2);
    }
    return sum;
  }
  return ((cplx(1.0, a)) * std::exp(cplx(0.0, -a)) - 1.0) / (a * a);
}

}  // namespace

cplx kappa(const DiscreteBathSpec& bath, double tau, KappaMode mode) {
  if (!(tau >= 0.0)) throw InvalidArgument("kappa requires tau >= 0");
  const double g2 = bath.coupling_G * bath.coupling_G;
  if (mode == KappaMode::continuum) {
    return bath.omega_max * g2 * std::exp(cplx(0.0, bath.omega_0 * tau)) *
           first_moment_phase_integral(bath.omega_max * tau);
  }
  cplx sum(0.0, 0.0);
  for (std::size_t n = 1; n <= bath.n_modes; ++n)
    sum += bath.coupling_sq(n) * std::exp(cplx(0.0, -(bath.mode_frequency(n) - bath.omega_0) * tau));
  return sum;
}

DetectorSpec DetectorSpec::from_bath(SensitivityProfile profile, const DiscreteBathSpec& bath) {
  return DetectorSpec{std::move(profile), continuum_rates(bath)};
}

DetectorSpec DetectorSpec::direct(SensitivityProfile profile, double decay_a, double shift) {
  if (!(decay_a >= 0.0) || !std::isfinite(decay_a)) throw InvalidArgument("decay rate A must be non-negative");
  if (!std::isfinite(shift)) throw InvalidArgument("line shift must be finite");
  return DetectorSpec{std::move(profile), ContinuumRates{decay_a, shift, 0.0}};
}

ComplexPotentialField DetectorSpec::potential(const SpatialGrid& grid, bool include_shift) const {
  const auto chi = profile.sample(grid);
  std::vector<double> decay(grid.size()), shift(grid.size(), 0.0);
  for (std::size_t i = 0; i < chi.size(); ++i) {
    const double c2 = chi[i] * chi[i];
    decay[i] = rates.decay_a * c2;
    if (include_shift) shift[i] = rates.shift * c2;
  }
  return {grid, std::move(shift), std::move(decay)};
}

WaveFunction reset(const WaveFunction& psi_cond, const DetectorSpec& detector) {
  const auto& g = psi_cond.grid();
  const double lo = detector.profile.support_begin();
  const double hi = detector.profile.support_end();
  if (lo < g.x_min() || hi > g.x_max()) {
    std::ostringstream os;
    os << "grid [" << g.x_min() << ", " << g.x_max() << ") does not cover the detector support [" << lo << ", "
       << hi << ")";
    throw GridError(os.str());
  }
  const auto chi = detector.profile.sample(g);
  const double amp = std::sqrt(detector.rates.decay_a);
  std::vector<cplx> out(g.size());
  const auto in = psi_cond.amplitudes();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = amp * chi[i] * in[i];
  WaveFunction r(g, std::move(out), psi_cond.time());
  const double n = r.norm_sq();
  if (!(n >= kZeroOverlapThreshold)) {
    std::ostringstream os;
    os << "reset state has zero overlap with the detector at t=" << psi_cond.time() << " s (norm^2=" << n << ")";
    throw ZeroOverlapError(os.str());
  }
  return r;
}

}  // namespace passlab
