#include "passlab/propagator.hpp"

#include <cmath>
#include <sstream>

#include "passlab/errors.hpp"

namespace passlab {

void DetectionRecord::reserve(std::size_t n) {
  times.reserve(n);
  survival_p0.reserve(n);
  density_w1.reserve(n);
  cumulative_detected.reserve(n);
  boundary_absorbed.reserve(n);
}

namespace {

using Ranges = std::vector<std::pair<std::size_t, std::size_t>>;

Ranges nonzero_ranges(const std::vector<double>& v) {
  Ranges out;
  std::size_t i = 0;
  while (i < v.size()) {
    if (v[i] == 0.0) {
      ++i;
      continue;
    }
    const std::size_t b = i;
    while (i < v.size() && v[i] != 0.0) ++i;
    out.emplace_back(b, i);
  }
  return out;
}

}  // namespace

SplitStepPropagator::SplitStepPropagator(const ComplexPotentialField& potential, const ParticleSpec& particle,
                                         double dt, const BoundaryAbsorber& absorber)
    : grid_(potential.grid()), dt_(dt), decay_(potential.decay_rate()) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive");
  const std::size_t n = grid_.size();
  const auto w = absorber_rates(grid_, absorber);
  for (std::size_t i = 0; i < n; ++i)
    if (w[i] != 0.0 && decay_[i] != 0.0)
      throw InvalidArgument("boundary absorber overlaps a detector; enlarge the grid or shrink the absorber");

  half_factor_.resize(n);
  std::vector<double> active(n, 0.0);
  const auto& shift = potential.real_shift();
  for (std::size_t i = 0; i < n; ++i) {
    const double rate = decay_[i] + w[i];
    half_factor_[i] = std::exp(cplx(-rate, -shift[i]) * (0.25 * dt));
    active[i] = (rate != 0.0 || shift[i] != 0.0) ? 1.0 : 0.0;
  }
  active_ = nonzero_ranges(active);
  detector_ = nonzero_ranges(decay_);
  absorber_ = nonzero_ranges(w);
  absorber_keep_.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    if (w[i] != 0.0) absorber_keep_[i] = std::norm(half_factor_[i]);

  kinetic_.resize(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = grid_.k(j);
    const double phase = -particle.hbar * k * k * dt / (2.0 * particle.mass);
    kinetic_[j] = std::polar(inv_n, phase);
  }
  fft_ = std::make_unique<Fft>(n);
}

double SplitStepPropagator::apply_half_potential(std::vector<cplx>& psi) const {
  double lost = 0.0;
  for (const auto& [b, e] : absorber_)
    for (std::size_t i = b; i < e; ++i) lost += std::norm(psi[i]) * (1.0 - absorber_keep_[i]);
  for (const auto& [b, e] : active_)
    for (std::size_t i = b; i < e; ++i) psi[i] *= half_factor_[i];
  return lost * grid_.dx();
}

double SplitStepPropagator::step(WaveFunction& psi) {
  if (!(psi.grid() == grid_)) throw GridMismatch("propagator and wave function live on different grids");
  auto& a = psi.data();
  double lost = apply_half_potential(a);
  fft_->forward(a);
  for (std::size_t j = 0; j < a.size(); ++j) a[j] *= kinetic_[j];
  fft_->backward(a);
  lost += apply_half_potential(a);
  psi.set_time(psi.time() + dt_);
  return lost;
}

double SplitStepPropagator::detection_density(const WaveFunction& psi) const {
  const auto a = psi.amplitudes();
  double s = 0.0;
  for (const auto& [b, e] : detector_)
    for (std::size_t i = b; i < e; ++i) s += decay_[i] * std::norm(a[i]);
  return s * grid_.dx();
}

WaveFunction step(const WaveFunction& psi, const ComplexPotentialField& potential, const ParticleSpec& particle,
                  double dt) {
  if (!(psi.grid() == potential.grid())) throw GridMismatch("potential and wave function live on different grids");
  SplitStepPropagator prop(potential, particle, dt);
  WaveFunction out = psi;
  prop.step(out);
  out.validate(psi.norm_sq());
  return out;
}

EvolutionResult evolve_conditional(const WaveFunction& psi0, const ComplexPotentialField& potential,
                                   const ParticleSpec& particle, double t_final, double dt,
                                   const EvolveOptions& options) {
  if (!(psi0.grid() == potential.grid())) throw GridMismatch("potential and wave function live on different grids");
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  const double span = t_final - psi0.time();
  if (!(span > 0.0)) throw InvalidArgument("t_final must be later than the initial time");
  const std::size_t stride = options.sample_stride == 0 ? 1 : options.sample_stride;
  const auto n_steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
  const double h = span / static_cast<double>(n_steps);
  const double t0 = psi0.time();

  SplitStepPropagator prop(potential, particle, h, options.absorber);
  EvolutionResult out{psi0, {}};
  WaveFunction& psi = out.state;
  DetectionRecord& rec = out.record;
  rec.reserve(n_steps / stride + 2);

  double w_prev = prop.detection_density(psi);
  double detected = 0.0;
  double absorbed = 0.0;
  auto record = [&](double t, double w) {
    const double p0 = psi.norm_sq();
    if (!std::isfinite(p0)) {
      std::ostringstream os;
      os << "conditional evolution became unstable at t=" << t << " s";
      throw InstabilityError(os.str());
    }
    rec.times.push_back(t);
    rec.survival_p0.push_back(p0);
    rec.density_w1.push_back(w);
    rec.cumulative_detected.push_back(detected);
    rec.boundary_absorbed.push_back(absorbed);
  };
  record(t0, w_prev);

  for (std::size_t s = 1; s <= n_steps; ++s) {
    absorbed += prop.step(psi);
    // Recompute the time from the step count so that rounding does not drift.
    psi.set_time(t0 + static_cast<double>(s) * h);
    const double w = prop.detection_density(psi);
    detected += 0.5 * h * (w + w_prev);
    w_prev = w;
    if (options.observer) options.observer(s, psi);
    if (s % stride == 0 || s == n_steps) {
      record(psi.time(), w);
      if (options.stop_below_survival > 0.0 && rec.survival_p0.back() < options.stop_below_survival) break;
    }
  }
  psi.validate(psi0.norm_sq());
  return out;
}

}  // namespace passlab
