#include "passlab/precision.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "passlab/errors.hpp"

namespace passlab {

namespace {

constexpr double kDetectorLengths = 4.0;  // detector length in units of L
constexpr double kGridMargin = 10e-6;     // m, beyond packet tails and detectors

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 2;
  while (p < n) p <<= 1;
  return p;
}

template <class E>
[[noreturn]] void rethrow_at(const E&, double v0, const std::string& what) {
  std::ostringstream os;
  os << "sweep run at v0=" << v0 << " m/s failed: " << what;
  throw E(os.str());
}

}  // namespace

WidthBudget width_estimate(double delta_x_reset, double a, double distance, const ParticleSpec& particle,
                           double v0) {
  if (!(delta_x_reset > 0.0) || !(a > 0.0) || !(distance > 0.0) || !(v0 > 0.0))
    throw InvalidArgument("width_estimate inputs must be positive");
  WidthBudget b;
  b.delay_term = 2.0 / a;
  b.reset_x_term = delta_x_reset / v0;
  b.reset_p_term = particle.hbar * distance / (2.0 * particle.mass * v0 * v0 * delta_x_reset);
  b.total = b.delay_term + b.reset_x_term + b.reset_p_term;
  return b;
}

double optimal_rate(double delta_x, double v0) {
  if (!(delta_x > 0.0) || !(v0 > 0.0)) throw InvalidArgument("optimal_rate inputs must be positive");
  return v0 / (2.0 * delta_x);
}

OptimalPlan optimal_plan(double distance, const ParticleSpec& particle, double v0) {
  if (!(distance > 0.0) || !(v0 > 0.0)) throw InvalidArgument("optimal_plan inputs must be positive");
  OptimalPlan p;
  p.delta_x_opt = std::sqrt(particle.hbar * distance / (2.0 * particle.mass * v0));
  p.a_opt = optimal_rate(p.delta_x_opt, v0);
  p.energy = 0.5 * particle.mass * v0 * v0;
  p.delta_tau_opt =
      std::sqrt(5.0 * particle.hbar * distance * std::sqrt(particle.mass / 2.0)) * std::pow(p.energy, -0.75);
  p.detection_length_L = v0 / p.a_opt;
  return p;
}

ExperimentConfig sweep_config(const ExperimentConfig& base, double v0) {
  validate(base);
  if (!(v0 > 0.0)) throw InvalidArgument("sweep velocity must be positive");
  const double d = base.distance();
  const auto plan = optimal_plan(d, base.particle, v0);
  const double v_ref = base.packet.mean_velocity_v0;
  const double ratio = v_ref / v0;

  const double dx_target = base.grid.dx() * std::min(1.0, ratio);
  const double dx = d / std::ceil(d / dx_target - 1e-9);
  const double length = std::ceil(kDetectorLengths * plan.detection_length_L / dx - 1e-9) * dx;
  if (length > d) throw RegimeError("detection length exceeds the detector separation");
  const double a1 = base.detector1.profile.support_begin();
  const double a2 = a1 + d;

  ExperimentConfig cfg = base;
  cfg.packet = GaussianPacketSpec(a1, plan.delta_x_opt, v0);
  cfg.detector1 = DetectorSpec::direct(SensitivityProfile::rectangular(a1, a1 + length), plan.a_opt);
  cfg.detector2 = DetectorSpec::direct(SensitivityProfile::rectangular(a2, a2 + length), plan.a_opt);
  cfg.include_shift = false;

  const double t0 = auto_start_time(cfg.packet, cfg.particle, a1);
  const double sigma0 = free_width(cfg.packet, cfg.particle, t0);
  const double absorb = base.absorber.enabled() ? base.absorber.width : 0.0;
  const double left = 13.0 * sigma0 + absorb + kGridMargin;
  const double right = d + length + absorb + kGridMargin;
  const auto left_cells = static_cast<std::size_t>(std::ceil(left / dx));
  const auto cells = next_power_of_two(left_cells + static_cast<std::size_t>(std::ceil(right / dx)));
  const double x_min = a1 - static_cast<double>(left_cells) * dx;
  cfg.grid = build_grid(x_min, x_min + static_cast<double>(cells) * dx, cells);

  if (base.absorber.enabled()) cfg.absorber = BoundaryAbsorber{base.absorber.width, base.absorber.strength / ratio};
  cfg.dt = base.dt * ratio * ratio;
  cfg.stage2_dt = (base.stage2_dt > 0.0 ? base.stage2_dt : base.dt) * ratio * ratio;
  cfg.t_start = std::numeric_limits<double>::quiet_NaN();
  cfg.t_end = std::numeric_limits<double>::quiet_NaN();
  cfg.tau_max = std::numeric_limits<double>::quiet_NaN();
  cfg.entry_times.clear();
  cfg.tau_grid.clear();
  return cfg;
}

SweepResult scaling_sweep(const ExperimentConfig& base, const std::vector<double>& v0_values) {
  if (v0_values.size() < 2) throw InvalidArgument("scaling sweep needs at least two velocities");
  SweepResult out;
  for (double v0 : v0_values) {
    SweepPoint pt;
    pt.v0 = v0;
    try {
      const auto cfg = sweep_config(base, v0);
      const auto plan = optimal_plan(cfg.distance(), cfg.particle, v0);
      const auto g = passage_distribution(cfg);
      pt.energy = plan.energy;
      pt.std_tau = g.std_tau;
      pt.mean_tau = g.mean_tau;
      pt.total_probability = g.total_probability;
      pt.delta_tau_opt = plan.delta_tau_opt;
      pt.a = plan.a_opt;
      pt.delta_x = plan.delta_x_opt;
      pt.detector_length = cfg.detector1.profile.support_end() - cfg.detector1.profile.support_begin();
      pt.propagated_states = g.propagated_states;
      pt.warnings = g.warnings;
    } catch (const ConvergenceError& e) {
      rethrow_at(e, v0, e.what());
    } catch (const InstabilityError& e) {
      rethrow_at(e, v0, e.what());
    } catch (const RegimeError& e) {
      rethrow_at(e, v0, e.what());
    } catch (const GridError& e) {
      rethrow_at(e, v0, e.what());
    } catch (const ZeroOverlapError& e) {
      rethrow_at(e, v0, e.what());
    } catch (const InvalidArgument& e) {
      rethrow_at(e, v0, e.what());
    }
    out.points.push_back(std::move(pt));
  }
  std::vector<double> x, y;
  for (const auto& p : out.points) {
    x.push_back(std::log(p.energy));
    y.push_back(std::log(p.std_tau));
  }
  out.fit = fit_line(x, y);
  return out;
}

}  // namespace passlab
