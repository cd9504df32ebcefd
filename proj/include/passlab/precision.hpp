#pragma once

#include <string>
#include <vector>

#include "passlab/numeric.hpp"
#include "passlab/passage.hpp"

namespace passlab {

/// Three-term width estimate of the passage-time density, in seconds.
struct WidthBudget {
  double delay_term = 0.0;    ///< 2/A
  double reset_x_term = 0.0;  ///< dx_reset / v0
  double reset_p_term = 0.0;  ///< hbar d / (2 m v0^2 dx_reset)
  double total = 0.0;
};

/// Throws InvalidArgument unless every input is positive.
WidthBudget width_estimate(double delta_x_reset, double a, double distance, const ParticleSpec& particle,
                           double v0);

struct OptimalPlan {
  double delta_x_opt = 0.0;         ///< m
  double a_opt = 0.0;               ///< 1/s
  double delta_tau_opt = 0.0;       ///< s, sqrt(5 hbar d sqrt(m/2)) E^(-3/4)
  double energy = 0.0;              ///< J
  double detection_length_L = 0.0;  ///< v0 / a_opt, m
};

OptimalPlan optimal_plan(double distance, const ParticleSpec& particle, double v0);

/// Decay rate v0 / (2 dx) matched to a packet of width dx.
double optimal_rate(double delta_x, double v0);

/// Configuration of one sweep run: packet width dx_opt(v0), both detectors at
/// A_opt(v0) with length 4 L rounded up to the grid, numerics rescaled from
/// `base` (dx capped so k_max / k0 stays fixed, dt scaled as v0^-2).
ExperimentConfig sweep_config(const ExperimentConfig& base, double v0);

struct SweepPoint {
  double v0 = 0.0;
  double energy = 0.0;
  double std_tau = 0.0;
  double mean_tau = 0.0;
  double total_probability = 0.0;
  double delta_tau_opt = 0.0;
  double a = 0.0;
  double delta_x = 0.0;
  double detector_length = 0.0;
  std::size_t propagated_states = 0;
  std::vector<std::string> warnings;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  LinearFit fit;  ///< ln(std_tau) against ln(E)
  double exponent() const noexcept { return fit.slope; }
};

/// Runs the passage pipeline at every v0 and fits the log-log slope. Throws
/// InvalidArgument for fewer than two distinct energies and rethrows any
/// run failure with the offending v0 prepended to the message.
SweepResult scaling_sweep(const ExperimentConfig& base, const std::vector<double>& v0_values);

}  // namespace passlab
