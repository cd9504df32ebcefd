#pragma once

#include "passlab/wavefunction.hpp"

namespace passlab {

/// Minimal-uncertainty packet at t = 0: center x0, position width sigma_x,
/// mean velocity v0.
struct GaussianPacketSpec {
  double center_x0;
  double sigma_x;
  double mean_velocity_v0;

  GaussianPacketSpec(double x0, double sigma, double v0);
  bool operator==(const GaussianPacketSpec&) const = default;
};

/// Position width of the freely evolved packet at time t.
double free_width(const GaussianPacketSpec& packet, const ParticleSpec& particle, double t);

/// Momentum width hbar/(2 sigma_x), constant under free evolution.
double momentum_width(const GaussianPacketSpec& packet, const ParticleSpec& particle);

/// Analytic amplitude of the freely evolved packet at (x, t). At t = 0 this is
/// (2 pi sigma^2)^(-1/4) exp(-(x-x0)^2 / 4 sigma^2) exp(i m v0 x / hbar).
cplx free_gaussian_amplitude(const GaussianPacketSpec& packet, const ParticleSpec& particle,
                             double x, double t);

/// Probability that the packet at time t lies outside [x_min, x_max).
double gaussian_tail_outside(const GaussianPacketSpec& packet, const ParticleSpec& particle,
                             double t, double x_min, double x_max);

/// Samples the freely evolved packet on `grid`. Throws GridError when more
/// than `tail_tolerance` of the probability falls outside the grid, or when
/// the momentum distribution is not resolved by the grid to the same level.
WaveFunction gaussian_free_state(const GaussianPacketSpec& packet, const ParticleSpec& particle,
                                 double t, const SpatialGrid& grid,
                                 double tail_tolerance = 1e-10);

}  // namespace passlab
