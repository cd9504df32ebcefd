#include "passlab/gaussian.hpp"

#include <cmath>
#include <sstream>

#include "passlab/constants.hpp"
#include "passlab/errors.hpp"

namespace passlab {

GaussianPacketSpec::GaussianPacketSpec(double x0, double sigma, double v0)
    : center_x0(x0), sigma_x(sigma), mean_velocity_v0(v0) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("packet width sigma_x must be positive");
  if (!std::isfinite(x0) || !std::isfinite(v0)) throw InvalidArgument("packet center and velocity must be finite");
}

namespace {

// hbar t / (2 m sigma^2), the dimensionless spreading parameter.
double spreading(const GaussianPacketSpec& p, const ParticleSpec& m, double t) {
  return m.hbar * t / (2.0 * m.mass * p.sigma_x * p.sigma_x);
}

}  // namespace

double free_width(const GaussianPacketSpec& packet, const ParticleSpec& particle, double t) {
  const double s = spreading(packet, particle, t);
  return packet.sigma_x * std::sqrt(1.0 + s * s);
}

double momentum_width(const GaussianPacketSpec& packet, const ParticleSpec& particle) {
  return particle.hbar / (2.0 * packet.sigma_x);
}

cplx free_gaussian_amplitude(const GaussianPacketSpec& packet, const ParticleSpec& particle,
                             double x, double t) {
  const double sigma = packet.sigma_x;
  const double k0 = particle.mass * packet.mean_velocity_v0 / particle.hbar;
  const cplx s(1.0, spreading(packet, particle, t));
  const double y = x - packet.center_x0 - packet.mean_velocity_v0 * t;
  const double prefactor = std::pow(2.0 * kPi * sigma * sigma, -0.25);
  const double plane_phase = k0 * x - 0.5 * k0 * packet.mean_velocity_v0 * t;
  const cplx exponent = -y * y / (4.0 * sigma * sigma * s) + cplx(0.0, plane_phase);
  return prefactor * std::exp(exponent) / std::sqrt(s);
}

double gaussian_tail_outside(const GaussianPacketSpec& packet, const ParticleSpec& particle,
                             double t, double x_min, double x_max) {
  const double w = free_width(packet, particle, t);
  const double c = packet.center_x0 + packet.mean_velocity_v0 * t;
  const double r2 = std::sqrt(2.0) * w;
  return 0.5 * std::erfc((x_max - c) / r2) + 0.5 * std::erfc((c - x_min) / r2);
}

WaveFunction gaussian_free_state(const GaussianPacketSpec& packet, const ParticleSpec& particle,
                                 double t, const SpatialGrid& grid, double tail_tolerance) {
  const double tail = gaussian_tail_outside(packet, particle, t, grid.x_min(), grid.x_max());
  if (tail > tail_tolerance) {
    std::ostringstream os;
    os << "grid too narrow: packet probability outside [" << grid.x_min() << ", " << grid.x_max()
       << ") m at t=" << t << " s is " << tail;
    throw GridError(os.str());
  }
  const double k0 = particle.mass * packet.mean_velocity_v0 / particle.hbar;
  const double sigma_k = 1.0 / (2.0 * packet.sigma_x);
  const double r2 = std::sqrt(2.0) * sigma_k;
  const double k_tail = 0.5 * std::erfc((grid.k_max() - k0) / r2) + 0.5 * std::erfc((grid.k_max() + k0) / r2);
  if (k_tail > tail_tolerance) {
    std::ostringstream os;
    os << "grid too coarse: momentum probability beyond the Nyquist wave number is " << k_tail;
    throw GridError(os.str());
  }
  std::vector<cplx> amp(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) amp[i] = free_gaussian_amplitude(packet, particle, grid.x(i), t);
  return WaveFunction(grid, std::move(amp), t);
}

}  // namespace passlab
