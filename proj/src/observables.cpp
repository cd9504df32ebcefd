#include "passlab/observables.hpp"

#include <algorithm>
#include <cmath>

#include "passlab/constants.hpp"
#include "passlab/errors.hpp"
#include "passlab/fft.hpp"

namespace passlab {

namespace {

// Unnormalized FFT of the amplitudes; |Phi_j|^2 dx / (n dk) is the density
// per unit k, so that sum density * dk = sum |psi|^2 dx.
std::vector<double> spectral_weights(const WaveFunction& psi) {
  std::vector<cplx> buf(psi.amplitudes().begin(), psi.amplitudes().end());
  Fft fft(buf.size());
  fft.forward(buf);
  std::vector<double> w(buf.size());
  for (std::size_t j = 0; j < buf.size(); ++j) w[j] = std::norm(buf[j]);
  return w;
}

}  // namespace

double momentum_norm_sq(const WaveFunction& psi) {
  const auto w = spectral_weights(psi);
  return pairwise_sum(w) * psi.grid().dx() / static_cast<double>(w.size());
}

Moments observables(const WaveFunction& psi) {
  const auto& g = psi.grid();
  const auto amp = psi.amplitudes();
  Moments m;
  m.norm_sq = psi.norm_sq();
  if (!(m.norm_sq > 1e-300)) throw ZeroNormError("observables: state has zero norm");

  std::vector<double> rho(amp.size()), t(amp.size());
  for (std::size_t i = 0; i < amp.size(); ++i) rho[i] = std::norm(amp[i]);
  const double mass = pairwise_sum(rho);
  for (std::size_t i = 0; i < amp.size(); ++i) t[i] = g.x(i) * rho[i];
  m.mean_x = pairwise_sum(t) / mass;
  for (std::size_t i = 0; i < amp.size(); ++i) t[i] = (g.x(i) - m.mean_x) * (g.x(i) - m.mean_x) * rho[i];
  m.std_x = std::sqrt(std::max(0.0, pairwise_sum(t) / mass));

  const auto w = spectral_weights(psi);
  const double wmass = pairwise_sum(w);
  for (std::size_t j = 0; j < w.size(); ++j) t[j] = g.k(j) * w[j];
  const double mean_k = pairwise_sum(t) / wmass;
  for (std::size_t j = 0; j < w.size(); ++j) t[j] = (g.k(j) - mean_k) * (g.k(j) - mean_k) * w[j];
  const double std_k = std::sqrt(std::max(0.0, pairwise_sum(t) / wmass));
  // hbar is not carried by the wave function; moments are reported for the
  // particle-independent relation p = hbar k.
  m.mean_p = kHbar * mean_k;
  m.std_p = kHbar * std_k;
  return m;
}

MomentumDensity momentum_density(const WaveFunction& psi) {
  const auto& g = psi.grid();
  const auto w = spectral_weights(psi);
  const std::size_t n = w.size();
  const double scale = g.dx() / (static_cast<double>(n) * g.dk());
  MomentumDensity out;
  out.k.resize(n);
  out.density.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t j = (s + n / 2) % n;  // most negative wave number first
    out.k[s] = g.k(j);
    out.density[s] = w[j] * scale;
  }
  return out;
}

}  // namespace passlab
