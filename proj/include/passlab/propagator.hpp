#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "passlab/fft.hpp"
#include "passlab/potential.hpp"
#include "passlab/wavefunction.hpp"

namespace passlab {

/// Survival probability and first-detection density of one conditional
/// evolution, sampled every `sample_stride` steps.
///
/// survival_p0 + cumulative_detected + boundary_absorbed equals the initial
/// squared norm up to quadrature error. cumulative_detected is the running
/// trapezoid integral of density_w1 taken over every time step, not only the
/// recorded samples.
struct DetectionRecord {
  std::vector<double> times;
  std::vector<double> survival_p0;
  std::vector<double> density_w1;
  std::vector<double> cumulative_detected;
  std::vector<double> boundary_absorbed;

  std::size_t size() const noexcept { return times.size(); }
  void reserve(std::size_t n);
};

/// Second-order Strang splitting for
///   i hbar d/dt psi = [p^2/2m + (hbar/2)(delta(x) - i A(x))] psi.
/// The potential half steps are exact pointwise exponentials and the kinetic
/// step is exact in the Fourier basis.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const ComplexPotentialField& potential, const ParticleSpec& particle, double dt,
                      const BoundaryAbsorber& absorber = {});

  double dt() const noexcept { return dt_; }
  const SpatialGrid& grid() const noexcept { return grid_; }

  /// Advances psi by dt in place. Returns the probability removed by the
  /// boundary absorber during this step.
  double step(WaveFunction& psi);

  /// w1 = sum_i A(x_i) |psi_i|^2 dx over the detector part of the potential.
  double detection_density(const WaveFunction& psi) const;

 private:
  double apply_half_potential(std::vector<cplx>& psi) const;

  SpatialGrid grid_;
  double dt_;
  std::vector<cplx> half_factor_;
  std::vector<double> decay_;
  std::vector<std::pair<std::size_t, std::size_t>> active_;
  std::vector<std::pair<std::size_t, std::size_t>> detector_;
  std::vector<std::pair<std::size_t, std::size_t>> absorber_;
  std::vector<double> absorber_keep_;  // |half factor|^2 inside absorber ranges
  std::vector<cplx> kinetic_;
  std::unique_ptr<Fft> fft_;
};

/// One step of length dt (allocates a propagator; use SplitStepPropagator for loops).
WaveFunction step(const WaveFunction& psi, const ComplexPotentialField& potential,
                  const ParticleSpec& particle, double dt);

struct EvolveOptions {
  std::size_t sample_stride = 1;
  BoundaryAbsorber absorber{};
  /// Stop early once the survival probability at a sample drops below this.
  double stop_below_survival = 0.0;
  /// Called after every step with the step index (1-based) and current state.
  std::function<void(std::size_t, const WaveFunction&)> observer;
};

struct EvolutionResult {
  WaveFunction state;
  DetectionRecord record;
};

/// Evolves psi0 under the conditional Hamiltonian until t_final with a step no
/// larger than dt (the step is shrunk so that t_final is hit exactly).
/// Throws InvalidArgument if t_final <= psi0.time() or dt <= 0, GridMismatch
/// if the potential lives on another grid, InstabilityError on non-finite output.
EvolutionResult evolve_conditional(const WaveFunction& psi0, const ComplexPotentialField& potential,
                                   const ParticleSpec& particle, double t_final, double dt,
                                   const EvolveOptions& options = {});

}  // namespace passlab
