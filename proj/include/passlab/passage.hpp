#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "passlab/detector.hpp"
#include "passlab/gaussian.hpp"
#include "passlab/observables.hpp"
#include "passlab/propagator.hpp"

namespace passlab {

enum class PassageMethod {
  per_entry,  ///< propagate every reset state on the entry grid
  ensemble,   ///< propagate the eigenvectors of the entry-weighted reset mixture
};

/// Two-detector experiment on one global grid. Times left as NaN and empty
/// grids are chosen automatically from the packet and detector geometry.
struct ExperimentConfig {
  ParticleSpec particle = ParticleSpec::cesium();
  GaussianPacketSpec packet{0.0, 1e-6, 7.17e-3};
  DetectorSpec detector1 = DetectorSpec::direct(SensitivityProfile::rectangular(0.0, 20e-6), 2.3895e3);
  DetectorSpec detector2 = DetectorSpec::direct(SensitivityProfile::rectangular(100e-6, 120e-6), 2.3895e3);
  SpatialGrid grid = build_grid(-30e-6, 174.8e-6, 8192);
  BoundaryAbsorber absorber{};
  double dt = 1e-7;                 ///< stage-1 step, s
  double stage2_dt = 0.0;           ///< stage-2 step, s (0: same as dt)
  bool include_shift = false;       ///< add delta_shift chi^2 to the Hamiltonian

  double t_start = std::numeric_limits<double>::quiet_NaN();  ///< s
  double t_end = std::numeric_limits<double>::quiet_NaN();    ///< stage-1 end, s
  double tau_max = std::numeric_limits<double>::quiet_NaN();  ///< stage-2 span, s
  double stop_fraction = 1e-9;  ///< stop a stage once its norm falls below this fraction

  std::vector<double> entry_times;  ///< s; empty: auto grid of n_entry points
  std::size_t n_entry = 256;
  std::vector<double> tau_grid;     ///< s; empty: every stage-2 step

  PassageMethod method = PassageMethod::ensemble;
  double ensemble_tolerance = 1e-10;  ///< dropped trace fraction of the mixture

  /// Distance between the starting edges of the two detectors.
  double distance() const;
};

/// Throws InvalidArgument for overlapping or misordered detectors and
/// GridError when a detector is not inside the grid.
void validate(const ExperimentConfig& cfg);

/// Time at which the leading 6-width edge of the free packet reaches
/// `detector_start`. Throws RegimeError when the packet spreads faster than
/// it moves (v0 <= 6 sigma_v).
double auto_start_time(const GaussianPacketSpec& packet, const ParticleSpec& particle, double detector_start);

struct ArrivalResult {
  DetectionRecord record;          ///< stage 1, every step
  std::vector<double> entry_times;  ///< s
  std::vector<double> entry_weights;  ///< trapezoid weights, s
  std::vector<WaveFunction> reset_states;  ///< unnormalized, |psi|^2 = w1(T)
  double detected = 0.0;           ///< total detection probability in detector 1
  double entry_coverage = 0.0;     ///< part of `detected` inside the entry grid span
  double transmitted = 0.0;        ///< survival at the end of stage 1
  double boundary_loss = 0.0;
  std::vector<std::string> warnings;
};

/// Stage 1: conditional evolution through detector 1 and the reset states on
/// the entry-time grid. Throws ZeroOverlapError when detector 1 never fires.
ArrivalResult arrival_stage(const ExperimentConfig& cfg);

struct LeakageReport {
  double undetected_transmission = 0.0;  ///< 1 - detection probability of stage 1
  double entry_truncation = 0.0;         ///< stage-1 detections outside the entry quadrature
  double residual_norm = 0.0;            ///< reset mixture left undetected by detector 2
  double boundary_loss = 0.0;            ///< removed by the boundary absorber in stage 2
  double total() const noexcept {
    return undetected_transmission + entry_truncation + residual_norm + boundary_loss;
  }
};

struct PassageDistribution {
  std::vector<double> tau;    ///< s
  std::vector<double> g_tau;  ///< 1/s
  double total_probability = 0.0;
  double mean_tau = 0.0;
  double std_tau = 0.0;
  LeakageReport leakage;
  std::size_t propagated_states = 0;
  std::vector<std::string> warnings;
};

/// Stage 2 for an existing arrival result.
PassageDistribution passage_distribution(const ExperimentConfig& cfg, const ArrivalResult& arrival);

/// Both stages.
PassageDistribution passage_distribution(const ExperimentConfig& cfg);

/// w1 of detector 2 for one (possibly unnormalized) reset state on the stage-2
/// clock; entry i is at tau = i * step. The record ends early once the norm
/// falls below cfg.stop_fraction of the initial value.
struct StageTwoTrace {
  double step = 0.0;
  std::vector<double> w1;
  double residual = 0.0;
  double boundary_loss = 0.0;
};
StageTwoTrace stage_two(const ExperimentConfig& cfg, const WaveFunction& reset_state);

/// Passage-time density of classical particles with the packet's momentum
/// distribution. Throws RegimeError when more than 1e-6 of it has p <= 0.
std::vector<double> classical_passage(const GaussianPacketSpec& packet, const ParticleSpec& particle,
                                      double distance, const std::vector<double>& tau);

/// Kijowski arrival-time density at position x for the free packet.
std::vector<double> kijowski_distribution(const GaussianPacketSpec& packet, const ParticleSpec& particle,
                                          double x, const std::vector<double>& t);

/// Normalized reset state after a detection at time T, with the free packet
/// at the same time for comparison.
struct ResetSnapshot {
  double time = 0.0;
  double w1 = 0.0;
  WaveFunction reset;  ///< normalized
  WaveFunction free;
  Moments reset_moments;
  Moments free_moments;
};
ResetSnapshot reset_snapshot(const ExperimentConfig& cfg, const DetectorSpec& detector, double time);

}  // namespace passlab
