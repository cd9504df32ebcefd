#pragma once

#include <optional>
#include <string>
#include <vector>

#include "passlab/discrete_oracle.hpp"
#include "passlab/passage.hpp"

namespace passlab {

/// Detection instant and detector rate for one reset-state snapshot; the
/// detector geometry is that of detector 1.
struct SnapshotRequest {
  double rate = 0.0;  ///< 1/s
  double time = 0.0;  ///< s
  bool operator==(const SnapshotRequest&) const = default;
};

struct KijowskiRequest {
  double x = 0.0;       ///< m
  double t_min = 0.0;   ///< s
  double t_max = 0.0;   ///< s
  std::size_t points = 0;
  bool operator==(const KijowskiRequest&) const = default;
};

/// Defaults: N = 15 modes, omega_0 = 2.38e12 rad/s, omega_max = 4.6 omega_0,
/// G = 2782 s^-1/2, delta_t = 100 / omega_0, cesium packet of 50 nm at 1.79 m/s.
struct DiscreteRequest {
  DiscreteResetConfig config{DiscreteBathSpec(15, 4.6 * 2.38e12, 2.782e3, 2.38e12),
                             GaussianPacketSpec(0.0, 50e-9, 1.79), ParticleSpec::cesium(), 100.0 / 2.38e12};
  SpatialGrid grid = build_grid(-800e-9, 800e-9, 2048);
  double exclusion = 100e-9;  ///< half width of the masked window around the edge, m
};

/// Declarative description of every run the tool can perform. Sections not
/// present in the file keep the defaults of the cesium example.
struct RunConfig {
  ExperimentConfig experiment;
  std::size_t output_stride = 1;  ///< write every n-th time sample
  KijowskiRequest kijowski;
  std::vector<SnapshotRequest> snapshots;
  DiscreteRequest discrete;
  std::vector<double> sweep_v0;  ///< m/s
};

RunConfig default_run_config();

/// Parses JSON text. Throws ConfigError naming the line:column for syntax
/// errors and the field path for unknown keys, wrong types, bad units or
/// values that fail validation.
RunConfig parse_run_config(const std::string& text);

/// Reads and parses a file. Throws std::ios_base::failure naming the path
/// when it cannot be read.
RunConfig load_run_config(const std::string& path);

/// SI-number JSON text that parse_run_config maps back to an equal config.
std::string echo_run_config(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace passlab
