#pragma once

namespace passlab {

/// Reduced Planck constant, J*s (exact SI value).
inline constexpr double kHbar = 1.054571817e-34;

/// Cesium-133 mass in kg, the default particle.
inline constexpr double kCesiumMass = 2.2069e-25;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace passlab
