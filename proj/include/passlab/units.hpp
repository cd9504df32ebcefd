#pragma once

#include <string>
#include <string_view>

namespace passlab {

enum class Dimension { dimensionless, length, time, velocity, rate, mass, coupling, action };

std::string_view dimension_name(Dimension d) noexcept;

/// Parses "<number> [unit]" into SI. A bare number is taken as SI already.
/// Accepted units: m mm um µm μm nm | s ms us µs ns | m/s mm/s cm/s um/s |
/// 1/s s^-1 1/ms 1/us rad/s | kg u | s^-1/2 | J*s.
/// Throws InvalidArgument for malformed text, unknown units, or a unit of
/// the wrong dimension.
double parse_quantity(std::string_view text, Dimension expected);

}  // namespace passlab
