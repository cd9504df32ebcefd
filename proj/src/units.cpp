#include "passlab/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "passlab/errors.hpp"

namespace passlab {

namespace {

struct Unit {
  std::string_view symbol;
  Dimension dim;
  int exponent;          // decimal prefix, applied in the text so rounding happens once
  double factor = 1.0;
};

constexpr std::array kUnits{
    Unit{"m", Dimension::length, 0},         Unit{"mm", Dimension::length, -3},
    Unit{"um", Dimension::length, -6},       Unit{"µm", Dimension::length, -6},
    Unit{"μm", Dimension::length, -6},  Unit{"nm", Dimension::length, -9},
    Unit{"s", Dimension::time, 0},           Unit{"ms", Dimension::time, -3},
    Unit{"us", Dimension::time, -6},         Unit{"µs", Dimension::time, -6},
    Unit{"μs", Dimension::time, -6},    Unit{"ns", Dimension::time, -9},
    Unit{"m/s", Dimension::velocity, 0},     Unit{"mm/s", Dimension::velocity, -3},
    Unit{"cm/s", Dimension::velocity, -2},   Unit{"um/s", Dimension::velocity, -6},
    Unit{"1/s", Dimension::rate, 0},         Unit{"s^-1", Dimension::rate, 0},
    Unit{"1/ms", Dimension::rate, 3},        Unit{"1/us", Dimension::rate, 6},
    Unit{"rad/s", Dimension::rate, 0},       Unit{"kg", Dimension::mass, 0},
    Unit{"u", Dimension::mass, 0, 1.66053906660e-27},
    Unit{"s^-1/2", Dimension::coupling, 0},  Unit{"J*s", Dimension::action, 0},
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view dimension_name(Dimension d) noexcept {
  switch (d) {
    case Dimension::dimensionless: return "dimensionless";
    case Dimension::length: return "length";
    case Dimension::time: return "time";
    case Dimension::velocity: return "velocity";
    case Dimension::rate: return "rate";
    case Dimension::mass: return "mass";
    case Dimension::coupling: return "coupling";
    case Dimension::action: return "action";
  }
  return "?";
}

double parse_quantity(std::string_view text, Dimension expected) {
  const std::string_view s = trim(text);
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr == begin)
    throw InvalidArgument("expected a number with optional unit, got '" + std::string(text) + "'");
  if (!std::isfinite(value)) throw InvalidArgument("non-finite value '" + std::string(text) + "'");
  const std::string_view unit = trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
  if (unit.empty()) return value;
  for (const auto& u : kUnits) {
    if (u.symbol != unit) continue;
    if (u.dim != expected)
      throw InvalidArgument("unit '" + std::string(unit) + "' is a " + std::string(dimension_name(u.dim)) +
                            ", expected " + std::string(dimension_name(expected)));
    if (u.exponent == 0) return value * u.factor;
    // Rewrite "<mantissa>[e<k>]" as "<mantissa>e<k + exponent>" and convert once.
    std::string number(begin, ptr);
    int k = 0;
    if (const auto e = number.find_first_of("eE"); e != std::string::npos) {
      k = std::stoi(number.substr(e + 1));
      number.resize(e);
    }
    number += "e" + std::to_string(k + u.exponent);
    double scaled = 0.0;
    std::from_chars(number.data(), number.data() + number.size(), scaled);
    return scaled;
  }
  throw InvalidArgument("unknown unit '" + std::string(unit) + "'");
}

}  // namespace passlab
