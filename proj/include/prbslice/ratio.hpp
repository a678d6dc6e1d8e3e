#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace prbslice {

/// Non-negative rational number kept in lowest terms.
///
/// Configuration values such as the residual overuse fraction are rational in
/// nature; keeping them exact lets the residual floor be computed without
/// floating-point rounding.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Ratio() = default;
  Ratio(std::int64_t n, std::int64_t d);

  /// Parses "a/b", an integer, or a decimal literal ("0.45").
  static Ratio parse(std::string_view text);
  /// Exact conversion of the shortest decimal representation of `value`.
  static Ratio from_double(double value);

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;

  /// ceil(this * value) for value >= 0.
  std::int64_t ceil_mul(std::int64_t value) const;
  /// floor(this * value) for value >= 0.
  std::int64_t floor_mul(std::int64_t value) const;

  friend bool operator==(const Ratio&, const Ratio&) = default;
  friend bool operator<(const Ratio& a, const Ratio& b);
  friend bool operator<=(const Ratio& a, const Ratio& b) { return !(b < a); }
};

}  // namespace prbslice
