#include "prbslice/ratio.hpp"

#include <charconv>
#include <numeric>
#include <stdexcept>
#include <system_error>

namespace prbslice {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw std::overflow_error("ratio arithmetic overflow");
  }
  return out;
}

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Ratio::Ratio(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::invalid_argument("ratio with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  if (n < 0) throw std::invalid_argument("negative ratio");
  const std::int64_t g = std::gcd(n, d);
  num = g == 0 ? 0 : n / g;
  den = g == 0 ? 1 : d / g;
}

Ratio Ratio::parse(std::string_view text) {
  text = trim(text);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Ratio(parse_int(trim(text.substr(0, slash))), parse_int(trim(text.substr(slash + 1))));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 15) throw std::invalid_argument("too many decimals: '" + std::string(text) + "'");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
    return Ratio(checked_mul(w, den) + f, den);
  }
  return Ratio(parse_int(text), 1);
}

Ratio Ratio::from_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc{}) throw std::invalid_argument("cannot represent value as ratio");
  return parse(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

std::string Ratio::to_string() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

std::int64_t Ratio::ceil_mul(std::int64_t value) const {
  const std::int64_t p = checked_mul(num, value);
  return (p + den - 1) / den;
}

std::int64_t Ratio::floor_mul(std::int64_t value) const { return checked_mul(num, value) / den; }

bool operator<(const Ratio& a, const Ratio& b) {
  return checked_mul(a.num, b.den) < checked_mul(b.num, a.den);
}

}  // namespace prbslice
