#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace prbslice {

class SExprParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An atom (symbol, numeral, string literal) or a list.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;

  bool is_atom(std::string_view text) const { return !is_list && atom == text; }
  std::string to_string() const;
};

/// Parses every top-level expression in `text`. Comments (`;` to end of
/// line), string literals and |quoted| symbols are understood.
std::vector<SExpr> parse_sexprs(std::string_view text);

}  // namespace prbslice
