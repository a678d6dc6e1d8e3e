#include "prbslice/sexpr.hpp"

#include <cctype>

namespace prbslice {

std::string SExpr::to_string() const {
  if (!is_list) return atom;
  std::string out = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += items[i].to_string();
  }
  return out + ")";
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<SExpr> all() {
    std::vector<SExpr> out;
    for (skip(); pos_ < text_.size(); skip()) out.push_back(one());
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw SExprParseError(what + " at offset " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr one() {
    const char c = text_[pos_];
    if (c == ')') fail("unbalanced ')'");
    if (c == '(') {
      ++pos_;
      SExpr list;
      list.is_list = true;
      for (skip(); pos_ < text_.size() && text_[pos_] != ')'; skip()) list.items.push_back(one());
      if (pos_ >= text_.size()) fail("unterminated list");
      ++pos_;
      return list;
    }
    SExpr atom;
    const std::size_t start = pos_;
    if (c == '"' || c == '|') {
      ++pos_;
      while (pos_ < text_.size()) {
        if (text_[pos_] == c) {
          // SMT-LIB escapes a quote inside a string literal by doubling it.
          if (c == '"' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            pos_ += 2;
            continue;
          }
          break;
        }
        ++pos_;
      }
      if (pos_ >= text_.size()) fail("unterminated literal");
      ++pos_;
    } else {
      while (pos_ < text_.size()) {
        const char d = text_[pos_];
        if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
        ++pos_;
      }
    }
    atom.atom = std::string(text_.substr(start, pos_ - start));
    return atom;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) { return Parser(text).all(); }

}  // namespace prbslice
