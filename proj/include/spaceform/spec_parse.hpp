#pragma once

// Parser for the group-spec mini-language:
//
//   spec    := product [ '[' assigns ']' ]
//   product := atom { 'x' atom }                  (left associative)
//   atom    := 'C(' int ')' | 'Q8' | 'Q16' | 'T*(' int ')' | 'O*(' int ')' | '(' spec ')'
//   assigns := [ name '=' int { ',' name '=' int } ]      name in u, v, w
//
// A bracketed product "C(a) x H [..]" is the semidirect product Z/a x| H; the
// left factor must then be cyclic. Whitespace is ignored.

#include <cctype>
#include <string>

#include "spaceform/group_spec.hpp"

namespace spaceform {

class ParseError : public DomainError {
 public:
  ParseError(std::size_t column, const std::string& message)
      : DomainError("parse error at column " + std::to_string(column) + ": " + message), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

namespace detail {

class SpecParser {
 public:
  explicit SpecParser(std::string text) : text_(std::move(text)) {}

  GroupSpec parse() {
    GroupSpec spec = parse_spec();
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input '" + text_.substr(pos_) + "'");
    return spec;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(pos_ + 1, message); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(const std::string& token) {
    skip();
    if (text_.compare(pos_, token.size(), token) == 0) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(const std::string& token) {
    if (!accept(token)) fail("expected '" + token + "'");
  }

  modular::u64 integer() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a non-negative integer");
    if (pos_ - start > 18) fail("integer too large");
    return std::stoull(text_.substr(start, pos_ - start));
  }

  GroupSpec parse_spec() {
    const std::size_t start = pos_;
    GroupSpec spec = parse_product();
    if (!accept("[")) return spec;
    if (spec.kind != GroupSpec::Kind::Direct || spec.children[0].kind != GroupSpec::Kind::Cyclic) {
      pos_ = start;
      fail("an action [..] needs the form C(a)xH");
    }
    const modular::u64 a = spec.children[0].param;
    GroupSpec complement = spec.children[1];
    const Roles roles = complement.roles();
    Action action;
    action.modulus = a;
    skip();
    if (!accept("]")) {
      do {
        skip();
        const std::size_t name_pos = pos_;
        if (pos_ >= text_.size()) fail("expected an action name");
        const char name = text_[pos_++];
        expect("=");
        const modular::u64 value = integer();
        const bool used = (name == 'u' && roles.u) || (name == 'v' && roles.v) || (name == 'w' && roles.w);
        if (!used) {
          pos_ = name_pos;
          fail(std::string("action name '") + name + "' does not apply to " + complement.to_string());
        }
        (name == 'u' ? action.u : name == 'v' ? action.v : action.w) = value % a;
      } while (accept(","));
      expect("]");
    }
    // Unassigned roles act trivially; residues are canonical mod a (all 0 when a = 1).
    action.u %= a;
    action.v %= a;
    action.w %= a;
    GroupSpec out = GroupSpec::semidirect(a, complement, action);
    try {
      validate_action(out);
    } catch (const DomainError& e) {
      pos_ = start;
      fail(e.what());
    }
    return out;
  }

  GroupSpec parse_product() {
    GroupSpec left = parse_atom();
    while (accept("x")) left = GroupSpec::direct(std::move(left), parse_atom());
    return left;
  }

  GroupSpec parse_atom() {
    skip();
    const std::size_t start = pos_;
    auto parameter = [&](modular::u64 min) {
      expect("(");
      const std::size_t at = pos_;
      const modular::u64 value = integer();
      if (value < min) {
        pos_ = at;
        fail("parameter must be >= " + std::to_string(min));
      }
      expect(")");
      return value;
    };
    if (accept("C")) return GroupSpec::cyclic(parameter(1));
    if (accept("Q16")) return GroupSpec::q16();
    if (accept("Q8")) return GroupSpec::q8();
    if (accept("T*")) return GroupSpec::tstar(parameter(1));
    if (accept("O*")) return GroupSpec::ostar(parameter(1));
    if (accept("(")) {
      GroupSpec inner = parse_spec();
      expect(")");
      return inner;
    }
    pos_ = start;
    fail("unknown group family");
  }

  std::string text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline GroupSpec parse_group_spec(const std::string& text) { return detail::SpecParser(text).parse(); }

inline std::string print_group_spec(const GroupSpec& spec) { return spec.to_string(); }

}  // namespace spaceform
