#pragma once

// Group descriptors for the families the library knows how to build, plus the
// action data (u, v, w) of the semidirect families Z/a x| H.

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "spaceform/modular.hpp"

namespace spaceform {

/// Unit images of the complement's role generators in (Z/modulus)^*.
/// u: cyclic generators, v: the X generator of T*(n), w: the R generator of O*(n) and Q16.
struct Action {
  modular::u64 modulus = 1;
  modular::u64 u = 1;
  modular::u64 v = 1;
  modular::u64 w = 1;

  friend bool operator==(const Action&, const Action&) = default;
};

struct Roles {
  bool u = false;
  bool v = false;
  bool w = false;
};

struct GroupSpec {
  using u64 = modular::u64;
  enum class Kind { Cyclic, Q8, Q16, TStar, OStar, Direct, Semidirect };

  Kind kind = Kind::Cyclic;
  u64 param = 1;  // m for Cyclic, n for TStar/OStar, a for Semidirect
  std::vector<GroupSpec> children;
  Action action;

  static GroupSpec cyclic(u64 m) {
    if (m == 0) throw DomainError("C(m) requires m >= 1");
    return {Kind::Cyclic, m, {}, {}};
  }
  static GroupSpec q8() { return {Kind::Q8, 0, {}, {}}; }
  static GroupSpec q16() { return {Kind::Q16, 0, {}, {}}; }
  static GroupSpec tstar(u64 n) {
    if (n == 0) throw DomainError("T*(n) requires n >= 1");
    return {Kind::TStar, n, {}, {}};
  }
  static GroupSpec ostar(u64 n) {
    if (n == 0) throw DomainError("O*(n) requires n >= 1");
    return {Kind::OStar, n, {}, {}};
  }
  static GroupSpec direct(GroupSpec left, GroupSpec right) { return {Kind::Direct, 0, {std::move(left), std::move(right)}, {}}; }
  static GroupSpec semidirect(u64 a, GroupSpec complement, Action action) {
    if (a == 0) throw DomainError("semidirect product needs a >= 1");
    action.modulus = a;
    return {Kind::Semidirect, a, {std::move(complement)}, action};
  }

  bool is_composite() const { return kind == Kind::Direct || kind == Kind::Semidirect; }

  u64 order() const {
    switch (kind) {
      case Kind::Cyclic: return param;
      case Kind::Q8: return 8;
      case Kind::Q16: return 16;
      case Kind::TStar: return 8 * modular::ipow(3, param);
      case Kind::OStar: return 16 * modular::ipow(3, param);
      case Kind::Direct: return children[0].order() * children[1].order();
      case Kind::Semidirect: return param * children[0].order();
    }
    return 0;
  }

  /// Which action roles have a generator inside this (complement) spec.
  Roles roles() const {
    switch (kind) {
      case Kind::Cyclic: return {true, false, false};
      case Kind::TStar: return {false, true, false};
      case Kind::OStar:
      case Kind::Q16: return {false, false, true};
      case Kind::Direct: {
        Roles l = children[0].roles(), r = children[1].roles();
        return {l.u || r.u, l.v || r.v, l.w || r.w};
      }
      default: return {};
    }
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::Cyclic: return "C(" + std::to_string(param) + ")";
      case Kind::Q8: return "Q8";
      case Kind::Q16: return "Q16";
      case Kind::TStar: return "T*(" + std::to_string(param) + ")";
      case Kind::OStar: return "O*(" + std::to_string(param) + ")";
      case Kind::Direct: {
        const GroupSpec& l = children[0];
        const GroupSpec& r = children[1];
        std::string ls = l.kind == Kind::Semidirect ? "(" + l.to_string() + ")" : l.to_string();
        std::string rs = r.is_composite() ? "(" + r.to_string() + ")" : r.to_string();
        return ls + "x" + rs;
      }
      case Kind::Semidirect: {
        const GroupSpec& h = children[0];
        std::string hs = h.is_composite() ? "(" + h.to_string() + ")" : h.to_string();
        return "C(" + std::to_string(param) + ")x" + hs + "[" + action_string() + "]";
      }
    }
    return {};
  }

  std::string action_string() const {
    const Roles r = children.empty() ? Roles{} : children[0].roles();
    std::string out;
    auto add = [&](const char* name, u64 value) {
      if (!out.empty()) out += ",";
      out += std::string(name) + "=" + std::to_string(value);
    };
    if (r.u) add("u", action.u);
    if (r.v) add("v", action.v);
    if (r.w) add("w", action.w);
    return out;
  }

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

/// Checks the generator-image order conditions of a semidirect spec:
/// units mod a, u^b = 1 for every cyclic factor C(b), v^(3^n) = 1, w^2 = 1.
inline void validate_action(const GroupSpec& spec) {
  using modular::powmod;
  if (spec.kind != GroupSpec::Kind::Semidirect) return;
  const auto a = spec.param;
  const Action& act = spec.action;
  const GroupSpec& h = spec.children[0];
  if (std::gcd(a, h.order()) != 1)
    throw DomainError("semidirect product needs gcd(a, |H|) = 1, got a=" + std::to_string(a) + ", |H|=" + std::to_string(h.order()));
  const Roles roles = h.roles();
  auto check_unit = [&](const char* name, bool used, modular::u64 x) {
    if (used && !modular::is_unit(x, a)) throw DomainError(std::string("invalid action: ") + name + "=" + std::to_string(x) + " is not a unit mod " + std::to_string(a));
  };
  check_unit("u", roles.u, act.u);
  check_unit("v", roles.v, act.v);
  check_unit("w", roles.w, act.w);
  auto visit = [&](const auto& self, const GroupSpec& s) -> void {
    switch (s.kind) {
      case GroupSpec::Kind::Cyclic:
        if (powmod(act.u, s.param, a) != 1 % a)
          throw DomainError("invalid action: u^" + std::to_string(s.param) + " != 1 mod " + std::to_string(a));
        break;
      case GroupSpec::Kind::TStar:
        if (powmod(act.v, modular::ipow(3, s.param), a) != 1 % a)
          throw DomainError("invalid action: v^(3^" + std::to_string(s.param) + ") != 1 mod " + std::to_string(a));
        break;
      case GroupSpec::Kind::OStar:
      case GroupSpec::Kind::Q16:
        if (powmod(act.w, 2, a) != 1 % a) throw DomainError("invalid action: w^2 != 1 mod " + std::to_string(a));
        break;
      case GroupSpec::Kind::Direct:
        self(self, s.children[0]);
        self(self, s.children[1]);
        break;
      default: break;
    }
  };
  visit(visit, h);
}

}  // namespace spaceform
