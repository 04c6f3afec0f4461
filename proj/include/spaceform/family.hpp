#pragma once

// Parameters of the two semidirect families Z/a x| (Z/b x T*(n)) and
// Z/a x| (Z/b x O*(n)), with the quantities derived from them.

#include <numeric>
#include <string>

#include "spaceform/group_spec.hpp"
#include "spaceform/modular.hpp"

namespace spaceform {

enum class Family { T, O };

inline const char* family_name(Family f) { return f == Family::T ? "T" : "O"; }

struct FamilyParams {
  using u64 = modular::u64;

  Family family = Family::T;
  u64 a = 1;
  u64 b = 1;
  u64 n = 1;
  u64 k = 1;
  u64 u = 1;  // image of the Z/b generator in (Z/a)^*
  u64 v = 1;  // image of X (T family)
  u64 w = 1;  // image of R (O family)

  friend bool operator==(const FamilyParams&, const FamilyParams&) = default;

  u64 three_n() const { return modular::ipow(3, n); }
  u64 two_part() const { return family == Family::T ? 8 : 16; }
  u64 factor_order() const { return two_part() * three_n(); }
  u64 complement_order() const { return b * factor_order(); }
  /// |G| for G = Z/a x| (Z/b x F); H^{2K}(G) = Z/N.
  u64 N() const { return a * complement_order(); }

  void validate() const {
    if (a == 0 || b == 0 || n == 0 || k == 0) throw DomainError("family parameters a, b, n, k must be positive");
    if (std::gcd(a, b) != 1) throw DomainError("hypothesis (a,b)=1 violated: a=" + std::to_string(a) + ", b=" + std::to_string(b));
    if (std::gcd(a * b, u64{6}) != 1) throw DomainError("hypothesis (ab,6)=1 violated: ab=" + std::to_string(a * b));
    auto unit = [&](const char* name, u64 x) {
      if (!modular::is_unit(x, a)) throw DomainError(std::string("invalid action: ") + name + "=" + std::to_string(x) + " is not a unit mod " + std::to_string(a));
    };
    unit("u", u);
    if (modular::powmod(u, b, a) != 1 % a) throw DomainError("invalid action: u^b != 1 mod a");
    if (family == Family::T) {
      unit("v", v);
      if (modular::powmod(v, three_n(), a) != 1 % a) throw DomainError("invalid action: v^(3^n) != 1 mod a");
      if (w % a != 1 % a) throw DomainError("w applies to the O family only");
    } else {
      unit("w", w);
      if (modular::powmod(w, 2, a) != 1 % a) throw DomainError("invalid action: w^2 != 1 mod a");
      if (v % a != 1 % a) throw DomainError("v applies to the T family only");
    }
  }

  /// lcm of the multiplicative orders of the action images.
  u64 ell() const {
    const u64 second = family == Family::T ? v : w;
    return std::lcm(modular::multiplicative_order(u, a), modular::multiplicative_order(second, a));
  }

  /// K = k [ell, 2]; the top cohomology degree is 2K.
  u64 K() const { return k * std::lcm(ell(), u64{2}); }

  /// T family: n0 = n - log_3 ord(v), so Ker(gamma_2) = Q8 x| Z/3^n0.
  u64 n0() const {
    if (family == Family::O) return n;
    u64 ord = modular::multiplicative_order(v, a);
    u64 e = 0;
    while (ord % 3 == 0) {
      ord /= 3;
      ++e;
    }
    if (ord != 1 || e > n) throw DomainError("invalid action: ord(v) is not a power of 3 dividing 3^n");
    return n - e;
  }

  Action action() const { return {a, u % a, v % a, w % a}; }

  GroupSpec factor_spec() const { return family == Family::T ? GroupSpec::tstar(n) : GroupSpec::ostar(n); }
  GroupSpec complement_spec() const { return GroupSpec::direct(GroupSpec::cyclic(b), factor_spec()); }
  GroupSpec spec() const { return GroupSpec::semidirect(a, complement_spec(), action()); }

  std::string label() const {
    std::string out = std::string(family_name(family)) + " a=" + std::to_string(a) + " b=" + std::to_string(b) + " n=" + std::to_string(n) +
                      " u=" + std::to_string(u % a);
    out += family == Family::T ? " v=" + std::to_string(v % a) : " w=" + std::to_string(w % a);
    return out + " k=" + std::to_string(k);
  }
};

}  // namespace spaceform
