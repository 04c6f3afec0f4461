#pragma once

// Exact residue arithmetic, unit groups (Z/m)^*, CRT, and the quotient orders
// O(m, n) = |(Z/m)^* / <-1, l^n>| that the space-form counts reduce to.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

namespace spaceform {

/// Raised for mathematically invalid input (bad modulus, non-unit, violated hypothesis).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace modular {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 addmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>((static_cast<u128>(a) + b) % m);
}

// Modulus 1 collapses everything to the residue 0, which then serves as the
// identity of the one-element unit group.
inline u64 powmod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp != 0) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

inline u64 ipow(u64 base, u64 exp) {
  u64 result = 1;
  while (exp-- > 0) result *= base;
  return result;
}

inline u64 lcm(u64 a, u64 b) { return std::lcm(a, b); }

/// Prime factorization by trial division, primes ascending.
inline std::vector<std::pair<u64, unsigned>> factorize(u64 m) {
  std::vector<std::pair<u64, unsigned>> out;
  for (u64 p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
    if (m % p != 0) continue;
    unsigned e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (m > 1) out.emplace_back(m, 1U);
  return out;
}

inline u64 euler_phi(u64 m) {
  if (m == 0) throw DomainError("euler_phi: modulus must be positive");
  u64 result = m;
  for (auto [p, e] : factorize(m)) result = result / p * (p - 1);
  return result;
}

inline bool is_unit(u64 x, u64 m) { return std::gcd(x % m, m) == 1; }

/// Least t >= 1 with u^t = 1 (mod m).
inline u64 multiplicative_order(u64 u, u64 m) {
  if (m == 0) throw DomainError("multiplicative_order: zero modulus");
  if (m == 1) return 1;
  u %= m;
  if (!is_unit(u, m)) throw DomainError("multiplicative_order: " + std::to_string(u) + " is not a unit mod " + std::to_string(m));
  u64 ord = euler_phi(m);
  for (auto [p, e] : factorize(ord)) {
    (void)e;
    while (ord % p == 0 && powmod(u, ord / p, m) == 1) ord /= p;
  }
  return ord;
}

/// Inverse of x modulo m; throws when gcd(x, m) != 1.
inline u64 invmod(u64 x, u64 m) {
  if (m == 1) return 0;
  __int128 r0 = static_cast<__int128>(m), r1 = static_cast<__int128>(x % m);
  __int128 t0 = 0, t1 = 1;
  while (r1 != 0) {
    __int128 q = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
    std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
  }
  if (r0 != 1) throw DomainError("invmod: " + std::to_string(x) + " is not invertible mod " + std::to_string(m));
  if (t0 < 0) t0 += m;
  return static_cast<u64>(t0);
}

/// An element of Z/m.
class Residue {
 public:
  Residue(u64 value, u64 modulus) : modulus_(modulus) {
    if (modulus == 0) throw DomainError("Residue: modulus must be positive");
    value_ = value % modulus;
  }

  u64 value() const { return value_; }
  u64 modulus() const { return modulus_; }

  friend bool operator==(const Residue&, const Residue&) = default;

  friend Residue operator+(const Residue& x, const Residue& y) {
    check_same(x, y);
    return {addmod(x.value_, y.value_, x.modulus_), x.modulus_};
  }
  friend Residue operator*(const Residue& x, const Residue& y) {
    check_same(x, y);
    return {mulmod(x.value_, y.value_, x.modulus_), x.modulus_};
  }
  friend Residue operator-(const Residue& x) { return {(x.modulus_ - x.value_) % x.modulus_, x.modulus_}; }

  Residue pow(u64 e) const { return {powmod(value_, e, modulus_), modulus_}; }
  Residue inverse() const { return {invmod(value_, modulus_), modulus_}; }

 private:
  static void check_same(const Residue& x, const Residue& y) {
    if (x.modulus_ != y.modulus_) throw DomainError("Residue: mixed moduli");
  }

  u64 value_ = 0;
  u64 modulus_ = 1;
};

/// A multiplicatively closed set of units mod m, stored explicitly and sorted.
class UnitSubgroup {
 public:
  UnitSubgroup(u64 modulus, std::vector<u64> elements) : modulus_(modulus), elements_(std::move(elements)) {
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
  }

  u64 modulus() const { return modulus_; }
  const std::vector<u64>& elements() const& { return elements_; }
  std::vector<u64> elements() && { return std::move(elements_); }
  std::size_t size() const { return elements_.size(); }
  bool contains(u64 x) const { return std::binary_search(elements_.begin(), elements_.end(), x % modulus_); }

  friend bool operator==(const UnitSubgroup&, const UnitSubgroup&) = default;

 private:
  u64 modulus_;
  std::vector<u64> elements_;
};

namespace detail {

// Dense bitmap for desk-scale moduli, hash set beyond.
class Membership {
 public:
  explicit Membership(u64 m) : dense_(m <= (u64{1} << 26)) {
    if (dense_) bits_.assign(m, false);
  }
  bool contains(u64 x) const { return dense_ ? bits_[x] : sparse_.count(x) != 0; }
  void insert(u64 x) {
    if (dense_)
      bits_[x] = true;
    else
      sparse_.insert(x);
  }

 private:
  bool dense_;
  std::vector<bool> bits_;
  std::unordered_set<u64> sparse_;
};

}  // namespace detail

/// All residues coprime to m. For m = 1 this is the one-element group {0}.
inline UnitSubgroup unit_group(u64 m) {
  if (m == 0) throw DomainError("unit_group: modulus must be positive");
  std::vector<u64> units;
  for (u64 x = 0; x < m; ++x)
    if (std::gcd(x, m) == 1) units.push_back(x);
  return {m, std::move(units)};
}

/// Smallest subgroup of (Z/m)^* containing gens.
inline UnitSubgroup subgroup_closure(u64 m, const std::vector<u64>& gens) {
  if (m == 0) throw DomainError("subgroup_closure: modulus must be positive");
  const u64 one = 1 % m;
  std::vector<u64> elements{one};
  detail::Membership member(m);
  member.insert(one);
  for (u64 g : gens) {
    g %= m;
    if (!is_unit(g, m)) throw DomainError("subgroup_closure: generator " + std::to_string(g) + " is not a unit mod " + std::to_string(m));
    if (member.contains(g)) continue;
    // The group is abelian, so the new closure is the union of the cosets S g^i.
    const std::vector<u64> base = elements;
    for (u64 power = g; !member.contains(power); power = mulmod(power, g, m)) {
      for (u64 s : base) {
        u64 x = mulmod(s, power, m);
        member.insert(x);
        elements.push_back(x);
      }
    }
  }
  return {m, std::move(elements)};
}

inline std::vector<u64> nth_powers(u64 m, u64 n) {
  std::vector<u64> out;
  for (u64 l : unit_group(m).elements()) out.push_back(powmod(l, n, m));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Order of (Z/m)^* / <image, -1>.
inline u64 relative_O(u64 m, const std::vector<u64>& image) {
  if (m == 0) throw DomainError("relative_O: modulus must be positive");
  std::vector<u64> gens{m - 1};
  for (u64 x : image) {
    if (!is_unit(x, m)) throw DomainError("relative_O: image element " + std::to_string(x) + " is not a unit mod " + std::to_string(m));
    gens.push_back(x % m);
  }
  return euler_phi(m) / subgroup_closure(m, gens).size();
}

inline u64 relative_O(u64 m, const UnitSubgroup& image) {
  if (image.modulus() != m) throw DomainError("relative_O: image lives in a different unit group");
  return relative_O(m, image.elements());
}

/// O(m, n): order of (Z/m)^* / {+-l^n}.
inline u64 big_O(u64 m, u64 n) {
  if (m == 0 || n == 0) throw DomainError("big_O: requires m >= 1 and n >= 1");
  return relative_O(m, nth_powers(m, n));
}

/// Prime-power moduli of m, primes ascending.
inline std::vector<u64> crt_split(u64 m) {
  if (m == 0) throw DomainError("crt_split: modulus must be positive");
  std::vector<u64> out;
  for (auto [p, e] : factorize(m)) out.push_back(ipow(p, e));
  return out;
}

/// Unique residue modulo the product of pairwise coprime moduli.
inline Residue crt_combine(const std::vector<Residue>& parts) {
  u64 value = 0, modulus = 1;
  for (const Residue& r : parts) {
    if (std::gcd(modulus, r.modulus()) != 1) throw DomainError("crt_combine: moduli are not pairwise coprime");
    const u64 next = modulus * r.modulus();
    // value + modulus * t == r (mod r.modulus)
    const u64 diff = (r.value() + r.modulus() - value % r.modulus()) % r.modulus();
    const u64 t = mulmod(diff, invmod(modulus % r.modulus(), r.modulus()), r.modulus());
    value = addmod(value, mulmod(modulus, t, next), next);
    modulus = next;
  }
  return {value, modulus};
}

inline u64 crt_combine(const std::vector<std::pair<u64, u64>>& value_modulus) {
  std::vector<Residue> parts;
  for (auto [v, m] : value_modulus) parts.emplace_back(v, m);
  return crt_combine(parts).value();
}

/// Exponent of p in m.
inline unsigned valuation(u64 m, u64 p) {
  unsigned e = 0;
  while (m != 0 && m % p == 0) {
    m /= p;
    ++e;
  }
  return e;
}

}  // namespace modular
}  // namespace spaceform
