#pragma once

// Finite (plus free-rank) abelian groups in invariant-factor form d1 | d2 | ...

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "spaceform/modular.hpp"

namespace spaceform {

class AbelianInvariants {
 public:
  using u64 = modular::u64;

  AbelianInvariants() = default;

  /// Normalizes an arbitrary list of cyclic orders (0 = Z, 1 dropped) to invariant factors.
  static AbelianInvariants from_cyclic_orders(const std::vector<u64>& orders) {
    AbelianInvariants out;
    std::size_t free_rank = 0;
    std::map<u64, std::vector<u64>> prime_powers;
    for (u64 d : orders) {
      if (d == 0) {
        ++free_rank;
        continue;
      }
      for (auto [p, e] : modular::factorize(d)) prime_powers[p].push_back(modular::ipow(p, e));
    }
    std::size_t length = 0;
    for (auto& [p, powers] : prime_powers) {
      std::sort(powers.begin(), powers.end(), std::greater<>());
      length = std::max(length, powers.size());
    }
    // Largest prime powers go into the last factor.
    std::vector<u64> torsion(length, 1);
    for (const auto& [p, powers] : prime_powers)
      for (std::size_t i = 0; i < powers.size(); ++i) torsion[length - 1 - i] *= powers[i];
    out.factors_.assign(free_rank, 0);
    out.factors_.insert(out.factors_.end(), torsion.begin(), torsion.end());
    return out;
  }

  static AbelianInvariants trivial() { return {}; }
  static AbelianInvariants integers() { return from_cyclic_orders({0}); }
  static AbelianInvariants cyclic(u64 m) { return from_cyclic_orders({m}); }

  /// Reconstructs a finite abelian group of the given order from p-power torsion
  /// counts: torsion_count(p^k) = #{x : p^k x = 0}.
  static AbelianInvariants from_torsion_counts(u64 order, const std::function<u64(u64)>& torsion_count) {
    std::vector<u64> orders;
    for (auto [p, e] : modular::factorize(order)) {
      // c_k = log_p |G[p^k]| = sum_i min(k, e_i); c_k - c_{k-1} counts exponents >= k.
      std::vector<unsigned> at_least;
      unsigned previous = 0;
      u64 pk = 1;
      for (unsigned k = 1; k <= e; ++k) {
        pk *= p;
        const unsigned ck = modular::valuation(torsion_count(pk), p);
        at_least.push_back(ck - previous);
        previous = ck;
      }
      for (unsigned k = 1; k <= at_least.size(); ++k) {
        const unsigned with_exactly_k = at_least[k - 1] - (k < at_least.size() ? at_least[k] : 0);
        for (unsigned i = 0; i < with_exactly_k; ++i) orders.push_back(modular::ipow(p, k));
      }
    }
    return from_cyclic_orders(orders);
  }

  const std::vector<u64>& factors() const { return factors_; }
  bool is_trivial() const { return factors_.empty(); }
  bool is_finite() const { return std::find(factors_.begin(), factors_.end(), 0) == factors_.end(); }

  u64 order() const {
    if (!is_finite()) throw DomainError("AbelianInvariants::order: group is infinite");
    u64 n = 1;
    for (u64 d : factors_) n *= d;
    return n;
  }

  /// "0" for the trivial group, otherwise e.g. "Z/2+Z/2" or "Z".
  std::string to_string() const {
    if (factors_.empty()) return "0";
    std::string out;
    for (u64 d : factors_) {
      if (!out.empty()) out += "+";
      out += d == 0 ? "Z" : "Z/" + std::to_string(d);
    }
    return out;
  }

  friend bool operator==(const AbelianInvariants&, const AbelianInvariants&) = default;

 private:
  std::vector<u64> factors_;
};

}  // namespace spaceform
