#pragma once

// Crossed homomorphisms Der_alpha(H, Z/a): f(gh) = f(g) + alpha(g) f(h).

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spaceform/autos.hpp"
#include "spaceform/family.hpp"
#include "spaceform/groups.hpp"
#include "spaceform/modular.hpp"

namespace spaceform {

struct Derivation {
  std::vector<u64> generator_values;
  std::vector<u64> values;  // f(h) for every element h; empty when not requested

  friend bool operator==(const Derivation& x, const Derivation& y) { return x.generator_values == y.generator_values; }
};

namespace detail {

// f(g) as a linear form in the generator values, along a BFS spanning tree;
// every non-tree edge contributes one linear constraint mod a.
struct CocycleSystem {
  std::vector<std::vector<u64>> coefficients;  // per element
  std::vector<std::vector<u64>> constraints;
};

inline CocycleSystem cocycle_system(const Group& h, const Character& chi) {
  const u64 a = chi.modulus();
  const std::size_t r = h.generators().size();
  const auto gens = h.generator_elements();
  CocycleSystem sys;
  sys.coefficients.assign(h.order(), {});
  sys.coefficients[0].assign(r, 0);
  std::set<std::vector<u64>> constraints;
  std::vector<Index> queue{0};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const Index g = queue[i];
    for (std::size_t s = 0; s < r; ++s) {
      const Index gs = h.mul(g, gens[s]);
      std::vector<u64> c = sys.coefficients[g];
      c[s] = modular::addmod(c[s], chi(g), a);
      if (sys.coefficients[gs].empty()) {
        sys.coefficients[gs] = std::move(c);
        queue.push_back(gs);
      } else {
        bool zero = true;
        for (std::size_t t = 0; t < r; ++t) {
          c[t] = (c[t] + a - sys.coefficients[gs][t]) % a;
          zero = zero && c[t] == 0;
        }
        if (!zero) constraints.insert(std::move(c));
      }
    }
  }
  sys.constraints.assign(constraints.begin(), constraints.end());
  return sys;
}

}  // namespace detail

/// All derivations, found by assigning values to the canonical generators and
/// completing by the cocycle rule. Sorted by generator values.
inline std::vector<Derivation> enumerate_derivations(const Group& h, const Character& chi, bool with_values = true, u64 max_candidates = 100'000'000) {
  const u64 a = chi.modulus();
  const std::size_t r = h.generators().size();
  double candidates = 1;
  for (std::size_t s = 0; s < r; ++s) candidates *= static_cast<double>(a);
  if (candidates > static_cast<double>(max_candidates))
    throw TooLarge("enumerate_derivations: " + std::to_string(a) + "^" + std::to_string(r) + " candidates exceed the bound");
  const auto sys = detail::cocycle_system(h, chi);
  // Bucket each constraint at its last nonzero coordinate so it is checked as soon as possible.
  std::vector<std::vector<const std::vector<u64>*>> bucket(r);
  for (const auto& c : sys.constraints) {
    std::size_t last = 0;
    for (std::size_t t = 0; t < r; ++t)
      if (c[t] != 0) last = t;
    bucket[last].push_back(&c);
  }
  std::vector<Derivation> out;
  std::vector<u64> x(r, 0);
  auto dfs = [&](auto& self, std::size_t depth) -> void {
    if (depth == r) {
      Derivation d{x, {}};
      if (with_values) {
        d.values.resize(h.order());
        for (Index g = 0; g < h.order(); ++g) {
          u64 value = 0;
          for (std::size_t t = 0; t < r; ++t) value = modular::addmod(value, modular::mulmod(sys.coefficients[g][t], x[t], a), a);
          d.values[g] = value;
        }
      }
      out.push_back(std::move(d));
      return;
    }
    for (u64 value = 0; value < a; ++value) {
      x[depth] = value;
      bool ok = true;
      for (const auto* c : bucket[depth]) {
        u64 sum = 0;
        for (std::size_t t = 0; t <= depth; ++t) sum = modular::addmod(sum, modular::mulmod((*c)[t], x[t], a), a);
        if (sum != 0) {
          ok = false;
          break;
        }
      }
      if (ok) self(self, depth + 1);
    }
    x[depth] = 0;
  };
  dfs(dfs, 0);
  return out;
}

/// {x in Z/a : alpha(h) x = x for all h}.
inline std::vector<u64> fixed_subgroup(u64 a, const std::vector<u64>& generator_images) {
  std::vector<u64> out;
  for (u64 x = 0; x < a; ++x) {
    bool fixed = true;
    for (u64 u : generator_images) fixed = fixed && modular::mulmod(u % a, x, a) == x;
    if (fixed) out.push_back(x);
  }
  return out;
}

inline std::vector<u64> fixed_subgroup(const Character& chi) { return fixed_subgroup(chi.modulus(), chi.generator_images()); }

/// |Der| = |A / A^H| when gcd(|H|, a) = 1.
inline u64 derivation_count_closed_form(const Group& h, const Character& chi) {
  if (std::gcd(h.order(), chi.modulus()) != 1)
    throw DomainError("derivation_count_closed_form: gcd(|H|, a) = " + std::to_string(std::gcd(h.order(), chi.modulus())) + " != 1");
  return chi.modulus() / fixed_subgroup(chi).size();
}

struct PlanComponent {
  u64 prime_power;
  u64 quotient_order;  // order of the cyclic group acting on this component
  u64 generator_unit;  // unit by which its generator acts, mod prime_power
  u64 norm;            // 1 + g + ... + g^(c-1) mod prime_power
  u64 count;           // #{x : norm x = 0}
};

/// Der computed over a cyclic quotient, componentwise over the prime powers of a.
struct DerivationPlan {
  std::string quotient;
  std::optional<u64> n0;
  std::vector<PlanComponent> components;
  u64 count = 1;
};

namespace detail {

// Der(Z/c, Z/q) with the generator acting by g: f is fixed by x = f(1) subject to
// (1 + g + ... + g^(c-1)) x = 0.
inline PlanComponent cyclic_component(u64 q, u64 c, u64 g) {
  u64 norm = 0, power = 1 % q;
  for (u64 i = 0; i < c; ++i) {
    norm = modular::addmod(norm, power, q);
    power = modular::mulmod(power, g % q, q);
  }
  return {q, c, g % q, norm, std::gcd(norm, q)};
}

inline DerivationPlan cyclic_plan(std::string quotient, u64 a, u64 c, u64 g) {
  DerivationPlan plan;
  plan.quotient = std::move(quotient);
  for (u64 q : modular::crt_split(a)) {
    plan.components.push_back(cyclic_component(q, c, g));
    plan.count *= plan.components.back().count;
  }
  return plan;
}

}  // namespace detail

/// Generic plan: for coprime orders Der_alpha(H, A) = Der(H / Ker alpha, A), and
/// on each prime-power component the image of alpha is cyclic.
inline DerivationPlan decompose_derivations(const Group& h, const Character& chi) {
  const u64 a = chi.modulus();
  if (std::gcd(h.order(), a) != 1) throw DomainError("decompose_derivations: gcd(|H|, a) != 1");
  DerivationPlan plan;
  std::set<u64> image(chi.values().begin(), chi.values().end());
  plan.quotient = "H/Ker(alpha), order " + std::to_string(image.size());
  for (u64 q : modular::crt_split(a)) {
    std::set<u64> local;
    for (u64 x : image) local.insert(x % q);
    const u64 c = local.size();
    std::optional<u64> generator;
    for (u64 x : local)
      if (modular::multiplicative_order(x, q) == c) {
        generator = x;
        break;
      }
    if (!generator) throw DomainError("decompose_derivations: image of the action mod " + std::to_string(q) + " is not cyclic");
    plan.components.push_back(detail::cyclic_component(q, c, *generator));
    plan.count *= plan.components.back().count;
  }
  return plan;
}

/// Family plan: Ker(gamma_2) = Q8 x| Z/3^n0 acts trivially, leaving the cyclic
/// quotient Z/b x Z/3^(n-n0) generated by an element acting by u v (T family);
/// for O the quotient is Z/b x Z/2 acting by u w, or Z/b when w = 1.
inline DerivationPlan decompose_derivations(const FamilyParams& params) {
  params.validate();
  const u64 a = params.a;
  if (params.family == Family::T) {
    const u64 n0 = params.n0();
    const u64 c = params.b * modular::ipow(3, params.n - n0);
    auto plan = detail::cyclic_plan("Z/" + std::to_string(params.b) + " x Z/3^" + std::to_string(params.n - n0), a, c,
                                    modular::mulmod(params.u % a, params.v % a, a));
    plan.n0 = n0;
    return plan;
  }
  if (params.w % a == 1 % a) return detail::cyclic_plan("Z/" + std::to_string(params.b), a, params.b, params.u);
  return detail::cyclic_plan("Z/" + std::to_string(params.b) + " x Z/2", a, 2 * params.b, modular::mulmod(params.u % a, params.w % a, a));
}

/// Checks the cocycle identity on all pairs.
inline bool is_derivation(const Group& h, const Character& chi, const std::vector<u64>& values) {
  const u64 a = chi.modulus();
  for (Index g = 0; g < h.order(); ++g)
    for (Index k = 0; k < h.order(); ++k)
      if (values[h.mul(g, k)] != modular::addmod(values[g], modular::mulmod(chi(g), values[k], a), a)) return false;
  return true;
}

}  // namespace spaceform
