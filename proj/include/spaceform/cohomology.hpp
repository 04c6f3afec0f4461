#pragma once

// Integral cohomology tables of the periodic families, least periods, and the
// degree-2 check H^2(G; Z) = Hom(G_ab, Q/Z) = G_ab.

#include <string>

#include "spaceform/abelian.hpp"
#include "spaceform/family.hpp"
#include "spaceform/group_spec.hpp"
#include "spaceform/groups.hpp"
#include "spaceform/modular.hpp"

namespace spaceform {

/// lcm of the multiplicative orders of the action images relevant to the complement.
inline u64 ell(const GroupSpec& semidirect) {
  if (semidirect.kind != GroupSpec::Kind::Semidirect) return 1;
  const Roles roles = semidirect.children[0].roles();
  const Action& act = semidirect.action;
  u64 out = 1;
  if (roles.u) out = std::lcm(out, modular::multiplicative_order(act.u, act.modulus));
  if (roles.v) out = std::lcm(out, modular::multiplicative_order(act.v, act.modulus));
  if (roles.w) out = std::lcm(out, modular::multiplicative_order(act.w, act.modulus));
  return out;
}

inline u64 ell(const Action& act) {
  u64 out = 1;
  for (u64 x : {act.u, act.v, act.w}) out = std::lcm(out, modular::multiplicative_order(x, act.modulus));
  return out;
}

namespace detail {

// Half-period d of a periodic complement: 1 for cyclic groups, 2 for the quaternion families.
inline u64 half_period(const GroupSpec& s) {
  switch (s.kind) {
    case GroupSpec::Kind::Cyclic: return 1;
    case GroupSpec::Kind::Direct: return std::lcm(half_period(s.children[0]), half_period(s.children[1]));
    case GroupSpec::Kind::Semidirect: return std::lcm(ell(s), half_period(s.children[0]));
    default: return 2;
  }
}

}  // namespace detail

/// Cyclic: 2. Q8, Q16, T*(n), O*(n): 4. Z/a x| H: 2[ell, d] with 2d the period of H.
inline u64 least_period(const GroupSpec& spec) { return 2 * detail::half_period(spec); }

class CohomologyTable {
 public:
  explicit CohomologyTable(GroupSpec spec) : spec_(std::move(spec)), period_(least_period(spec_)) {}

  const GroupSpec& spec() const { return spec_; }
  u64 period() const { return period_; }

  AbelianInvariants at(u64 k) const {
    using K = GroupSpec::Kind;
    using AI = AbelianInvariants;
    if (k == 0) return AI::integers();
    switch (spec_.kind) {
      case K::Cyclic: return k % 2 == 1 ? AI::trivial() : AI::cyclic(spec_.param);
      case K::Q8:
        if (k % 2 == 1) return AI::trivial();
        return k % 4 == 2 ? AI::from_cyclic_orders({2, 2}) : AI::cyclic(8);
      case K::Q16:
        // The degree-2 value is Z/2+Z/2 (the abelianization), not a group with a free summand.
        if (k % 2 == 1) return AI::trivial();
        return k % 4 == 2 ? AI::from_cyclic_orders({2, 2}) : AI::cyclic(16);
      case K::TStar: {
        const u64 three = modular::ipow(3, spec_.param);
        if (k % 2 == 1) return AI::trivial();
        return k % 4 == 2 ? AI::cyclic(three) : AI::cyclic(8 * three);
      }
      case K::OStar: {
        const u64 three = modular::ipow(3, spec_.param);
        if (k % 2 == 1) return AI::trivial();
        return k % 4 == 2 ? AI::cyclic(2) : AI::cyclic(16 * three);
      }
      case K::Semidirect:
        if (k % period_ == 0) return AI::cyclic(spec_.order());
        throw DomainError("cohomology of " + spec_.to_string() + " is tabulated only in degrees divisible by the period " + std::to_string(period_));
      case K::Direct: break;
    }
    throw DomainError("no cohomology table for " + spec_.to_string());
  }

 private:
  GroupSpec spec_;
  u64 period_;
};

inline CohomologyTable cohomology_table(const GroupSpec& spec) {
  if (spec.kind == GroupSpec::Kind::Direct) throw DomainError("no cohomology table for direct product " + spec.to_string());
  return CohomologyTable(spec);
}

/// The printed degree-2 entry for Q16 (Z + Z/2) that the table replaces by Z/2 + Z/2.
struct TableDiscrepancy {
  std::string group;
  u64 degree;
  std::string printed;
  std::string encoded;
  std::string oracle;
};

inline std::vector<TableDiscrepancy> table_discrepancies() {
  const Group q16 = build(GroupSpec::q16());
  return {{"Q16", 2, "Z+Z/2", cohomology_table(GroupSpec::q16()).at(2).to_string(), abelianization(q16).to_string()}};
}

/// H^2(G; Z) for finite G, via the abelianization.
inline AbelianInvariants h2_oracle(const Group& g) { return abelianization(g); }

}  // namespace spaceform
