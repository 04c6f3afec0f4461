#pragma once

// Named assertion suites: each criterion recomputes its values from scratch and
// reports pass/fail with a short detail line.

#include <chrono>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "spaceform/autos.hpp"
#include "spaceform/cohomology.hpp"
#include "spaceform/derivations.hpp"
#include "spaceform/groups.hpp"
#include "spaceform/spaceforms.hpp"
#include "spaceform/spec_parse.hpp"

namespace spaceform::verify {

inline constexpr const char* kSuiteVersion = "1";

struct CriterionResult {
  int id;
  std::string name;
  bool passed;
  std::string detail;
  double seconds;
};

namespace detail {

struct Checker {
  bool ok = true;
  std::string first;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      first = what;
    }
  }
};

// S_n from permutations, identity first, generated by a transposition and an n-cycle.
inline Group symmetric_group(int n) {
  std::vector<std::vector<int>> perms;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  std::map<std::vector<int>, Index> index;
  for (Index i = 0; i < perms.size(); ++i) index[perms[i]] = i;
  const u64 size = perms.size();
  std::vector<Index> table(size * size);
  for (Index i = 0; i < size; ++i)
    for (Index j = 0; j < size; ++j) {
      std::vector<int> c(n);
      for (int x = 0; x < n; ++x) c[x] = perms[i][perms[j][x]];
      table[i * size + j] = index[c];
    }
  std::vector<int> t(n), c(n);
  std::iota(t.begin(), t.end(), 0);
  std::swap(t[0], t[1]);
  for (int x = 0; x < n; ++x) c[x] = (x + 1) % n;
  return Group::from_table(size, table, {{"t", index[t], 0}, {"c", index[c], 0}}, {}, "S" + std::to_string(n));
}

inline std::optional<Character> random_character(const Group& h, u64 a, std::mt19937_64& rng) {
  const auto units = modular::unit_group(a).elements();
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<u64> images;
    for (Index g : h.generator_elements()) {
      std::vector<u64> ok;
      for (u64 u : units)
        if (h.element_order(g) % modular::multiplicative_order(u, a) == 0) ok.push_back(u);
      images.push_back(ok[rng() % ok.size()]);
    }
    try {
      return Character::from_generator_images(h, a, images);
    } catch (const DomainError&) {
    }
  }
  return std::nullopt;
}

inline FamilyParams family(Family f, u64 a, u64 b, u64 n, u64 k, u64 u = 1, u64 x = 1) {
  FamilyParams p{f, a, b, n, k, u, 1, 1};
  (f == Family::T ? p.v : p.w) = x;
  p.validate();
  return p;
}

inline std::string str(u64 x) { return std::to_string(x); }

}  // namespace detail

inline CriterionResult presentation_soundness() {
  detail::Checker c;
  std::vector<GroupSpec> specs{GroupSpec::q8(), GroupSpec::q16()};
  for (u64 n = 1; n <= 3; ++n) specs.push_back(GroupSpec::tstar(n));
  for (u64 n = 1; n <= 3; ++n) specs.push_back(GroupSpec::ostar(n));
  for (const auto& s : specs) {
    const Group g = build(s);
    const auto report = verify_presentation(g);
    c.expect(report.passed, s.to_string() + ": presentation failed at " + report.first_failure.value_or(""));
    const u64 three = modular::ipow(3, s.param);
    const u64 literal = s.kind == GroupSpec::Kind::Q8 ? 8 : s.kind == GroupSpec::Kind::Q16 ? 16 : s.kind == GroupSpec::Kind::TStar ? 8 * three : 16 * three;
    c.expect(g.order() == literal && report.element_count == literal, s.to_string() + ": order " + detail::str(g.order()));
    if (g.order() <= 500) {
      const auto failure = check_group_axioms(g);
      c.expect(!failure, s.to_string() + ": " + failure.value_or(""));
    }
  }
  return {1, "presentation soundness", c.ok, c.ok ? "Q8, Q16, T*(1..3), O*(1..3): relations, orders, exhaustive axioms" : c.first, 0};
}

inline CriterionResult structural_facts() {
  detail::Checker c;
  for (u64 n = 1; n <= 3; ++n) {
    const Group t = build(GroupSpec::tstar(n));
    const auto z = center(t).invariants, ab = abelianization(t);
    c.expect(z == AbelianInvariants::from_cyclic_orders({2, modular::ipow(3, n - 1)}), "center(T*(" + detail::str(n) + ")) = " + z.to_string());
    c.expect(ab == AbelianInvariants::cyclic(modular::ipow(3, n)), "abelianization(T*(" + detail::str(n) + ")) = " + ab.to_string());
    const Group o = build(GroupSpec::ostar(n));
    c.expect(center(o).invariants == AbelianInvariants::cyclic(2), "center(O*(" + detail::str(n) + ")) = " + center(o).invariants.to_string());
    c.expect(abelianization(o) == AbelianInvariants::cyclic(2), "abelianization(O*(" + detail::str(n) + ")) = " + abelianization(o).to_string());
  }
  return {2, "center and abelianization", c.ok, c.ok ? "Z(T*(n)) = [2,3^(n-1)], T*(n)ab = [3^n], Z(O*(n)) = O*(n)ab = [2], n=1..3" : c.first, 0};
}

inline CriterionResult h2_oracle_check() {
  detail::Checker c;
  std::vector<GroupSpec> specs{GroupSpec::q8()};
  for (u64 n = 1; n <= 3; ++n) {
    specs.push_back(GroupSpec::tstar(n));
    specs.push_back(GroupSpec::ostar(n));
  }
  for (u64 m = 1; m <= 50; ++m) specs.push_back(GroupSpec::cyclic(m));
  for (const auto& s : specs) {
    const auto oracle = h2_oracle(build(s)), table = cohomology_table(s).at(2);
    c.expect(oracle == table, s.to_string() + ": oracle " + oracle.to_string() + " vs table " + table.to_string());
  }
  const auto report = reconcile({GridCell::lens_space(5, 2)});
  bool q16 = false;
  for (const auto& d : report.tables) q16 = q16 || (d.group == "Q16" && d.printed == "Z+Z/2" && d.encoded == "Z/2+Z/2" && d.oracle == "Z/2+Z/2");
  c.expect(q16, "Q16 discrepancy missing from reconciliation report");
  return {3, "H2 oracle", c.ok, c.ok ? detail::str(specs.size()) + " groups agree; Q16 [2,2] vs printed Z+Z/2 reported" : c.first, 0};
}

inline CriterionResult automorphism_counts() {
  detail::Checker c;
  const Group q8 = build(GroupSpec::q8());
  const auto aq8 = enumerate_automorphisms(q8);
  c.expect(aq8.size() == 24, "|Aut(Q8)| = " + detail::str(aq8.size()));
  const Group s4 = detail::symmetric_group(4);
  c.expect(!search_homomorphisms(automorphism_group(q8, aq8), s4, true).empty(), "no isomorphism Aut(Q8) -> S4 found");
  for (u64 n = 1; n <= 2; ++n) {
    const Group o = build(GroupSpec::ostar(n));
    const u64 aut = enumerate_automorphisms(o).size(), inn = inner_automorphisms(o).size();
    const u64 expected = inn * 2 * modular::ipow(3, n - 1);
    c.expect(aut == expected, "|Aut(O*(" + detail::str(n) + "))| = " + detail::str(aut) + " vs |Inn|*2*3^(n-1) = " + detail::str(expected));
    c.expect(aut == (n == 1 ? 48u : 432u), "|Aut(O*(" + detail::str(n) + "))| = " + detail::str(aut));
    c.expect(inn == (n == 1 ? 24u : 72u), "|Inn(O*(" + detail::str(n) + "))| = " + detail::str(inn));
  }
  return {4, "automorphism counts", c.ok, c.ok ? "|Aut(Q8)| = 24 = |S4| (isomorphism found), |Aut(O*1)| = 48, |Aut(O*2)| = 72*6 = 432" : c.first, 0};
}

inline CriterionResult splitting_sequence() {
  detail::Checker c;
  std::string detail_line;
  for (const char* text : {"C(5)xC(4)[u=2]", "C(7)xC(3)[u=2]"}) {
    const Group g = build(parse_group_spec(text));
    const auto& spec = *g.spec();
    const u64 a = spec.param;
    const Group h = build(spec.children[0]);
    const Character chi = Character::from_action(h, spec.action);
    const auto auts = enumerate_automorphisms(g);
    const u64 der = enumerate_derivations(h, chi, false).size();
    const auto fixing = aut_fixing_action(h, chi);
    c.expect(auts.size() == der * modular::euler_phi(a) * fixing.size(), std::string(text) + ": |Aut| = " + detail::str(auts.size()));
    std::set<SplitAutomorphism> image, expected;
    for (const auto& phi : auts) image.insert(split_semidirect_automorphism(g, phi));
    for (u64 l : modular::unit_group(a).elements())
      for (const auto& f : fixing) expected.insert({l, f.images});
    c.expect(image == expected, std::string(text) + ": psi-image differs from Aut(A) x Aut_alpha(G)");
    detail_line += std::string(detail_line.empty() ? "" : "; ") + text + " |Aut| = " + detail::str(der) + "*" + detail::str(modular::euler_phi(a)) + "*" +
                   detail::str(fixing.size()) + " = " + detail::str(auts.size());
  }
  return {5, "splitting sequence", c.ok, c.ok ? detail_line : c.first, 0};
}

inline CriterionResult derivation_counts() {
  detail::Checker c;
  std::mt19937_64 rng(20240611);
  const std::vector<std::string> hs{"C(1)", "C(2)", "C(3)", "C(4)", "C(5)", "C(6)", "C(8)", "C(9)", "C(10)", "C(12)", "Q8", "T*(1)", "C(3)xQ8", "C(2)xC(4)", "C(5)xC(3)[u=1]"};
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Group h = build(parse_group_spec(hs[rng() % hs.size()]));
    std::vector<u64> as;
    for (u64 a = 2; a * h.order() <= 5000 && a <= 61; ++a)
      if (std::gcd(a, h.order()) == 1) as.push_back(a);
    if (as.empty()) continue;
    const u64 a = as[rng() % as.size()];
    const auto chi = detail::random_character(h, a, rng);
    if (!chi) continue;
    const u64 brute = enumerate_derivations(h, *chi, false).size();
    const u64 closed = derivation_count_closed_form(h, *chi);
    const u64 plan = decompose_derivations(h, *chi).count;
    c.expect(brute == closed && closed == plan, h.label() + " a=" + detail::str(a) + ": " + detail::str(brute) + "/" + detail::str(closed) + "/" + detail::str(plan));
    ++checked;
  }
  c.expect(checked >= 20, "only " + std::to_string(checked) + " instances");
  return {6, "derivation counts", c.ok, c.ok ? std::to_string(checked) + " coprime instances: brute force = a/|A^H| = plan" : c.first, 0};
}

inline CriterionResult lens_and_selfeq() {
  detail::Checker c;
  for (u64 m = 1; m <= 50; ++m)
    for (u64 k = 1; k <= 6; ++k) {
      c.expect(lens_count(m, k) == lens_orbit_enumeration(m, k), "lens(" + detail::str(m) + "," + detail::str(k) + ")");
      if (m <= 2) continue;
      std::vector<u64> kernel;
      for (u64 l = 1; l < m; ++l) {
        if (std::gcd(l, m) != 1) continue;
        u64 p = 1;
        for (u64 i = 0; i < k; ++i) p = p * l % m;
        if (p == 1 || p == m - 1) kernel.push_back(l);
      }
      c.expect(selfeq_lens(m, k).elements == kernel, "selfeq_lens(" + detail::str(m) + "," + detail::str(k) + ")");
    }
  c.expect(lens_count(5, 2) == 2, "lens(5,2) != 2");
  c.expect(selfeq_lens(5, 2).order == 4, "selfeq_lens(5,2) order != 4");
  return {7, "lens counts and self-equivalences", c.ok, c.ok ? "m <= 50, k <= 6 match orbit/kernel enumeration; lens(5,2) = 2, |E(5,2)| = 4" : c.first, 0};
}

inline CriterionResult oracle_spot_values() {
  detail::Checker c;
  const auto t = detail::family(Family::T, 1, 1, 1, 1), o = detail::family(Family::O, 1, 1, 1, 1);
  const u64 ot = orbit_count_oracle(t).count, oo = orbit_count_oracle(o).count;
  // Independent confirmation: enumerate Aut of the whole group directly.
  const u64 rt = raw_group_check(t).count, ro = raw_group_check(o).count;
  c.expect(ot == 4 && rt == 4, "T: oracle " + detail::str(ot) + ", whole-group " + detail::str(rt));
  c.expect(oo == 4 && ro == 4, "O: oracle " + detail::str(oo) + ", whole-group " + detail::str(ro));
  return {8, "orbit oracle spot values", c.ok, c.ok ? "T and O at a=b=n=k=1: factorwise 4, whole-group enumeration 4" : c.first, 0};
}

inline CriterionResult formula_values() {
  detail::Checker c;
  const Rational v1 = formula_count_T(detail::family(Family::T, 1, 1, 3, 1), {0, 0});
  const Rational v2 = formula_count_T(5, 1, 3, 0, 2, {0}, {0, 0});
  const Rational v3 = formula_count_O(detail::family(Family::O, 1, 1, 1, 1), {0, 0});
  const Rational v4 = formula_count_O(detail::family(Family::O, 5, 1, 2, 1), {0, 0});
  c.expect(v1 == Rational(54), "T a=b=1 n=3: " + to_string(v1));
  c.expect(v2 == Rational(4), "T a=5 n=3 n0=0 K=2: " + to_string(v2));
  c.expect(v3 == Rational(2), "O a=b=1 n=1: " + to_string(v3));
  c.expect(v4 == Rational(12), "O a=5 n=2: " + to_string(v4));
  return {9, "formula evaluation", c.ok, c.ok ? "54, 4, 2, 12" : c.first, 0};
}

inline CriterionResult reconciliation() {
  detail::Checker c;
  const auto grid = default_grid();
  const auto start = std::chrono::steady_clock::now();
  const auto first = reconcile(grid);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto second = reconcile(grid);
  std::size_t consistent = 0, recorded = 0;
  bool anomaly = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& x = first.cells[i];
    const auto& y = second.cells[i];
    c.expect(x.error.empty(), x.label + ": " + x.error);
    c.expect(x.label == y.label && x.oracle == y.oracle && x.verdict == y.verdict && x.flags == y.flags, x.label + ": not deterministic");
    c.expect(x.oracle.has_value() && !x.formulas.empty() && !x.verdict.empty(), x.label + ": incomplete cell");
    const bool matched = std::any_of(x.formulas.begin(), x.formulas.end(), [](const FormulaEntry& f) { return f.matches; });
    if (x.verdict == "consistent") {
      ++consistent;
      c.expect(matched, x.label + ": consistent without a matching (t,t')");
    } else {
      ++recorded;
    }
    if (x.params.family == Family::T && x.params.a == 1 && x.params.b == 1 && x.params.n == 1 && x.params.k == 1)
      anomaly = x.verdict == "mismatch (recorded)" && x.corollary == 6u && x.oracle == 4u;
  }
  c.expect(anomaly, "T a=b=n=k=1 cell not recorded as a mismatch with corollary 6 vs oracle 4");
  c.expect(seconds < 120, "grid took " + std::to_string(seconds) + " s");
  return {10, "reconciliation grid", c.ok,
          c.ok ? detail::str(grid.size()) + " cells, " + detail::str(consistent) + " consistent, " + detail::str(recorded) + " recorded mismatches, deterministic" : c.first, 0};
}

inline CriterionResult selfeq_composition() {
  detail::Checker c;
  const auto p = detail::family(Family::T, 7, 1, 3, 1, 1, 2);
  const auto s = selfeq_structure(p);
  std::vector<u64> orders;
  for (const auto& comp : s.components) orders.push_back(comp.order);
  c.expect(orders == std::vector<u64>{7, 6, 1, 24, 1}, "component orders differ");
  c.expect(s.total == 1008, "total " + detail::str(s.total));
  // Each component from its own module.
  const Group h = build(p.complement_spec());
  c.expect(enumerate_derivations(h, Character::from_action(h, p.action()), false).size() == 7, "Der");
  c.expect(selfeq_lens(7, p.K()).order == 6, "E(lens 7)");
  c.expect(cyclic_fixing_units(1, 1, 7).size() == 1, "E_gamma1(lens 1)");
  c.expect(enumerate_automorphisms(build(GroupSpec::q8())).size() == 24, "S4");
  c.expect(modular::ipow(3, p.n - p.n0()) / std::gcd(modular::ipow(3, p.n - p.n0()), p.K()) == 1, "tail");
  return {11, "self-equivalence composition", c.ok, c.ok ? s.expression + " = 7*6*1*24*1 = 1008" : c.first, 0};
}

inline const std::vector<std::pair<int, std::function<CriterionResult()>>>& criteria() {
  static const std::vector<std::pair<int, std::function<CriterionResult()>>> all{
      {1, presentation_soundness}, {2, structural_facts}, {3, h2_oracle_check},  {4, automorphism_counts},
      {5, splitting_sequence},     {6, derivation_counts}, {7, lens_and_selfeq}, {8, oracle_spot_values},
      {9, formula_values},         {10, reconciliation},   {11, selfeq_composition}};
  return all;
}

/// "small" skips the reconciliation grid; "full" runs criteria 1-11.
inline std::vector<int> suite(const std::string& name) {
  if (name == "small") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 11};
  if (name == "full") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  throw DomainError("unknown suite '" + name + "' (expected small or full)");
}

inline CriterionResult run_criterion(int id) {
  for (const auto& [cid, fn] : criteria()) {
    if (cid != id) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what(), 0};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  }
  throw DomainError("unknown criterion " + std::to_string(id));
}

}  // namespace spaceform::verify
