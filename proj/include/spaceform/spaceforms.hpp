#pragma once

// Homotopy-type counts of space forms for Z/a x| (Z/b x T*(n)) and
// Z/a x| (Z/b x O*(n)), by the closed formulas and by an orbit computation in
// (Z/N)^*, plus the self-homotopy-equivalence groups and a reconciliation grid.

#include <boost/rational.hpp>

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "spaceform/autos.hpp"
#include "spaceform/cohomology.hpp"
#include "spaceform/derivations.hpp"
#include "spaceform/family.hpp"
#include "spaceform/groups.hpp"
#include "spaceform/modular.hpp"

namespace spaceform {

using Rational = boost::rational<long long>;

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// ---------------------------------------------------------------- lens spaces

/// Homotopy types of (2k-1)-lens spaces with group Z/m: O(m, k).
inline u64 lens_count(u64 m, u64 k) {
  if (m == 0 || k == 0) throw DomainError("lens_count: requires m >= 1 and k >= 1");
  return modular::big_O(m, k);
}

/// Orbits of x -> +-l^k x on the units of Z/m, found by walking each orbit.
/// Shares no code with the subgroup closure behind lens_count.
inline u64 lens_orbit_enumeration(u64 m, u64 k) {
  if (m == 0 || k == 0) throw DomainError("lens_orbit_enumeration: requires m >= 1 and k >= 1");
  std::vector<u64> multipliers;
  for (u64 l = 0; l < m; ++l) {
    if (std::gcd(l, m) != 1) continue;
    const u64 lk = modular::powmod(l, k, m);
    multipliers.push_back(lk);
    multipliers.push_back((m - lk) % m);
  }
  std::vector<char> seen(m, 0);
  u64 orbits = 0;
  for (u64 x = 0; x < m; ++x) {
    if (std::gcd(x, m) != 1 || seen[x]) continue;
    ++orbits;
    std::vector<u64> stack{x};
    seen[x] = 1;
    while (!stack.empty()) {
      const u64 y = stack.back();
      stack.pop_back();
      for (u64 c : multipliers) {
        const u64 z = modular::mulmod(c, y, m);
        if (!seen[z]) {
          seen[z] = 1;
          stack.push_back(z);
        }
      }
    }
  }
  return orbits;
}

struct SelfEqLens {
  u64 order;
  std::vector<u64> elements;
  bool convention = false;  // m <= 2: the group is Z/2 by convention
};

/// {l in (Z/m)^* : l^k = +-1}; for m <= 2 the self-equivalence group is Z/2.
inline SelfEqLens selfeq_lens(u64 m, u64 k) {
  if (m == 0) throw DomainError("selfeq_lens: requires m >= 1");
  SelfEqLens out;
  for (u64 l : modular::unit_group(m).elements()) {
    const u64 p = modular::powmod(l, k, m);
    if (p == 1 % m || p == (m - 1) % m) out.elements.push_back(l);
  }
  out.order = out.elements.size();
  if (m <= 2) {
    out.order = 2;
    out.convention = true;
  }
  return out;
}

// ---------------------------------------------------------- factor automorphisms

/// Aut(T*(n)) or Aut(O*(n)) with the units each automorphism induces: s on the
/// Z/3^n abelianization and r on the Q16 part (1 for T*(n)).
struct FactorAutomorphisms {
  Family family;
  u64 n;
  Group group;
  std::vector<Automorphism> automorphisms;
  std::vector<u64> three_unit;
  std::vector<u64> two_unit;
};

namespace detail {

inline std::shared_ptr<const FactorAutomorphisms> make_factor_automorphisms(Family f, u64 n, Group g, std::vector<Automorphism> auts) {
  std::vector<u64> three, two;
  for (const auto& phi : auts) {
    three.push_back(three_part_unit(g, phi));
    two.push_back(f == Family::O ? q16_exponent(g, phi) : 1);
  }
  return std::make_shared<const FactorAutomorphisms>(FactorAutomorphisms{f, n, std::move(g), std::move(auts), std::move(three), std::move(two)});
}

inline GroupSpec factor_spec(Family f, u64 n) { return f == Family::T ? GroupSpec::tstar(n) : GroupSpec::ostar(n); }

struct FactorRegistry {
  std::mutex mutex;
  std::map<std::pair<int, u64>, std::shared_ptr<const FactorAutomorphisms>> entries;
};

inline FactorRegistry& factor_registry() {
  static FactorRegistry registry;
  return registry;
}

}  // namespace detail

/// Memoized per (family, n) for the lifetime of the process.
inline std::shared_ptr<const FactorAutomorphisms> factor_automorphisms(Family f, u64 n, const AutOptions& options = {}) {
  auto& reg = detail::factor_registry();
  const std::pair<int, u64> key{static_cast<int>(f), n};
  {
    std::lock_guard lock(reg.mutex);
    if (auto it = reg.entries.find(key); it != reg.entries.end()) return it->second;
  }
  Group g = build(detail::factor_spec(f, n));
  auto auts = enumerate_automorphisms(g, options);
  auto computed = detail::make_factor_automorphisms(f, n, std::move(g), std::move(auts));
  std::lock_guard lock(reg.mutex);
  return reg.entries.emplace(key, std::move(computed)).first->second;
}

/// Seeds the memo with an externally obtained Aut(F) (e.g. from the on-disk cache);
/// g must be build(factor spec) and auts its full, sorted automorphism list.
inline void preload_factor_automorphisms(Family f, u64 n, Group g, std::vector<Automorphism> auts) {
  auto entry = detail::make_factor_automorphisms(f, n, std::move(g), std::move(auts));
  auto& reg = detail::factor_registry();
  std::lock_guard lock(reg.mutex);
  reg.entries.emplace(std::pair<int, u64>{static_cast<int>(f), n}, std::move(entry));
}

/// Indices of the automorphisms of the factor that fix its action on Z/a.
inline std::vector<std::size_t> factor_fixing_indices(const FactorAutomorphisms& fa, const FamilyParams& p) {
  const Character chi = Character::from_action(fa.group, p.action());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fa.automorphisms.size(); ++i) {
    const auto& phi = fa.automorphisms[i];
    bool fixes = true;
    for (std::size_t s = 0; s < phi.images.size() && fixes; ++s) fixes = chi(phi.images[s]) == chi.generator_images()[s] % chi.modulus();
    if (fixes) out.push_back(i);
  }
  return out;
}

// ----------------------------------------------------------------- orbit oracle

struct OracleResult {
  u64 N = 1;
  u64 K = 1;
  u64 phi_N = 1;
  u64 subgroup_order = 1;
  u64 count = 1;
};

namespace detail {

struct FactorUnit {
  u64 two;    // mod 8 or 16
  u64 three;  // mod 3^n
};

// S = <N-1, CRT(l^K,1,1,1), CRT(1,w^K,1,1), CRT(1,1,phi_2,phi_3)> inside (Z/N)^*,
// components ordered a, b, 2-part, 3-part.
inline OracleResult oracle_from_units(const FamilyParams& p, const std::vector<FactorUnit>& factor_units) {
  OracleResult out;
  out.K = p.K();
  out.N = p.N();
  out.phi_N = modular::euler_phi(out.N);
  const u64 two = p.two_part(), three = p.three_n();
  auto crt = [&](u64 xa, u64 xb, u64 x2, u64 x3) {
    return modular::crt_combine(std::vector<std::pair<u64, u64>>{{xa % p.a, p.a}, {xb % p.b, p.b}, {x2, two}, {x3, three}});
  };
  std::set<u64> gens{out.N - 1};
  for (u64 l : modular::unit_group(p.a).elements()) gens.insert(crt(modular::powmod(l, out.K, p.a), 1, 1, 1));
  for (u64 w : cyclic_fixing_units(p.b, p.u, p.a)) gens.insert(crt(1, modular::powmod(w, out.K, p.b), 1, 1));
  for (const auto& f : factor_units) gens.insert(crt(1, 1, f.two, f.three));
  out.subgroup_order = modular::subgroup_closure(out.N, std::vector<u64>(gens.begin(), gens.end())).size();
  out.count = out.phi_N / out.subgroup_order;
  return out;
}

}  // namespace detail

/// phi(N)/|S| for S the subgroup of (Z/N)^* generated by -1 and the units that
/// Aut(G) induces on H^{2K}(G) = Z/N, assembled factorwise over Z/a, Z/b, F.
inline OracleResult orbit_count_oracle(const FamilyParams& p, const AutOptions& options = {}) {
  p.validate();
  const auto fa = factor_automorphisms(p.family, p.n, options);
  const u64 K = p.K(), three = p.three_n();
  std::vector<detail::FactorUnit> units;
  for (std::size_t i : factor_fixing_indices(*fa, p))
    units.push_back({modular::powmod(fa->two_unit[i], K, p.two_part()), modular::powmod(fa->three_unit[i], K, three)});
  return detail::oracle_from_units(p, units);
}

/// The same computation over an explicit list of factor automorphisms, each
/// mapped through induced_unit_action at degree 2K.
inline OracleResult orbit_count_oracle(const FamilyParams& p, const Group& factor, const std::vector<Automorphism>& factor_auts) {
  p.validate();
  std::vector<detail::FactorUnit> units;
  for (const auto& phi : factor_auts) {
    const auto act = induced_unit_action(factor, phi, 2 * p.K());
    units.push_back({act.components.at(0).unit, act.components.at(1).unit});
  }
  return detail::oracle_from_units(p, units);
}

/// Whole-group check for small cells: Aut(G) enumerated directly, its image in
/// (Z/N)^* read off induced_unit_action, and the splitting map image compared
/// with (Z/a)^* x Aut_gamma(Z/b x F).
struct RawGroupCheck {
  u64 aut_order = 0;
  u64 count = 0;          // phi(N) / |<-1, image>|
  u64 selfeq_order = 0;   // #{phi : phi^* = +-1}
  bool psi_image_matches = false;
};

inline RawGroupCheck raw_group_check(const FamilyParams& p, const AutOptions& options = {}) {
  p.validate();
  const Group g = build(p.spec());
  const auto auts = enumerate_automorphisms(g, options);
  const u64 N = p.N(), degree = 2 * p.K();
  RawGroupCheck out;
  out.aut_order = auts.size();
  std::set<u64> image;
  std::set<SplitAutomorphism> split;
  for (const auto& phi : auts) {
    const auto act = induced_unit_action(g, phi, degree);
    if (act.modulus() != N) throw std::logic_error("raw_group_check: induced action modulus " + std::to_string(act.modulus()) + " != N");
    const u64 x = act.combined();
    image.insert(x);
    if (x == 1 % N || x == N - 1) ++out.selfeq_order;
    split.insert(split_semidirect_automorphism(g, phi));
  }
  image.insert(N - 1);
  out.count = modular::euler_phi(N) / modular::subgroup_closure(N, std::vector<u64>(image.begin(), image.end())).size();

  const Group h = build(p.complement_spec());
  const auto fixing = aut_fixing_action(h, Character::from_action(h, p.action()), options);
  std::set<SplitAutomorphism> expected;
  for (u64 l : modular::unit_group(p.a).elements())
    for (const auto& f : fixing) expected.insert({l, f.images});
  out.psi_image_matches = split == expected;
  return out;
}

// ------------------------------------------------------------------ formulas

struct FormulaInputs {
  int t = 0;
  int tp = 0;  // T family only
};

/// 2^(t+t'+1) 3^n0 O(a,K) O_{Aut_gamma1(Z/b)}(b,K) / O(3^(n-n0),K), evaluated
/// literally; aut_gamma1 lists the units w of Z/b fixing the action of Z/b.
inline Rational formula_count_T(u64 a, u64 b, u64 n, u64 n0, u64 K, const std::vector<u64>& aut_gamma1, FormulaInputs in) {
  if (std::gcd(a, b) != 1 || std::gcd(a * b, u64{6}) != 1) throw DomainError("hypothesis (a,b)=(ab,6)=1 violated");
  if (in.t < 0 || in.t > 2 || in.tp < 0 || in.tp > 1) throw DomainError("formula inputs out of range: need 0<=t<=2, 0<=t'<=1");
  if (n0 > n) throw DomainError("n0 exceeds n");
  std::vector<u64> image;
  for (u64 w : aut_gamma1) image.push_back(modular::powmod(w, K, b));
  Rational value(static_cast<long long>(modular::ipow(2, in.t + in.tp + 1) * modular::ipow(3, n0)));
  value *= static_cast<long long>(modular::big_O(a, K));
  value *= static_cast<long long>(modular::relative_O(b, image));
  value /= static_cast<long long>(modular::big_O(modular::ipow(3, n - n0), K));
  return value;
}

inline Rational formula_count_T(const FamilyParams& p, FormulaInputs in) {
  p.validate();
  if (p.family != Family::T) throw DomainError("formula_count_T: family must be T");
  return formula_count_T(p.a, p.b, p.n, p.n0(), p.K(), cyclic_fixing_units(p.b, p.u, p.a), in);
}

/// 2^(t+1) 3^(n-1) O(a,K) O_{Aut_tau1(Z/b)}(b,K).
inline Rational formula_count_O(u64 a, u64 b, u64 n, u64 K, const std::vector<u64>& aut_tau1, FormulaInputs in) {
  if (std::gcd(a, b) != 1 || std::gcd(a * b, u64{6}) != 1) throw DomainError("hypothesis (a,b)=(ab,6)=1 violated");
  if (in.t < 0 || in.t > 1 || in.tp != 0) throw DomainError("formula inputs out of range: need 0<=t<=1 (no t' for the O family)");
  if (n == 0) throw DomainError("n must be positive");
  std::vector<u64> image;
  for (u64 w : aut_tau1) image.push_back(modular::powmod(w, K, b));
  Rational value(static_cast<long long>(modular::ipow(2, in.t + 1) * modular::ipow(3, n - 1)));
  value *= static_cast<long long>(modular::big_O(a, K));
  value *= static_cast<long long>(modular::relative_O(b, image));
  return value;
}

inline Rational formula_count_O(const FamilyParams& p, FormulaInputs in) {
  p.validate();
  if (p.family != Family::O) throw DomainError("formula_count_O: family must be O");
  return formula_count_O(p.a, p.b, p.n, p.K(), cyclic_fixing_units(p.b, p.u, p.a), in);
}

inline Rational formula_count(const FamilyParams& p, FormulaInputs in) {
  return p.family == Family::T ? formula_count_T(p, in) : formula_count_O(p, in);
}

/// Admissible (t, t') pairs, ascending.
inline std::vector<FormulaInputs> admissible_inputs(Family f) {
  std::vector<FormulaInputs> out;
  if (f == Family::T) {
    for (int t = 0; t <= 2; ++t)
      for (int tp = 0; tp <= 1; ++tp) out.push_back({t, tp});
  } else {
    for (int t = 0; t <= 1; ++t) out.push_back({t, 0});
  }
  return out;
}

/// For ell <= 2: T gives 2 3^n lens(ab, 2k), O gives 2 3^(n-1) lens(ab, 2k).
inline u64 corollary_count(const FamilyParams& p) {
  p.validate();
  if (p.ell() > 2) throw DomainError("corollary_count: not applicable, ell = " + std::to_string(p.ell()) + " > 2");
  const u64 prefix = p.family == Family::T ? 2 * p.three_n() : 2 * modular::ipow(3, p.n - 1);
  return prefix * lens_count(p.a * p.b, 2 * p.k);
}

// -------------------------------------------------------------- self-equivalences

struct SelfEqComponent {
  std::string name;
  u64 order;
};

struct SelfEqReport {
  std::string expression;
  std::vector<SelfEqComponent> components;
  u64 total = 1;
  bool degenerate = false;
};

/// Structure of the self-equivalence group of the top-dimensional space form:
///   T: Der x| (E(lens a) x E_gamma1(lens b) x (S4 x Z/c)),  c = 3^(n-n0)/(3^(n-n0),K)
///   O: Der x| (E(lens a) x E_tau1(lens b) x (O_n x| Z/c)),  c = 3^(n-1)/(3^(n-1),K)
inline SelfEqReport selfeq_structure(const FamilyParams& p) {
  p.validate();
  SelfEqReport out;
  if (p.N() <= 2) {
    out.degenerate = true;
    out.expression = "Z/2";
    out.components = {{"Z/2", 2}};
    out.total = 2;
    return out;
  }
  const u64 K = p.K();
  const bool t = p.family == Family::T;
  const u64 der = decompose_derivations(p).count;
  const u64 lens_a = p.a <= 1 ? 1 : selfeq_lens(p.a, K).elements.size();
  u64 lens_b = 0;
  for (u64 w : cyclic_fixing_units(p.b, p.u, p.a)) {
    const u64 x = modular::powmod(w, K, p.b);
    if (x == 1 % p.b || x == (p.b - 1) % p.b) ++lens_b;
  }
  const u64 tail_base = t ? modular::ipow(3, p.n - p.n0()) : modular::ipow(3, p.n - 1);
  const u64 tail = tail_base / std::gcd(tail_base, K);
  const std::string c = "Z/" + std::to_string(tail);
  const char* g = t ? "gamma" : "tau";
  out.components = {{std::string("Der_") + g, der},
                    {"E(lens a)", lens_a},
                    {std::string("E_") + g + "1(lens b)", lens_b},
                    {t ? "S4" : "O_n", t ? u64{24} : 8 * p.three_n()},
                    {c, tail}};
  out.expression = std::string("Der_") + g + " x| (E(lens a) x E_" + g + "1(lens b) x " + (t ? "(S4 x " + c + ")" : "(O_n x| " + c + ")") + ")";
  for (const auto& comp : out.components) out.total *= comp.order;
  return out;
}

/// Independent count: |Der| times #{(l, w, phi) in (Z/a)^* x Aut(Z/b) x Aut(F) fixing
/// the action, with the induced unit on Z/N equal to +1 or to -1 in every component}.
inline u64 selfeq_order_oracle(const FamilyParams& p, const AutOptions& options = {}) {
  p.validate();
  const Group h = build(p.complement_spec());
  const Character chi = Character::from_action(h, p.action());
  const u64 der = enumerate_derivations(h, chi, false).size();
  const auto fa = factor_automorphisms(p.family, p.n, options);
  const u64 K = p.K(), three = p.three_n(), two = p.two_part();
  u64 total = 0;
  for (int sign : {1, -1}) {
    auto is_sign = [&](u64 x, u64 m) { return x % m == (sign == 1 ? 1 % m : (m - 1) % m); };
    u64 ca = 0, cb = 0, cf = 0;
    for (u64 l : modular::unit_group(p.a).elements()) ca += is_sign(modular::powmod(l, K, p.a), p.a);
    for (u64 w : cyclic_fixing_units(p.b, p.u, p.a)) cb += is_sign(modular::powmod(w, K, p.b), p.b);
    for (std::size_t i : factor_fixing_indices(*fa, p))
      cf += is_sign(modular::powmod(fa->two_unit[i], K, two), two) && is_sign(modular::powmod(fa->three_unit[i], K, three), three);
    total += ca * cb * cf;
  }
  return der * total;
}

// ------------------------------------------------------------------ reconcile

struct FormulaEntry {
  FormulaInputs inputs;
  Rational value;
  bool integral;
  bool matches;
};

struct CellReport {
  std::string label;
  bool lens = false;
  FamilyParams params;  // family cells
  u64 lens_m = 0, lens_k = 0;
  std::optional<u64> oracle;
  std::optional<u64> closed_form;  // lens cells
  std::vector<FormulaEntry> formulas;
  std::optional<u64> corollary;
  std::optional<u64> raw_count;
  std::optional<u64> aut_fixing_closed, aut_fixing_brute;   // factor fixing-set order: printed vs enumerated
  std::optional<u64> o_quotient_claim, o_quotient_computed;  // O family: (Z/16 3^n)^*/+-Aut(O*_n)
  std::optional<u64> selfeq_structure_order, selfeq_oracle_order, selfeq_raw_order;
  std::vector<std::string> flags;
  std::string verdict;
  std::string error;
};

struct ReconcileReport {
  std::vector<CellReport> cells;
  std::vector<TableDiscrepancy> tables;
};

struct GridCell {
  bool lens = false;
  FamilyParams params;
  u64 lens_m = 0, lens_k = 0;

  static GridCell family(FamilyParams p) { return {false, p, 0, 0}; }
  static GridCell lens_space(u64 m, u64 k) { return {true, {}, m, k}; }
};

/// Coprime (a, b) from {1,5,7,11,35}, n = 1..3, k = 1..3, all admissible actions.
inline std::vector<GridCell> default_grid() {
  const std::vector<u64> values{1, 5, 7, 11, 35};
  std::vector<GridCell> out;
  for (Family f : {Family::T, Family::O})
    for (u64 a : values)
      for (u64 b : values) {
        if (std::gcd(a, b) != 1) continue;
        for (u64 n = 1; n <= 3; ++n)
          for (u64 k = 1; k <= 3; ++k)
            for (u64 u : modular::unit_group(a).elements())
              for (u64 x : modular::unit_group(a).elements()) {
                FamilyParams p{f, a, b, n, k, u, 1, 1};
                (f == Family::T ? p.v : p.w) = x;
                try {
                  p.validate();
                } catch (const DomainError&) {
                  continue;
                }
                out.push_back(GridCell::family(p));
              }
      }
  return out;
}

namespace detail {

constexpr u64 kRawCellLimit = 200;

inline CellReport reconcile_lens(u64 m, u64 k) {
  CellReport cell;
  cell.lens = true;
  cell.lens_m = m;
  cell.lens_k = k;
  cell.label = "lens m=" + std::to_string(m) + " k=" + std::to_string(k);
  cell.oracle = lens_orbit_enumeration(m, k);
  cell.closed_form = lens_count(m, k);
  cell.verdict = *cell.oracle == *cell.closed_form ? "consistent" : "mismatch (recorded)";
  return cell;
}

inline CellReport reconcile_family(const FamilyParams& p, const AutOptions& options) {
  CellReport cell;
  cell.params = p;
  cell.label = p.label();
  p.validate();
  if (p.n < 3) cell.flags.push_back("outside closed-form hypothesis (n >= 3)");
  const u64 oracle = orbit_count_oracle(p, options).count;
  cell.oracle = oracle;
  bool any_match = false;
  for (FormulaInputs in : admissible_inputs(p.family)) {
    const Rational value = formula_count(p, in);
    const bool integral = value.denominator() == 1;
    const bool matches = integral && value.numerator() == static_cast<long long>(oracle);
    any_match = any_match || matches;
    cell.formulas.push_back({in, value, integral, matches});
  }
  if (std::any_of(cell.formulas.begin(), cell.formulas.end(), [](const FormulaEntry& e) { return !e.integral; }))
    cell.flags.push_back("non-integral formula value");
  if (p.ell() <= 2) {
    cell.corollary = corollary_count(p);
    if (*cell.corollary != oracle) cell.flags.push_back("corollary count differs from oracle");
  }

  const auto fa = factor_automorphisms(p.family, p.n, options);
  const u64 fixing = factor_fixing_indices(*fa, p).size();
  cell.aut_fixing_brute = fixing;
  cell.aut_fixing_closed = p.family == Family::T ? 24 * modular::ipow(3, p.n - p.n0()) : fa->automorphisms.size();
  if (*cell.aut_fixing_closed != fixing) cell.flags.push_back("factor fixing-set order differs from closed form");
  if (p.family == Family::O) {
    const u64 m = 16 * p.three_n();
    std::vector<u64> image;
    for (std::size_t i = 0; i < fa->automorphisms.size(); ++i)
      image.push_back(modular::crt_combine(std::vector<std::pair<u64, u64>>{{modular::powmod(fa->two_unit[i], p.K(), 16), 16},
                                                                             {modular::powmod(fa->three_unit[i], p.K(), p.three_n()), p.three_n()}}));
    cell.o_quotient_claim = 2 * modular::ipow(3, p.n - 1);
    cell.o_quotient_computed = modular::relative_O(m, image);
    if (*cell.o_quotient_claim != *cell.o_quotient_computed) cell.flags.push_back("O*(n) quotient order differs from 2*3^(n-1)");
  }

  cell.selfeq_structure_order = selfeq_structure(p).total;
  cell.selfeq_oracle_order = selfeq_order_oracle(p, options);
  if (*cell.selfeq_structure_order != *cell.selfeq_oracle_order) cell.flags.push_back("self-equivalence structure order differs from oracle");

  bool raw_ok = true;
  if (p.N() <= kRawCellLimit) {
    const auto raw = raw_group_check(p, options);
    cell.raw_count = raw.count;
    cell.selfeq_raw_order = raw.selfeq_order;
    raw_ok = raw.count == oracle && raw.selfeq_order == *cell.selfeq_oracle_order && raw.psi_image_matches;
    if (!raw_ok) cell.flags.push_back("whole-group enumeration disagrees with factorwise oracle");
  }
  cell.verdict = any_match && raw_ok ? "consistent" : "mismatch (recorded)";
  return cell;
}

}  // namespace detail

/// Evaluates every cell; per-cell errors are captured in the cell. Cells keep
/// the order of the input grid.
inline ReconcileReport reconcile(const std::vector<GridCell>& grid, const AutOptions& options = {}) {
  ReconcileReport report;
  report.cells.resize(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      const GridCell& g = grid[i];
      try {
        report.cells[i] = g.lens ? detail::reconcile_lens(g.lens_m, g.lens_k) : detail::reconcile_family(g.params, options);
      } catch (const std::exception& e) {
        CellReport& cell = report.cells[i];
        cell = {};
        cell.lens = g.lens;
        cell.params = g.params;
        cell.lens_m = g.lens_m;
        cell.lens_k = g.lens_k;
        cell.label = g.lens ? "lens m=" + std::to_string(g.lens_m) + " k=" + std::to_string(g.lens_k) : g.params.label();
        cell.error = e.what();
        cell.verdict = "error";
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(grid.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!grid.empty()) report.tables = table_discrepancies();
  return report;
}

}  // namespace spaceform
