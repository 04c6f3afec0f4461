#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process;
// tools/spaceform_cli.cpp only forwards argv.
//
// Exit codes: 0 success, 1 domain error (bad group, invalid action, bound
// exceeded, failed verification), 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "spaceform/cache.hpp"
#include "spaceform/cohomology.hpp"
#include "spaceform/derivations.hpp"
#include "spaceform/report.hpp"
#include "spaceform/spaceforms.hpp"
#include "spaceform/spec_parse.hpp"
#include "spaceform/verify.hpp"

namespace spaceform::cli {

using json = nlohmann::json;

inline constexpr int kOk = 0;
inline constexpr int kDomainError = 1;
inline constexpr int kUsageError = 2;

/// Bad input that is the caller's fault rather than the mathematics'.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "a=7,u=2,v=1": modulus a plus role images; absent roles default to 1.
inline Action parse_action(const std::string& text) {
  Action act;
  bool have_a = false;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--action: expected name=value, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    u64 value = 0;
    try {
      std::size_t used = 0;
      value = std::stoull(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError("--action: '" + item.substr(eq + 1) + "' is not a non-negative integer");
    }
    if (name == "a") {
      act.modulus = value;
      have_a = true;
    } else if (name == "u") {
      act.u = value;
    } else if (name == "v") {
      act.v = value;
    } else if (name == "w") {
      act.w = value;
    } else {
      throw UsageError("--action: unknown name '" + name + "' (expected a, u, v, w)");
    }
  }
  if (!have_a) throw UsageError("--action: the modulus a= is required");
  if (act.modulus == 0) throw DomainError("--action: a must be positive");
  act.u %= act.modulus;
  act.v %= act.modulus;
  act.w %= act.modulus;
  return act;
}

inline std::string action_key(const Action& a) {
  return "a=" + std::to_string(a.modulus) + ",u=" + std::to_string(a.u) + ",v=" + std::to_string(a.v) + ",w=" + std::to_string(a.w);
}

/// A semidirect spec C(a)x(C(b)xF)[..] (or C(a)xF[..]) with F = T*(n) or O*(n).
inline FamilyParams family_from_spec(const GroupSpec& spec, u64 k) {
  if (spec.kind != GroupSpec::Kind::Semidirect) throw DomainError(spec.to_string() + " is not of the form C(a)x(C(b)xT*(n))[..] or C(a)x(C(b)xO*(n))[..]");
  const GroupSpec& h = spec.children[0];
  u64 b = 1;
  const GroupSpec* factor = &h;
  if (h.kind == GroupSpec::Kind::Direct) {
    const auto& l = h.children[0];
    const auto& r = h.children[1];
    if (l.kind == GroupSpec::Kind::Cyclic) {
      b = l.param;
      factor = &r;
    } else if (r.kind == GroupSpec::Kind::Cyclic) {
      b = r.param;
      factor = &l;
    }
  }
  if (factor->kind != GroupSpec::Kind::TStar && factor->kind != GroupSpec::Kind::OStar)
    throw DomainError("complement " + h.to_string() + " is not C(b)xT*(n) or C(b)xO*(n)");
  FamilyParams p;
  p.family = factor->kind == GroupSpec::Kind::TStar ? Family::T : Family::O;
  p.a = spec.param;
  p.b = b;
  p.n = factor->param;
  p.k = k;
  p.u = spec.action.u;
  p.v = spec.action.v;
  p.w = spec.action.w;
  return p;
}

/// Grid file: one "<spec> k=K" per line; "#" starts a comment. "C(m) k=K" is the
/// lens space L^(2K-1)(m) cell, anything else must be a family spec.
inline std::vector<GridCell> parse_grid(std::istream& in) {
  std::vector<GridCell> grid;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto at = line.rfind("k=");
    if (at == std::string::npos) throw UsageError("grid line " + std::to_string(lineno) + ": missing k=K");
    u64 k = 0;
    try {
      std::size_t used = 0;
      const std::string tail = line.substr(at + 2);
      k = std::stoull(tail, &used);
      if (tail.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(tail);
    } catch (const std::logic_error&) {
      throw UsageError("grid line " + std::to_string(lineno) + ": k must be a positive integer");
    }
    if (k == 0) throw UsageError("grid line " + std::to_string(lineno) + ": k must be a positive integer");
    GroupSpec spec;
    try {
      spec = parse_group_spec(line.substr(0, at));
    } catch (const ParseError& e) {
      throw UsageError("grid line " + std::to_string(lineno) + ": " + e.what());
    }
    if (spec.kind == GroupSpec::Kind::Cyclic) {
      grid.push_back(GridCell::lens_space(spec.param, k));
      continue;
    }
    try {
      grid.push_back(GridCell::family(family_from_spec(spec, k)));
    } catch (const DomainError& e) {
      throw UsageError("grid line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return grid;
}

struct Context {
  bool json_output = false;
  std::string cache_dir;
  bool no_cache = false;
  u64 max_enum = AutOptions{}.max_order;
  std::vector<std::string> warnings;
  std::optional<AutomorphismCache> cache;

  AutOptions options() const { return {max_enum, 0}; }
  const AutomorphismCache* cache_ptr() const { return cache ? &*cache : nullptr; }

  void open_cache() {
    std::string dir = cache_dir;
    if (dir.empty())
      if (const char* env = std::getenv("SPACEFORM_CACHE_DIR")) dir = env;
    if (!no_cache && !dir.empty()) cache.emplace(dir);
  }

  /// Seeds the factor registry from the cache so family commands reuse stored lists.
  void preload(Family f, u64 n) {
    if (!cache) return;
    const GroupSpec spec = f == Family::T ? GroupSpec::tstar(n) : GroupSpec::ostar(n);
    const Group g = build(spec);
    preload_factor_automorphisms(f, n, g, cached_automorphisms(g, std::nullopt, "", cache_ptr(), options(), warnings));
  }
};

inline json automorphism_json(const Group& g, const Automorphism& phi) {
  json j = json::object();
  for (std::size_t s = 0; s < g.generators().size(); ++s) j[g.generators()[s].name] = g.element_name(phi.images[s]);
  return j;
}

inline json group_info(const GroupSpec& spec, Context&) {
  const Group g = build(spec);
  const auto pres = verify_presentation(g);
  json gens = json::array(), rels = json::array();
  for (const auto& gen : g.generators()) gens.push_back(gen.name);
  for (const auto& r : g.relations()) rels.push_back(r.name);
  json j = {{"spec", spec.to_string()},
            {"order", report::number(g.order())},
            {"generators", gens},
            {"relations", rels},
            {"presentation_verified", pres.passed},
            {"center", report::invariants(center(g).invariants)},
            {"abelianization", report::invariants(abelianization(g))},
            {"cohomology_period", report::number(least_period(spec))},
            {"presentation_failure", pres.first_failure ? json(*pres.first_failure) : json(nullptr)}};
  return j;
}

inline json aut(const GroupSpec& spec, const std::optional<Action>& action, bool list, Context& ctx) {
  const Group g = build(spec);
  std::optional<Character> chi;
  if (action) chi = Character::from_action(g, *action);
  const auto auts = cached_automorphisms(g, chi, action ? action_key(*action) : "", ctx.cache_ptr(), ctx.options(), ctx.warnings);
  json arr = json::array();
  if (list || ctx.json_output)
    for (const auto& phi : auts) arr.push_back(automorphism_json(g, phi));
  return {{"spec", spec.to_string()},
          {"group_order", report::number(g.order())},
          {"action", action ? json(action_key(*action)) : json(nullptr)},
          {"order", report::number(auts.size())},
          {"automorphisms", arr}};
}

inline json der(const GroupSpec& spec, std::optional<u64> a, const std::optional<Action>& action, bool list, Context&) {
  GroupSpec h = spec;
  Action act;
  if (spec.kind == GroupSpec::Kind::Semidirect) {
    if (a || action) throw UsageError("der: a semidirect spec already carries a and the action");
    h = spec.children[0];
    act = spec.action;
    act.modulus = spec.param;
  } else if (action) {
    act = *action;
    if (a && *a != act.modulus) throw UsageError("der: --a disagrees with a= in --action");
  } else if (a) {
    act.modulus = *a;
  } else {
    throw UsageError("der: give --a (and optionally --action) or a semidirect spec");
  }
  if (act.modulus == 0) throw DomainError("der: a must be positive");
  const Group g = build(h);
  const Character chi = Character::from_action(g, act);
  const auto ders = enumerate_derivations(g, chi, list);
  json j = {{"group", h.to_string()}, {"a", report::number(act.modulus)}, {"action", action_key(act)}, {"count", report::number(ders.size())},
            {"closed_form", nullptr}, {"plan", nullptr}, {"derivations", nullptr}};
  if (std::gcd(g.order(), act.modulus) == 1) {
    j["closed_form"] = report::number(derivation_count_closed_form(g, chi));
    const auto plan = decompose_derivations(g, chi);
    json comps = json::array();
    for (const auto& c : plan.components)
      comps.push_back({{"prime_power", report::number(c.prime_power)}, {"quotient_order", report::number(c.quotient_order)},
                       {"generator_unit", report::number(c.generator_unit)}, {"count", report::number(c.count)}});
    j["plan"] = {{"quotient", plan.quotient}, {"components", comps}, {"count", report::number(plan.count)}};
  }
  if (list) {
    json arr = json::array();
    for (const auto& d : ders) {
      json values = json::object();
      for (std::size_t s = 0; s < g.generators().size(); ++s) values[g.generators()[s].name] = report::number(d.generator_values[s]);
      arr.push_back(values);
    }
    j["derivations"] = arr;
  }
  return j;
}

inline json cohomology(const GroupSpec& spec, u64 from, u64 to) {
  if (from > to) throw UsageError("cohomology: --from must not exceed --to");
  if (to - from > 10000) throw UsageError("cohomology: at most 10000 degrees per call");
  const auto table = cohomology_table(spec);
  json degrees = json::array();
  for (u64 k = from; k <= to; ++k) {
    // Semidirect tables are only known at multiples of the period.
    std::optional<AbelianInvariants> h;
    try {
      h = table.at(k);
    } catch (const DomainError&) {
    }
    degrees.push_back({{"degree", report::number(k)}, {"group", h ? json(h->to_string()) : json(nullptr)}});
  }
  return {{"spec", spec.to_string()},
          {"period", report::number(table.period())},
          {"ell", spec.kind == GroupSpec::Kind::Semidirect ? report::number(ell(spec)) : json(nullptr)},
          {"degrees", degrees}};
}

inline json count(const FamilyParams& p, std::optional<FormulaInputs> only, Context& ctx) {
  p.validate();
  ctx.preload(p.family, p.n);
  const auto r = orbit_count_oracle(p, ctx.options());
  json j = {{"params", report::params(p)},
            {"N", report::number(r.N)},
            {"K", report::number(r.K)},
            {"ell", report::number(p.ell())},
            {"phi_N", report::number(r.phi_N)},
            {"subgroup_order", report::number(r.subgroup_order)},
            {"oracle_count", report::number(r.count)}};
  json formulas = json::array();
  const auto inputs = only ? std::vector<FormulaInputs>{*only} : admissible_inputs(p.family);
  for (const auto& in : inputs) {
    const Rational v = formula_count(p, in);
    formulas.push_back(report::formula({in, v, v.denominator() == 1, v == Rational(static_cast<long long>(r.count))}, p.family));
  }
  j["formula_counts"] = formulas;
  j["corollary_count"] = p.ell() <= 2 ? report::number(corollary_count(p)) : json(nullptr);
  return j;
}

inline json selfeq(const FamilyParams& p, Context& ctx) {
  p.validate();
  ctx.preload(p.family, p.n);
  json j = {{"params", report::params(p)}, {"structure", report::selfeq(selfeq_structure(p))}, {"oracle_order", report::number(selfeq_order_oracle(p, ctx.options()))}};
  return j;
}

inline std::pair<json, bool> verify_suite(const std::string& name) {
  json arr = json::array();
  bool all = true;
  for (int id : verify::suite(name)) {
    const auto r = verify::run_criterion(id);
    all = all && r.passed;
    arr.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  return {json{{"suite", name}, {"suite_version", verify::kSuiteVersion}, {"criteria", arr}, {"passed", all}}, all};
}

inline std::string verify_text(const json& j) {
  std::ostringstream out;
  for (const auto& c : j["criteria"])
    out << (c["passed"].get<bool>() ? "PASS" : "FAIL") << "  " << c["id"].get<int>() << "  " << c["name"].get<std::string>() << ": " << c["detail"].get<std::string>() << "\n";
  return out.str();
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Homotopy classification of spherical space forms with metacyclic-by-binary-polyhedral groups"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Context ctx;
  app.add_flag("--json", ctx.json_output, "emit JSON");
  app.add_option("--cache-dir", ctx.cache_dir, "automorphism cache directory (default: $SPACEFORM_CACHE_DIR)");
  app.add_flag("--no-cache", ctx.no_cache, "ignore the automorphism cache");
  app.add_option("--max-enum", ctx.max_enum, "largest group order enumerated by brute force")->check(CLI::PositiveNumber);

  std::string spec_text, action_text, grid_file, suite = "small";
  std::optional<u64> der_a;
  u64 from = 0, to = 8;
  bool list = false;
  FamilyParams fp;
  std::string family = "T";
  std::optional<int> t, tp;

  auto* info_cmd = app.add_subcommand("group-info", "order, presentation, center, abelianization of a group");
  info_cmd->add_option("spec", spec_text, "group spec, e.g. 'C(7)x(C(5)xT*(2))[u=1,v=2]'")->required();

  auto* aut_cmd = app.add_subcommand("aut", "enumerate automorphisms, optionally those fixing an action");
  aut_cmd->add_option("spec", spec_text, "group spec")->required();
  aut_cmd->add_option("--action", action_text, "fix the action 'a=A,u=..,v=..,w=..'");
  aut_cmd->add_flag("--list", list, "list the automorphisms in text mode");

  auto* der_cmd = app.add_subcommand("der", "derivations H -> Z/a for an action of H");
  der_cmd->add_option("spec", spec_text, "H, or a semidirect spec C(a)xH[..]")->required();
  der_cmd->add_option("--a", der_a, "modulus a (trivial action unless --action is given)");
  der_cmd->add_option("--action", action_text, "action 'a=A,u=..,v=..,w=..'");
  der_cmd->add_flag("--list", list, "list derivations by generator values");

  auto* coh_cmd = app.add_subcommand("cohomology", "integral cohomology H^k(G) over a degree range");
  coh_cmd->add_option("spec", spec_text, "group spec")->required();
  coh_cmd->add_option("--from", from, "first degree");
  coh_cmd->add_option("--to", to, "last degree");

  auto add_family = [&](CLI::App* cmd) {
    cmd->add_option("--family", family, "T or O")->check(CLI::IsMember({"T", "O"}))->required();
    cmd->add_option("--a", fp.a, "order of the normal cyclic subgroup");
    cmd->add_option("--b", fp.b, "order of the central cyclic factor of the complement");
    cmd->add_option("--n", fp.n, "3-part exponent of T*(n) or O*(n)");
    cmd->add_option("--k", fp.k, "multiple of the period; the dimension is 2K-1 with K = k[ell,2]");
    cmd->add_option("--u", fp.u, "unit by which the Z/b generator acts");
    cmd->add_option("--v", fp.v, "unit by which X acts (T family)");
    cmd->add_option("--w", fp.w, "unit by which R acts (O family)");
  };
  auto* count_cmd = app.add_subcommand("count", "number of homotopy types: oracle, formulas, corollary");
  add_family(count_cmd);
  count_cmd->add_option("--t", t, "evaluate the formula only at this t");
  count_cmd->add_option("--tp", tp, "evaluate the formula only at this t' (T family)");
  auto* selfeq_cmd = app.add_subcommand("selfeq", "order of the group of homotopy self-equivalences");
  add_family(selfeq_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "run the built-in verification suite");
  verify_cmd->add_option("--suite", suite, "small or full")->check(CLI::IsMember({"small", "full"}));

  auto* reconcile_cmd = app.add_subcommand("reconcile", "compare oracle, formulas and corollary over a grid");
  reconcile_cmd->add_option("--grid", grid_file, "grid file: one '<spec> k=K' per line (default: built-in grid)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  auto emit = [&](const std::string& command, json params, const json& results, const std::string& text) {
    if (ctx.json_output) {
      out << report::envelope(command, std::move(params), results, ctx.warnings).dump(2) << "\n";
    } else {
      out << text;
      for (const auto& w : ctx.warnings) err << "warning: " << w << "\n";
    }
  };
  auto family_params = [&] {
    fp.family = family == "T" ? Family::T : Family::O;
    return fp;
  };

  try {
    ctx.open_cache();
    if (*info_cmd) {
      const auto spec = parse_group_spec(spec_text);
      const auto j = group_info(spec, ctx);
      emit("group-info", {{"spec", spec.to_string()}}, j, report::text(j));
    } else if (*aut_cmd) {
      const auto spec = parse_group_spec(spec_text);
      std::optional<Action> action;
      if (!action_text.empty()) action = parse_action(action_text);
      const auto j = aut(spec, action, list, ctx);
      json params = {{"spec", spec.to_string()}, {"action", action ? json(action_key(*action)) : json(nullptr)}};
      if (ctx.json_output) {
        emit("aut", params, j, "");
      } else {
        std::ostringstream text;
        text << "spec: " << j["spec"].get<std::string>() << "\norder: " << report::detail::scalar(j["order"]) << "\n";
        if (list) {
          for (const auto& phi : j["automorphisms"]) {
            std::string line;
            for (const auto& [k, v] : phi.items()) line += (line.empty() ? "" : "  ") + k + " -> " + v.get<std::string>();
            text << "  " << line << "\n";
          }
        }
        emit("aut", params, j, text.str());
      }
    } else if (*der_cmd) {
      const auto spec = parse_group_spec(spec_text);
      std::optional<Action> action;
      if (!action_text.empty()) action = parse_action(action_text);
      const auto j = der(spec, der_a, action, list, ctx);
      emit("der", {{"spec", spec.to_string()}, {"a", der_a ? json(*der_a) : json(nullptr)}, {"action", action ? json(action_key(*action)) : json(nullptr)}}, j,
           report::text(j));
    } else if (*coh_cmd) {
      const auto spec = parse_group_spec(spec_text);
      const auto j = cohomology(spec, from, to);
      std::ostringstream text;
      text << "spec: " << j["spec"].get<std::string>() << "\nperiod: " << report::detail::scalar(j["period"]) << "\n";
      for (const auto& d : j["degrees"]) text << "  H^" << report::detail::scalar(d["degree"]) << " = " << (d["group"].is_null() ? "(not tabulated)" : d["group"].get<std::string>()) << "\n";
      emit("cohomology", {{"spec", spec.to_string()}, {"from", from}, {"to", to}}, j, text.str());
    } else if (*count_cmd) {
      const auto p = family_params();
      std::optional<FormulaInputs> only;
      if (t || tp) only = FormulaInputs{t.value_or(0), tp.value_or(0)};
      const auto j = count(p, only, ctx);
      emit("count", report::params(p), j, report::text(j));
    } else if (*selfeq_cmd) {
      const auto p = family_params();
      const auto j = selfeq(p, ctx);
      emit("selfeq", report::params(p), j, report::text(j));
    } else if (*verify_cmd) {
      const auto [j, passed] = verify_suite(suite);
      emit("verify", {{"suite", suite}}, j, verify_text(j));
      return passed ? kOk : kDomainError;
    } else if (*reconcile_cmd) {
      std::vector<GridCell> grid;
      if (grid_file.empty()) {
        grid = default_grid();
      } else {
        std::ifstream in(grid_file);
        if (!in) throw UsageError("cannot read grid file " + grid_file);
        grid = parse_grid(in);
      }
      std::set<std::pair<Family, u64>> factors;
      for (const auto& c : grid)
        if (!c.lens && c.params.n > 0) factors.insert({c.params.family, c.params.n});
      // A factor too large to enumerate is reported per cell by reconcile itself.
      for (const auto& [f, n] : factors) {
        try {
          ctx.preload(f, n);
        } catch (const DomainError&) {
        }
      }
      const auto r = reconcile(grid, ctx.options());
      emit("reconcile", {{"grid", grid_file.empty() ? json("default") : json(grid_file)}, {"cells", grid.size()}}, report::reconcile(r), report::reconcile_text(r));
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kOk;
}

}  // namespace spaceform::cli
