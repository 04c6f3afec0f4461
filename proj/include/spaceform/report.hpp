#pragma once

// JSON and plain-text rendering of results. Object keys are emitted sorted, so
// identical results always serialize to identical bytes.

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "spaceform/abelian.hpp"
#include "spaceform/family.hpp"
#include "spaceform/spaceforms.hpp"

namespace spaceform::report {

using json = nlohmann::json;

/// Integers above 2^53 become decimal strings so no consumer loses precision.
inline json number(u64 x) {
  if (x > (u64{1} << 53)) return std::to_string(x);
  return x;
}

template <class T>
json optional_number(const std::optional<T>& x) {
  return x ? number(*x) : json(nullptr);
}

inline json invariants(const AbelianInvariants& a) {
  json factors = json::array();
  for (u64 f : a.factors()) factors.push_back(number(f));
  return {{"factors", factors}, {"text", a.to_string()}};
}

inline json params(const FamilyParams& p) {
  json j = {{"family", family_name(p.family)}, {"a", number(p.a)}, {"b", number(p.b)}, {"n", number(p.n)}, {"k", number(p.k)}, {"u", number(p.u % p.a)}};
  if (p.family == Family::T)
    j["v"] = number(p.v % p.a);
  else
    j["w"] = number(p.w % p.a);
  return j;
}

inline json rational(const Rational& r) { return to_string(r); }

inline json formula(const FormulaEntry& f, Family family) {
  json j = {{"t", f.inputs.t}, {"value", rational(f.value)}, {"integral", f.integral}, {"matches_oracle", f.matches}};
  if (family == Family::T) j["tp"] = f.inputs.tp;
  return j;
}

inline json cell(const CellReport& c) {
  json j;
  j["label"] = c.label;
  j["kind"] = c.lens ? "lens" : "family";
  if (c.lens) {
    j["m"] = number(c.lens_m);
    j["k"] = number(c.lens_k);
  } else {
    j["params"] = params(c.params);
  }
  j["oracle_count"] = optional_number(c.oracle);
  j["closed_form"] = optional_number(c.closed_form);
  json formulas = json::array();
  for (const auto& f : c.formulas) formulas.push_back(formula(f, c.params.family));
  j["formula_counts"] = formulas;
  j["corollary_count"] = optional_number(c.corollary);
  j["whole_group_count"] = optional_number(c.raw_count);
  j["factor_fixing_order"] = {{"closed_form", optional_number(c.aut_fixing_closed)}, {"brute_force", optional_number(c.aut_fixing_brute)}};
  j["ostar_quotient_order"] = {{"claimed", optional_number(c.o_quotient_claim)}, {"computed", optional_number(c.o_quotient_computed)}};
  j["selfeq_order"] = {{"structure", optional_number(c.selfeq_structure_order)},
                       {"oracle", optional_number(c.selfeq_oracle_order)},
                       {"whole_group", optional_number(c.selfeq_raw_order)}};
  j["flags"] = c.flags;
  j["verdict"] = c.verdict;
  j["error"] = c.error.empty() ? json(nullptr) : json(c.error);
  return j;
}

inline json table_discrepancy(const TableDiscrepancy& d) {
  return {{"group", d.group}, {"degree", number(d.degree)}, {"printed", d.printed}, {"encoded", d.encoded}, {"oracle", d.oracle}};
}

inline json reconcile(const ReconcileReport& r) {
  json cells = json::array(), tables = json::array();
  std::size_t consistent = 0, errors = 0;
  for (const auto& c : r.cells) {
    cells.push_back(cell(c));
    consistent += c.verdict == "consistent";
    errors += c.verdict == "error";
  }
  for (const auto& d : r.tables) tables.push_back(table_discrepancy(d));
  return {{"cells", cells},
          {"table_discrepancies", tables},
          {"summary", {{"cells", number(r.cells.size())}, {"consistent", number(consistent)}, {"errors", number(errors)}}}};
}

inline json selfeq(const SelfEqReport& s) {
  json comps = json::array();
  for (const auto& c : s.components) comps.push_back({{"name", c.name}, {"order", number(c.order)}});
  return {{"expression", s.expression}, {"components", comps}, {"total_order", number(s.total)}, {"degenerate", s.degenerate}};
}

/// Top-level envelope shared by every command.
inline json envelope(const std::string& command, json parameters, json results, const std::vector<std::string>& warnings) {
  return {{"command", command}, {"params", std::move(parameters)}, {"results", std::move(results)}, {"warnings", warnings}, {"engine_version", kEngineVersion}};
}

namespace detail {

inline std::string scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  return v.dump();
}

}  // namespace detail

/// Aligned columns for the reconciliation report.
inline std::string reconcile_text(const ReconcileReport& r) {
  std::vector<std::vector<std::string>> rows{{"cell", "oracle", "formulas", "corollary", "verdict", "flags"}};
  for (const auto& c : r.cells) {
    std::string formulas;
    for (const auto& f : c.formulas) formulas += (formulas.empty() ? "" : ",") + to_string(f.value);
    if (c.lens && c.closed_form) formulas = std::to_string(*c.closed_form);
    std::string flags;
    for (const auto& f : c.flags) flags += (flags.empty() ? "" : "; ") + f;
    if (!c.error.empty()) flags = c.error;
    rows.push_back({c.label, c.oracle ? std::to_string(*c.oracle) : "-", formulas.empty() ? "-" : formulas, c.corollary ? std::to_string(*c.corollary) : "-",
                    c.verdict, flags});
  }
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& row : rows)
    for (std::size_t i = 0; i + 1 < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i];
      if (i + 1 < row.size()) out << std::string(width[i] - row[i].size() + 2, ' ');
    }
    out << "\n";
  }
  if (!r.tables.empty()) {
    out << "\ntable discrepancies\n";
    for (const auto& d : r.tables)
      out << "  H^" << d.degree << "(" << d.group << "): printed " << d.printed << ", encoded " << d.encoded << ", oracle " << d.oracle << "\n";
  }
  return out.str();
}

/// "key: value" lines for the text mode of the other commands.
inline std::string text(const json& results, int indent = 0) {
  std::ostringstream out;
  const std::string pad(indent, ' ');
  for (const auto& [key, value] : results.items()) {
    if (value.is_object()) {
      out << pad << key << ":\n" << text(value, indent + 2);
    } else if (value.is_array() && !value.empty() && value.front().is_object()) {
      out << pad << key << ":\n";
      for (const auto& item : value) {
        std::string line;
        for (const auto& [k, v] : item.items()) line += (line.empty() ? "" : "  ") + k + "=" + detail::scalar(v);
        out << pad << "  " << line << "\n";
      }
    } else {
      out << pad << key << ": " << detail::scalar(value) << "\n";
    }
  }
  return out.str();
}

}  // namespace spaceform::report
