#pragma once

// Normal-form engines for Z/m, Q8, Q16, T*(n), O*(n), direct and semidirect
// products, and the structural queries built on them.
//
// Elements are indices 0..|G|-1 with 0 the identity. Index layout:
//   T*(n):  q + 8x        for X^x q, q a unit quaternion (q = basis + 4*sign)
//   O*(n):  t + |T*(n)| d for t R^d, t in T*(n)
//   direct: l + |L| r
//   semidirect Z/a x| H: x + a h

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spaceform/abelian.hpp"
#include "spaceform/group_spec.hpp"
#include "spaceform/modular.hpp"

namespace spaceform {

using Index = std::uint32_t;
using modular::u64;

struct Letter {
  std::size_t generator;
  std::int64_t exponent;
};
using Word = std::vector<Letter>;

/// A chain of words that must all be equal, e.g. P^2 = Q^2 = R^2.
struct Relation {
  std::string name;
  std::vector<Word> sides;
};

struct Generator {
  std::string name;
  Index element;
  char role = 0;  // 'u', 'v', 'w' or 0; see Action
};

namespace detail {

class Engine {
 public:
  virtual ~Engine() = default;
  virtual u64 order() const = 0;
  virtual Index mul(Index a, Index b) const = 0;
  virtual Index inv(Index a) const = 0;
  virtual std::string name(Index a) const = 0;
  virtual std::vector<std::int64_t> coordinates(Index a) const = 0;
};

// Unit quaternions: index = basis + 4 * sign, basis 0..3 = 1, i, j, k.
namespace quat {

inline constexpr std::array<std::array<std::array<int, 2>, 4>, 4> kBasisMul{{
    {{{0, 0}, {0, 1}, {0, 2}, {0, 3}}},
    {{{0, 1}, {1, 0}, {0, 3}, {1, 2}}},
    {{{0, 2}, {1, 3}, {1, 0}, {0, 1}}},
    {{{0, 3}, {0, 2}, {1, 1}, {1, 0}}},
}};

inline Index mul(Index a, Index b) {
  const auto [s, basis] = kBasisMul[a & 3U][b & 3U];
  return static_cast<Index>(basis + 4 * ((a >> 2) ^ (b >> 2) ^ static_cast<Index>(s)));
}

inline Index inv(Index a) { return (a & 3U) == 0 ? a : a ^ 4U; }

// Conjugation by X: i -> j -> k -> i, applied e times.
inline Index tau(Index q, u64 e) {
  for (u64 t = 0; t < e % 3; ++t) {
    const Index b = q & 3U;
    q = (q & 4U) | (b == 0 ? 0 : (b % 3) + 1);
  }
  return q;
}

// Conjugation by R on Q8: i -> -k, j -> -j, k -> -i.
inline Index sigma(Index q) {
  static constexpr std::array<Index, 4> kBasis{0, 3, 2, 1};
  const Index b = q & 3U;
  return kBasis[b] | ((q & 4U) ^ (b == 0 ? 0U : 4U));
}

// q = P^i Q^j with P = i, Q = j.
inline std::pair<int, int> pq_exponents(Index q) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) {
      Index p = 0;
      for (int t = 0; t < i; ++t) p = mul(p, 1);
      if (j == 1) p = mul(p, 2);
      if (p == q) return {i, j};
    }
  return {0, 0};
}

}  // namespace quat

inline std::string power_name(const std::string& base, std::int64_t e) {
  if (e == 0) return {};
  return e == 1 ? base : base + "^" + std::to_string(e);
}

inline std::string join_names(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts)
    if (!p.empty()) out += p;
  return out.empty() ? "1" : out;
}

class CyclicEngine final : public Engine {
 public:
  explicit CyclicEngine(u64 m) : m_(m) {}
  u64 order() const override { return m_; }
  Index mul(Index a, Index b) const override { return static_cast<Index>((u64{a} + b) % m_); }
  Index inv(Index a) const override { return static_cast<Index>((m_ - a) % m_); }
  std::string name(Index a) const override { return a == 0 ? "1" : power_name("g", a); }
  std::vector<std::int64_t> coordinates(Index a) const override { return {a}; }

 private:
  u64 m_;
};

// T*(n) = Q8 x| Z/3^n; n = 0 gives Q8.
class TStarEngine final : public Engine {
 public:
  explicit TStarEngine(u64 n) : m3_(modular::ipow(3, n)) {}
  u64 three_part() const { return m3_; }
  u64 order() const override { return 8 * m3_; }
  // (X^x1 q1)(X^x2 q2) = X^(x1+x2) tau^(-x2)(q1) q2
  Index mul(Index a, Index b) const override {
    const u64 xa = a / 8, xb = b / 8;
    const Index q = quat::mul(quat::tau(a % 8, 3 - xb % 3), b % 8);
    return static_cast<Index>(q + 8 * ((xa + xb) % m3_));
  }
  Index inv(Index a) const override {
    const u64 x = a / 8;
    return static_cast<Index>(quat::tau(quat::inv(a % 8), x % 3) + 8 * ((m3_ - x) % m3_));
  }
  // Conjugation by R extended to T*(n): X -> X^-1.
  Index sigma(Index a) const {
    const u64 x = a / 8;
    return static_cast<Index>(quat::sigma(a % 8) + 8 * ((m3_ - x) % m3_));
  }
  std::string name(Index a) const override {
    const auto [i, j] = quat::pq_exponents(a % 8);
    return join_names({power_name("X", a / 8), power_name("P", i), power_name("Q", j)});
  }
  std::vector<std::int64_t> coordinates(Index a) const override {
    const auto [i, j] = quat::pq_exponents(a % 8);
    if (m3_ == 1) return {i, j};
    return {static_cast<std::int64_t>(a / 8), i, j};
  }

 private:
  u64 m3_;
};

// O*(n) = T*(n) u T*(n) R with R t R^-1 = sigma(t) and R^2 = P^2; n = 0 gives Q16.
class OStarEngine final : public Engine {
 public:
  explicit OStarEngine(u64 n) : t_(n), half_(t_.order()) {}
  u64 order() const override { return 2 * half_; }
  Index mul(Index a, Index b) const override {
    const Index ta = a % half_, tb = b % half_;
    const u64 da = a / half_, db = b / half_;
    if (da == 0) return static_cast<Index>(t_.mul(ta, tb) + half_ * db);
    Index t = t_.mul(ta, t_.sigma(tb));
    if (db == 1) return t_.mul(t, kMinusOne);
    return static_cast<Index>(t + half_);
  }
  Index inv(Index a) const override {
    const Index t = a % half_;
    if (a < half_) return t_.inv(t);
    // (tR)^-1 = R^-1 t^-1 = -R t^-1 = -sigma(t^-1) R
    return static_cast<Index>(t_.mul(kMinusOne, t_.sigma(t_.inv(t))) + half_);
  }
  std::string name(Index a) const override {
    std::string t = t_.name(a % half_);
    if (a < half_) return t;
    return t == "1" ? "R" : t + "R";
  }
  std::vector<std::int64_t> coordinates(Index a) const override {
    auto c = t_.coordinates(a % half_);
    c.push_back(static_cast<std::int64_t>(a / half_));
    return c;
  }
  u64 half() const { return half_; }

  static constexpr Index kMinusOne = 4;

 private:
  TStarEngine t_;
  u64 half_;
};

class TableEngine final : public Engine {
 public:
  TableEngine(u64 n, std::vector<Index> table) : n_(n), table_(std::move(table)), inverse_(n, 0) {
    for (u64 a = 0; a < n_; ++a)
      for (u64 b = 0; b < n_; ++b)
        if (table_[a * n_ + b] == 0) {
          inverse_[a] = static_cast<Index>(b);
          break;
        }
  }
  u64 order() const override { return n_; }
  Index mul(Index a, Index b) const override { return table_[u64{a} * n_ + b]; }
  Index inv(Index a) const override { return inverse_[a]; }
  std::string name(Index a) const override { return "e" + std::to_string(a); }
  std::vector<std::int64_t> coordinates(Index a) const override { return {a}; }

 private:
  u64 n_;
  std::vector<Index> table_;
  std::vector<Index> inverse_;
};

}  // namespace detail

struct GroupElement {
  u64 group_id;
  Index index;
  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// An immutable finite group: an engine, canonical generators and the
/// presentation relations they satisfy. Cheap to copy.
class Group {
 public:
  static constexpr u64 kTableLimit = 1024;

  Group() = default;

  static Group build(const GroupSpec& spec);

  /// A group given by an explicit multiplication table (identity at index 0).
  static Group from_table(u64 n, std::vector<Index> table, std::vector<Generator> generators, std::vector<Relation> relations,
                          std::string label, std::optional<GroupSpec> spec = std::nullopt) {
    auto impl = std::make_shared<Impl>();
    impl->engine = std::make_shared<detail::TableEngine>(n, std::move(table));
    impl->generators = std::move(generators);
    impl->relations = std::move(relations);
    impl->label = std::move(label);
    impl->spec = std::move(spec);
    finish(*impl);
    return Group(std::move(impl));
  }

  u64 id() const { return impl_->id; }
  u64 order() const { return impl_->order; }
  const std::string& label() const { return impl_->label; }
  const std::optional<GroupSpec>& spec() const { return impl_->spec; }
  const std::vector<Generator>& generators() const { return impl_->generators; }
  const std::vector<Relation>& relations() const { return impl_->relations; }
  bool has_table() const { return !impl_->table.empty(); }

  Index identity() const { return 0; }

  Index mul(Index a, Index b) const {
    if (!impl_->table.empty()) return impl_->table[u64{a} * impl_->order + b];
    return impl_->engine->mul(a, b);
  }
  Index inv(Index a) const { return impl_->inverse.empty() ? impl_->engine->inv(a) : impl_->inverse[a]; }

  Index pow(Index a, std::int64_t e) const {
    if (e < 0) {
      a = inv(a);
      e = -e;
    }
    Index result = 0;
    while (e > 0) {
      if (e & 1) result = mul(result, a);
      a = mul(a, a);
      e >>= 1;
    }
    return result;
  }

  Index conjugate(Index g, Index x) const { return mul(mul(g, x), inv(g)); }

  u64 element_order(Index a) const {
    u64 t = 1;
    for (Index p = a; p != 0; p = mul(p, a)) ++t;
    return t;
  }

  std::vector<u64> element_orders() const {
    std::vector<u64> out(order());
    for (Index g = 0; g < order(); ++g) out[g] = element_order(g);
    return out;
  }

  std::string element_name(Index a) const { return impl_->engine->name(a); }
  std::vector<std::int64_t> coordinates(Index a) const { return impl_->engine->coordinates(a); }

  Index generator(const std::string& name) const {
    for (const auto& g : impl_->generators)
      if (g.name == name) return g.element;
    throw DomainError("group " + label() + " has no generator named " + name);
  }

  std::optional<std::size_t> generator_position(const std::string& name) const {
    for (std::size_t i = 0; i < impl_->generators.size(); ++i)
      if (impl_->generators[i].name == name) return i;
    return std::nullopt;
  }

  GroupElement element(Index a) const {
    if (a >= order()) throw DomainError("element index out of range");
    return {id(), a};
  }

  GroupElement compose(const GroupElement& g, const GroupElement& h) const {
    check_parent(g);
    check_parent(h);
    return {id(), mul(g.index, h.index)};
  }
  GroupElement inverse(const GroupElement& g) const {
    check_parent(g);
    return {id(), inv(g.index)};
  }

  /// Evaluates a word with generator i replaced by images[i] (in this group).
  Index evaluate(const Word& word, const std::vector<Index>& images) const {
    Index out = 0;
    for (const Letter& l : word) out = mul(out, pow(images[l.generator], l.exponent));
    return out;
  }

  std::vector<Index> generator_elements() const {
    std::vector<Index> out;
    for (const auto& g : impl_->generators) out.push_back(g.element);
    return out;
  }

  /// Sorted elements of the subgroup generated by gens.
  std::vector<Index> generated_subgroup(const std::vector<Index>& gens) const {
    std::vector<bool> seen(order(), false);
    std::vector<Index> out{0};
    seen[0] = true;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (Index s : gens) {
        const Index h = mul(out[i], s);
        if (!seen[h]) {
          seen[h] = true;
          out.push_back(h);
        }
      }
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const Group& a, const Group& b) { return a.impl_ == b.impl_; }

 private:
  struct Impl {
    u64 id = 0;
    u64 order = 0;
    std::string label;
    std::optional<GroupSpec> spec;
    std::shared_ptr<const detail::Engine> engine;
    std::vector<Generator> generators;
    std::vector<Relation> relations;
    std::vector<Index> table;
    std::vector<Index> inverse;
    std::vector<Group> children;  // keeps component groups alive for product engines
  };

  explicit Group(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  static u64 next_id() {
    static std::atomic<u64> counter{1};
    return counter++;
  }

  static void finish(Impl& impl) {
    impl.id = next_id();
    impl.order = impl.engine->order();
    if (impl.order <= kTableLimit) {
      impl.table.resize(impl.order * impl.order);
      for (u64 a = 0; a < impl.order; ++a)
        for (u64 b = 0; b < impl.order; ++b) impl.table[a * impl.order + b] = impl.engine->mul(static_cast<Index>(a), static_cast<Index>(b));
      impl.inverse.resize(impl.order);
      for (u64 a = 0; a < impl.order; ++a) impl.inverse[a] = impl.engine->inv(static_cast<Index>(a));
    }
  }

  void check_parent(const GroupElement& g) const {
    if (g.group_id != id()) throw DomainError("element belongs to a different group");
  }

  friend struct GroupFactory;

  std::shared_ptr<const Impl> impl_;
};

/// Bound homomorphism H -> (Z/a)^*, tabulated on every element of H.
class Character {
 public:
  Character() = default;

  /// Extends generator images to a homomorphism; throws when they are inconsistent.
  static Character from_generator_images(const Group& h, u64 modulus, const std::vector<u64>& images) {
    if (images.size() != h.generators().size()) throw DomainError("character: wrong number of generator images");
    Character c;
    c.modulus_ = modulus;
    c.images_ = images;
    const u64 unset = modulus;  // never a valid residue
    c.values_.assign(h.order(), unset);
    c.values_[0] = 1 % modulus;
    std::deque<Index> queue{0};
    while (!queue.empty()) {
      const Index g = queue.front();
      queue.pop_front();
      for (std::size_t s = 0; s < images.size(); ++s) {
        const Index next = h.mul(g, h.generators()[s].element);
        const u64 value = modular::mulmod(c.values_[g], images[s] % modulus, modulus);
        if (c.values_[next] == unset) {
          c.values_[next] = value;
          queue.push_back(next);
        } else if (c.values_[next] != value) {
          throw DomainError("invalid action: generator images do not define a homomorphism " + h.label() + " -> (Z/" +
                            std::to_string(modulus) + ")^*");
        }
      }
    }
    return c;
  }

  /// Maps generators by role: u for cyclic generators, v for X in T*(n), w for R.
  static Character from_action(const Group& h, const Action& action) {
    std::vector<u64> images;
    for (const auto& g : h.generators()) {
      switch (g.role) {
        case 'u': images.push_back(action.u); break;
        case 'v': images.push_back(action.v); break;
        case 'w': images.push_back(action.w); break;
        default: images.push_back(1); break;
      }
    }
    return from_generator_images(h, action.modulus, images);
  }

  static Character trivial(const Group& h, u64 modulus) {
    return from_generator_images(h, modulus, std::vector<u64>(h.generators().size(), 1));
  }

  u64 modulus() const { return modulus_; }
  u64 operator()(Index h) const { return values_[h]; }
  const std::vector<u64>& generator_images() const { return images_; }
  const std::vector<u64>& values() const { return values_; }
  bool is_trivial() const {
    return std::all_of(values_.begin(), values_.end(), [&](u64 x) { return x == 1 % modulus_; });
  }

 private:
  u64 modulus_ = 1;
  std::vector<u64> images_;
  std::vector<u64> values_;
};

namespace detail {

class DirectEngine final : public Engine {
 public:
  DirectEngine(Group left, Group right) : left_(std::move(left)), right_(std::move(right)), nl_(left_.order()) {}
  u64 order() const override { return left_.order() * right_.order(); }
  Index mul(Index a, Index b) const override {
    return static_cast<Index>(left_.mul(a % nl_, b % nl_) + nl_ * right_.mul(static_cast<Index>(a / nl_), static_cast<Index>(b / nl_)));
  }
  Index inv(Index a) const override { return static_cast<Index>(left_.inv(a % nl_) + nl_ * right_.inv(static_cast<Index>(a / nl_))); }
  std::string name(Index a) const override {
    return "(" + left_.element_name(a % nl_) + "," + right_.element_name(static_cast<Index>(a / nl_)) + ")";
  }
  std::vector<std::int64_t> coordinates(Index a) const override {
    auto c = left_.coordinates(a % nl_);
    auto r = right_.coordinates(static_cast<Index>(a / nl_));
    c.insert(c.end(), r.begin(), r.end());
    return c;
  }

 private:
  Group left_, right_;
  u64 nl_;
};

class SemidirectEngine final : public Engine {
 public:
  SemidirectEngine(u64 a, Group h, Character alpha) : a_(a), h_(std::move(h)), alpha_(std::move(alpha)) {}
  u64 order() const override { return a_ * h_.order(); }
  // (x1, h1)(x2, h2) = (x1 + alpha(h1) x2, h1 h2)
  Index mul(Index p, Index q) const override {
    const u64 x1 = p % a_, x2 = q % a_;
    const Index h1 = static_cast<Index>(p / a_), h2 = static_cast<Index>(q / a_);
    const u64 x = modular::addmod(x1, modular::mulmod(alpha_(h1), x2, a_), a_);
    return static_cast<Index>(x + a_ * h_.mul(h1, h2));
  }
  Index inv(Index p) const override {
    const u64 x = p % a_;
    const Index hi = h_.inv(static_cast<Index>(p / a_));
    const u64 y = (a_ - modular::mulmod(alpha_(hi), x, a_)) % a_;
    return static_cast<Index>(y + a_ * hi);
  }
  std::string name(Index p) const override {
    return "(" + std::to_string(p % a_) + "," + h_.element_name(static_cast<Index>(p / a_)) + ")";
  }
  std::vector<std::int64_t> coordinates(Index p) const override {
    std::vector<std::int64_t> c{static_cast<std::int64_t>(p % a_)};
    auto r = h_.coordinates(static_cast<Index>(p / a_));
    c.insert(c.end(), r.begin(), r.end());
    return c;
  }

 private:
  u64 a_;
  Group h_;
  Character alpha_;
};

inline Word word(std::initializer_list<std::pair<std::size_t, std::int64_t>> letters) {
  Word w;
  for (auto [g, e] : letters) w.push_back({g, e});
  return w;
}

inline Relation relation(std::string name, std::vector<Word> sides) { return {std::move(name), std::move(sides)}; }

// Presentation relations for T*(n) (generators X=0, P=1, Q=2) and O*(n) (R=3).
// With has_x false the X generator is absent and P, Q, R shift down by one.
inline std::vector<Relation> quaternion_family_relations(u64 n, bool has_x, bool has_r) {
  const std::size_t off = has_x ? 1 : 0;
  const std::size_t x = 0, p = off, q = off + 1, r = off + 2;
  const auto three_n = static_cast<std::int64_t>(modular::ipow(3, n));
  std::vector<Relation> rels;
  if (has_x)
    rels.push_back(relation("X^" + std::to_string(three_n) + "=P^4=1", {word({{x, three_n}}), word({{p, 4}}), word({})}));
  else
    rels.push_back(relation("P^4=1", {word({{p, 4}}), word({})}));
  if (has_r)
    rels.push_back(relation("P^2=Q^2=R^2", {word({{p, 2}}), word({{q, 2}}), word({{r, 2}})}));
  else
    rels.push_back(relation("P^2=Q^2", {word({{p, 2}}), word({{q, 2}})}));
  rels.push_back(relation("PQP^-1=Q^-1", {word({{p, 1}, {q, 1}, {p, -1}}), word({{q, -1}})}));
  if (has_x) {
    rels.push_back(relation("XPX^-1=Q", {word({{x, 1}, {p, 1}, {x, -1}}), word({{q, 1}})}));
    rels.push_back(relation("XQX^-1=PQ", {word({{x, 1}, {q, 1}, {x, -1}}), word({{p, 1}, {q, 1}})}));
  }
  if (has_r) {
    if (has_x) rels.push_back(relation("RXR^-1=X^-1", {word({{r, 1}, {x, 1}, {r, -1}}), word({{x, -1}})}));
    rels.push_back(relation("RPR^-1=QP", {word({{r, 1}, {p, 1}, {r, -1}}), word({{q, 1}, {p, 1}})}));
    rels.push_back(relation("RQR^-1=Q^-1", {word({{r, 1}, {q, 1}, {r, -1}}), word({{q, -1}})}));
  }
  return rels;
}

inline std::vector<Relation> shifted(const std::vector<Relation>& rels, std::size_t offset, const std::string& prefix) {
  std::vector<Relation> out;
  for (Relation rel : rels) {
    for (Word& w : rel.sides)
      for (Letter& l : w) l.generator += offset;
    if (!prefix.empty()) rel.name = prefix + rel.name;
    out.push_back(std::move(rel));
  }
  return out;
}

}  // namespace detail

struct GroupFactory {
  using Impl = Group::Impl;

  static Group make(std::shared_ptr<Impl> impl) {
    Group::finish(*impl);
    return Group(std::move(impl));
  }

  static Group build(const GroupSpec& spec) {
    auto impl = std::make_shared<Impl>();
    impl->spec = spec;
    impl->label = spec.to_string();
    using K = GroupSpec::Kind;
    switch (spec.kind) {
      case K::Cyclic: {
        impl->engine = std::make_shared<detail::CyclicEngine>(spec.param);
        impl->generators = {{"g", static_cast<Index>(1 % spec.param), 'u'}};
        impl->relations = {detail::relation("g^" + std::to_string(spec.param) + "=1",
                                            {detail::word({{0, static_cast<std::int64_t>(spec.param)}}), detail::word({})})};
        break;
      }
      case K::Q8:
      case K::TStar: {
        const u64 n = spec.kind == K::Q8 ? 0 : spec.param;
        auto engine = std::make_shared<detail::TStarEngine>(n);
        impl->engine = engine;
        if (n > 0) impl->generators.push_back({"X", 8, 'v'});
        impl->generators.push_back({"P", 1, 0});
        impl->generators.push_back({"Q", 2, 0});
        impl->relations = detail::quaternion_family_relations(n, n > 0, false);
        break;
      }
      case K::Q16:
      case K::OStar: {
        const u64 n = spec.kind == K::Q16 ? 0 : spec.param;
        auto engine = std::make_shared<detail::OStarEngine>(n);
        impl->engine = engine;
        if (n > 0) impl->generators.push_back({"X", 8, 0});
        impl->generators.push_back({"P", 1, 0});
        impl->generators.push_back({"Q", 2, 0});
        impl->generators.push_back({"R", static_cast<Index>(engine->half()), 'w'});
        impl->relations = detail::quaternion_family_relations(n, n > 0, true);
        break;
      }
      case K::Direct: {
        Group left = build(spec.children[0]);
        Group right = build(spec.children[1]);
        const u64 nl = left.order();
        const std::size_t gl = left.generators().size();
        bool clash = false;
        for (const auto& a : left.generators())
          for (const auto& b : right.generators()) clash = clash || a.name == b.name;
        const std::string lp = clash ? "1." : "", rp = clash ? "2." : "";
        for (const auto& g : left.generators()) impl->generators.push_back({lp + g.name, g.element, g.role});
        for (const auto& g : right.generators()) impl->generators.push_back({rp + g.name, static_cast<Index>(nl * g.element), g.role});
        impl->relations = detail::shifted(left.relations(), 0, lp);
        auto rr = detail::shifted(right.relations(), gl, rp);
        impl->relations.insert(impl->relations.end(), rr.begin(), rr.end());
        for (std::size_t i = 0; i < gl; ++i)
          for (std::size_t j = gl; j < impl->generators.size(); ++j) {
            const auto& a = impl->generators[i].name;
            const auto& b = impl->generators[j].name;
            impl->relations.push_back(detail::relation(a + b + "=" + b + a, {detail::word({{i, 1}, {j, 1}}), detail::word({{j, 1}, {i, 1}})}));
          }
        impl->engine = std::make_shared<detail::DirectEngine>(left, right);
        impl->children = {left, right};
        break;
      }
      case K::Semidirect: {
        validate_action(spec);
        const u64 a = spec.param;
        Group h = build(spec.children[0]);
        Character alpha = Character::from_action(h, spec.action);
        impl->generators.push_back({"A", static_cast<Index>(1 % a), 0});
        for (const auto& g : h.generators()) impl->generators.push_back({g.name, static_cast<Index>(a * g.element), 0});
        impl->relations.push_back(detail::relation("A^" + std::to_string(a) + "=1", {detail::word({{0, static_cast<std::int64_t>(a)}}), detail::word({})}));
        auto hr = detail::shifted(h.relations(), 1, "");
        impl->relations.insert(impl->relations.end(), hr.begin(), hr.end());
        for (std::size_t s = 0; s < h.generators().size(); ++s) {
          const u64 image = alpha.generator_images()[s] % a;
          const auto& name = h.generators()[s].name;
          impl->relations.push_back(detail::relation(name + "A" + name + "^-1=A^" + std::to_string(image),
                                                     {detail::word({{s + 1, 1}, {0, 1}, {s + 1, -1}}),
                                                      detail::word({{0, static_cast<std::int64_t>(image)}})}));
        }
        impl->engine = std::make_shared<detail::SemidirectEngine>(a, h, alpha);
        impl->children = {h};
        break;
      }
    }
    return make(std::move(impl));
  }
};

inline Group Group::build(const GroupSpec& spec) { return GroupFactory::build(spec); }

inline Group build(const GroupSpec& spec) { return Group::build(spec); }

/// Order predicted by the spec's product formula.
inline u64 expected_order(const GroupSpec& spec) { return spec.order(); }

struct RelationCheck {
  std::string name;
  bool passed;
};

struct PresentationReport {
  std::vector<RelationCheck> relations;
  u64 expected_order = 0;
  u64 element_count = 0;
  u64 generated_order = 0;
  bool passed = false;
  std::optional<std::string> first_failure;
};

/// Checks every presentation relation on the canonical generators and that
/// the generated subgroup has the order the family formula predicts.
inline PresentationReport verify_presentation(const Group& g) {
  PresentationReport report;
  const auto images = g.generator_elements();
  for (const Relation& rel : g.relations()) {
    bool ok = true;
    const Index first = g.evaluate(rel.sides.front(), images);
    for (const Word& side : rel.sides) ok = ok && g.evaluate(side, images) == first;
    report.relations.push_back({rel.name, ok});
    if (!ok && !report.first_failure) report.first_failure = rel.name;
  }
  report.expected_order = g.spec() ? expected_order(*g.spec()) : g.order();
  report.element_count = g.order();
  report.generated_order = g.generated_subgroup(images).size();
  const bool orders_ok = report.element_count == report.expected_order && report.generated_order == report.expected_order;
  if (!orders_ok && !report.first_failure) report.first_failure = "order";
  report.passed = !report.first_failure.has_value();
  return report;
}

/// First violated group axiom over all pairs/triples, or nullopt.
inline std::optional<std::string> check_group_axioms(const Group& g) {
  const auto n = static_cast<Index>(g.order());
  for (Index a = 0; a < n; ++a) {
    if (g.mul(a, 0) != a || g.mul(0, a) != a) return "identity fails at " + std::to_string(a);
    if (g.mul(a, g.inv(a)) != 0 || g.mul(g.inv(a), a) != 0) return "inverse fails at " + std::to_string(a);
    for (Index b = 0; b < n; ++b) {
      const Index ab = g.mul(a, b);
      for (Index c = 0; c < n; ++c)
        if (g.mul(ab, c) != g.mul(a, g.mul(b, c))) return "associativity fails at (" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
    }
  }
  return std::nullopt;
}

/// Invariant factors of an abelian subgroup given by its element list.
inline AbelianInvariants abelian_structure(const Group& g, const std::vector<Index>& elements) {
  return AbelianInvariants::from_torsion_counts(elements.size(), [&](u64 d) {
    u64 count = 0;
    for (Index x : elements) count += g.pow(x, static_cast<std::int64_t>(d)) == 0;
    return count;
  });
}

struct CenterResult {
  std::vector<Index> elements;
  AbelianInvariants invariants;
};

inline CenterResult center(const Group& g) {
  CenterResult out;
  const auto gens = g.generator_elements();
  for (Index x = 0; x < g.order(); ++x) {
    bool central = true;
    for (Index s : gens) central = central && g.mul(x, s) == g.mul(s, x);
    if (central) out.elements.push_back(x);
  }
  out.invariants = abelian_structure(g, out.elements);
  return out;
}

/// Normal closure of the generator commutators, as a membership bitmap.
inline std::vector<bool> derived_subgroup(const Group& g) {
  const auto gens = g.generator_elements();
  std::vector<Index> seeds;
  for (Index a : gens)
    for (Index b : gens) seeds.push_back(g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b))));
  std::vector<bool> member(g.order(), false);
  std::vector<Index> elements{0};
  member[0] = true;
  // Close under multiplication by seeds and under conjugation by generators.
  for (std::size_t i = 0; i < elements.size(); ++i) {
    std::vector<Index> next;
    for (Index s : seeds) next.push_back(g.mul(elements[i], s));
    for (Index s : gens) {
      next.push_back(g.conjugate(s, elements[i]));
      next.push_back(g.conjugate(g.inv(s), elements[i]));
    }
    for (Index h : next)
      if (!member[h]) {
        member[h] = true;
        elements.push_back(h);
      }
  }
  return member;
}

inline AbelianInvariants abelianization(const Group& g) {
  const auto derived = derived_subgroup(g);
  const u64 d = static_cast<u64>(std::count(derived.begin(), derived.end(), true));
  return AbelianInvariants::from_torsion_counts(g.order() / d, [&](u64 e) {
    u64 count = 0;
    for (Index x = 0; x < g.order(); ++x) count += derived[g.pow(x, static_cast<std::int64_t>(e))];
    return count / d;
  });
}

}  // namespace spaceform
