#pragma once

// Automorphism groups by generator-image search, the action-fixing subgroups
// Aut_alpha, inner automorphisms, and the unit by which an automorphism acts
// on each CRT component of the top cohomology group.

#include <algorithm>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "spaceform/groups.hpp"
#include "spaceform/modular.hpp"

namespace spaceform {

class TooLarge : public DomainError {
 public:
  using DomainError::DomainError;
};

struct Automorphism {
  u64 group_id = 0;
  std::vector<Index> images;  // images of the canonical generators
  std::vector<Index> map;     // full element map

  Index operator()(Index g) const { return map[g]; }

  friend bool operator==(const Automorphism& a, const Automorphism& b) { return a.group_id == b.group_id && a.images == b.images; }
  friend bool operator<(const Automorphism& a, const Automorphism& b) { return a.images < b.images; }
};

struct AutOptions {
  u64 max_order = 10000;
  unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

// Extends generator images to a map src -> dst along the Cayley graph. Fails when
// two paths disagree, or when bijective is requested and the map is not onto.
inline std::optional<std::vector<Index>> extend_to_map(const Group& src, const Group& dst, const std::vector<Index>& images, bool bijective) {
  const Index unset = static_cast<Index>(dst.order());
  std::vector<Index> map(src.order(), unset);
  map[0] = 0;
  const auto gens = src.generator_elements();
  std::vector<Index> queue{0};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const Index g = queue[i];
    for (std::size_t s = 0; s < gens.size(); ++s) {
      const Index h = src.mul(g, gens[s]);
      const Index value = dst.mul(map[g], images[s]);
      if (map[h] == unset) {
        map[h] = value;
        queue.push_back(h);
      } else if (map[h] != value) {
        return std::nullopt;
      }
    }
  }
  if (bijective) {
    if (src.order() != dst.order() || queue.size() != src.order()) return std::nullopt;
    std::vector<bool> hit(dst.order(), false);
    for (Index v : map) {
      if (hit[v]) return std::nullopt;
      hit[v] = true;
    }
  }
  return map;
}

inline bool relations_hold(const Group& dst, const Relation& rel, const std::vector<Index>& images) {
  const Index first = dst.evaluate(rel.sides.front(), images);
  for (const Word& side : rel.sides)
    if (dst.evaluate(side, images) != first) return false;
  return true;
}

}  // namespace detail

/// All homomorphisms src -> dst (isomorphisms when bijective), as full maps,
/// sorted by generator images. Candidates are filtered by element order, then by
/// the source presentation relations as soon as all their generators are assigned.
inline std::vector<std::vector<Index>> search_homomorphisms(const Group& src, const Group& dst, bool bijective, unsigned threads = 0) {
  const auto gens = src.generator_elements();
  const std::size_t r = gens.size();
  const auto dst_orders = dst.element_orders();
  std::vector<std::vector<Index>> candidates(r);
  for (std::size_t s = 0; s < r; ++s) {
    const u64 ord = src.element_order(gens[s]);
    for (Index y = 0; y < dst.order(); ++y)
      if (bijective ? dst_orders[y] == ord : ord % dst_orders[y] == 0) candidates[s].push_back(y);
  }
  std::vector<std::size_t> order(r);
  for (std::size_t i = 0; i < r; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return candidates[a].size() < candidates[b].size(); });
  std::vector<std::size_t> rank(r);
  for (std::size_t i = 0; i < r; ++i) rank[order[i]] = i;
  std::vector<std::vector<const Relation*>> checks(r);
  for (const Relation& rel : src.relations()) {
    std::size_t depth = 0;
    bool any = false;
    for (const Word& w : rel.sides)
      for (const Letter& l : w) {
        depth = std::max(depth, rank[l.generator]);
        any = true;
      }
    if (any) checks[depth].push_back(&rel);
  }

  auto explore = [&](Index first) {
    std::vector<std::vector<Index>> found;
    if (r == 0) {
      if (auto map = detail::extend_to_map(src, dst, {}, bijective)) found.push_back(*map);
      return found;
    }
    std::vector<Index> images(r, 0);
    auto dfs = [&](auto& self, std::size_t depth) -> void {
      if (depth == r) {
        if (auto map = detail::extend_to_map(src, dst, images, bijective)) found.push_back(std::move(*map));
        return;
      }
      const std::size_t pos = order[depth];
      auto try_value = [&](Index y) {
        images[pos] = y;
        for (const Relation* rel : checks[depth])
          if (!detail::relations_hold(dst, *rel, images)) return;
        self(self, depth + 1);
      };
      if (depth == 0)
        try_value(first);
      else
        for (Index y : candidates[pos]) try_value(y);
    };
    dfs(dfs, 0);
    return found;
  };

  const std::vector<Index> firsts = r == 0 ? std::vector<Index>{0} : candidates[order[0]];
  std::vector<std::vector<std::vector<Index>>> parts(firsts.size());
  const unsigned workers = std::min<std::size_t>(threads != 0 ? threads : std::max(1U, std::thread::hardware_concurrency()), firsts.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < firsts.size(); ++i) parts[i] = explore(firsts[i]);
  } else {
    // Partition by first-generator image; merged below in candidate order.
    std::vector<std::future<void>> futures;
    for (unsigned w = 0; w < workers; ++w)
      futures.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < firsts.size(); i += workers) parts[i] = explore(firsts[i]);
      }));
    for (auto& f : futures) f.get();
  }
  std::vector<std::vector<Index>> out;
  for (auto& p : parts)
    for (auto& m : p) out.push_back(std::move(m));
  std::sort(out.begin(), out.end(), [&](const std::vector<Index>& a, const std::vector<Index>& b) {
    for (std::size_t s = 0; s < r; ++s)
      if (a[gens[s]] != b[gens[s]]) return a[gens[s]] < b[gens[s]];
    return false;
  });
  return out;
}

inline Automorphism automorphism_from_map(const Group& g, std::vector<Index> map) {
  Automorphism a;
  a.group_id = g.id();
  for (Index s : g.generator_elements()) a.images.push_back(map[s]);
  a.map = std::move(map);
  return a;
}

/// Checks relations and bijectivity of the given generator images.
inline std::optional<Automorphism> complete_automorphism(const Group& g, const std::vector<Index>& images) {
  if (images.size() != g.generators().size()) return std::nullopt;
  for (Index y : images)
    if (y >= g.order()) return std::nullopt;
  for (const Relation& rel : g.relations())
    if (!detail::relations_hold(g, rel, images)) return std::nullopt;
  auto map = detail::extend_to_map(g, g, images, true);
  if (!map) return std::nullopt;
  return automorphism_from_map(g, std::move(*map));
}

inline Automorphism identity_automorphism(const Group& g) { return *complete_automorphism(g, g.generator_elements()); }

/// Every automorphism of g, sorted by generator images.
inline std::vector<Automorphism> enumerate_automorphisms(const Group& g, const AutOptions& options = {}) {
  if (g.order() > options.max_order)
    throw TooLarge("group " + g.label() + " of order " + std::to_string(g.order()) + " exceeds the enumeration bound " +
                   std::to_string(options.max_order) + "; too large, supply closed form");
  std::vector<Automorphism> out;
  for (auto& map : search_homomorphisms(g, g, true, options.threads)) out.push_back(automorphism_from_map(g, std::move(map)));
  return out;
}

/// phi o psi
inline Automorphism compose(const Automorphism& phi, const Automorphism& psi) {
  if (phi.group_id != psi.group_id) throw DomainError("compose: automorphisms of different groups");
  Automorphism out;
  out.group_id = phi.group_id;
  out.map.resize(psi.map.size());
  for (std::size_t x = 0; x < psi.map.size(); ++x) out.map[x] = phi.map[psi.map[x]];
  for (Index y : psi.images) out.images.push_back(phi.map[y]);
  return out;
}

inline Automorphism inverse(const Automorphism& phi, const Group& g) {
  std::vector<Index> map(phi.map.size());
  for (std::size_t x = 0; x < map.size(); ++x) map[phi.map[x]] = static_cast<Index>(x);
  return automorphism_from_map(g, std::move(map));
}

/// {w in (Z/b)^* : w = 1 mod ord_a(u)}: the automorphisms l -> w l of Z/b that
/// fix the action of its generator by u on Z/a.
inline std::vector<u64> cyclic_fixing_units(u64 b, u64 u, u64 a) {
  const u64 ord = modular::multiplicative_order(u, a);
  std::vector<u64> out;
  for (u64 w : modular::unit_group(b).elements())
    if (w % ord == 1 % ord) out.push_back(w);
  return out;
}

/// Automorphisms phi with chi o phi = chi.
inline std::vector<Automorphism> aut_fixing_action(const Group& g, const Character& chi, const AutOptions& options = {}) {
  std::vector<Automorphism> out;
  for (Automorphism& phi : enumerate_automorphisms(g, options)) {
    bool fixes = true;
    for (std::size_t s = 0; s < phi.images.size(); ++s) fixes = fixes && chi(phi.images[s]) == chi.generator_images()[s] % chi.modulus();
    if (fixes) out.push_back(std::move(phi));
  }
  if (g.spec() && g.spec()->kind == GroupSpec::Kind::Cyclic) {
    std::vector<u64> brute;
    for (const auto& phi : out) brute.push_back(phi.images[0]);
    std::sort(brute.begin(), brute.end());
    const u64 u = chi.generator_images()[0];
    if (brute != cyclic_fixing_units(g.order(), u, chi.modulus()))
      throw std::logic_error("aut_fixing_action: brute force disagrees with the cyclic closed form");
  }
  return out;
}

inline std::vector<Automorphism> aut_fixing_action(const Group& g, const Action& action, const AutOptions& options = {}) {
  return aut_fixing_action(g, Character::from_action(g, action), options);
}

/// Conjugation maps x -> h x h^-1, deduplicated and sorted.
inline std::vector<Automorphism> inner_automorphisms(const Group& g, const AutOptions& options = {}) {
  if (g.order() > options.max_order)
    throw TooLarge("group " + g.label() + " exceeds the enumeration bound; too large, supply closed form");
  std::set<std::vector<Index>> seen;
  std::vector<Automorphism> out;
  for (Index h = 0; h < g.order(); ++h) {
    std::vector<Index> images;
    for (Index s : g.generator_elements()) images.push_back(g.conjugate(h, s));
    if (!seen.insert(images).second) continue;
    std::vector<Index> map(g.order());
    for (Index x = 0; x < g.order(); ++x) map[x] = g.conjugate(h, x);
    out.push_back(automorphism_from_map(g, std::move(map)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct UnitComponent {
  std::string label;
  u64 modulus;
  u64 unit;
};

/// phi^* on H^degree, one unit per CRT component of the top cohomology group.
struct InducedUnitAction {
  u64 degree = 0;
  std::vector<UnitComponent> components;

  u64 modulus() const {
    u64 m = 1;
    for (const auto& c : components) m *= c.modulus;
    return m;
  }
  u64 combined() const {
    std::vector<modular::Residue> parts;
    for (const auto& c : components) parts.emplace_back(c.unit, c.modulus);
    return modular::crt_combine(parts).value();
  }
};

/// x-coordinate of phi(X): the unit phi induces on the Z/3^n abelianization of T*(n).
inline u64 three_part_unit(const Group& g, const Automorphism& phi) {
  const auto& spec = *g.spec();
  const u64 three = modular::ipow(3, spec.param);
  const Index image = phi(g.generator("X"));
  const auto coords = g.coordinates(image);
  if (spec.kind == GroupSpec::Kind::OStar && coords.back() != 0) throw std::logic_error("automorphism does not preserve T*(n)");
  return static_cast<u64>(coords[0]) % three;
}

/// r in {1,3,5,7}: after conjugating phi to preserve <P,Q,R> = Q16, phi(RP) is
/// conjugate in Q16 to (RP)^r. Defined up to sign, so r^2 mod 16 is well defined.
inline u64 q16_exponent(const Group& g, const Automorphism& phi) {
  const Index p = g.generator("P"), q = g.generator("Q"), r = g.generator("R");
  const auto sub = g.generated_subgroup({p, q, r});
  std::vector<bool> in_sub(g.order(), false);
  for (Index x : sub) in_sub[x] = true;
  const Index rp = g.mul(r, p);
  for (Index h = 0; h < g.order(); ++h) {
    if (!in_sub[g.conjugate(h, phi(p))] || !in_sub[g.conjugate(h, phi(q))] || !in_sub[g.conjugate(h, phi(r))]) continue;
    const Index y = g.conjugate(h, phi(rp));
    for (u64 e : {1, 3, 5, 7}) {
      const Index target = g.pow(rp, static_cast<std::int64_t>(e));
      for (Index c : sub)
        if (g.conjugate(c, target) == y) return e;
    }
    break;
  }
  throw std::logic_error("q16_exponent: no conjugate of phi preserves the Sylow 2-subgroup <P,Q,R>");
}

namespace detail {

inline bool has_quaternion_part(const GroupSpec& s) {
  switch (s.kind) {
    case GroupSpec::Kind::Cyclic: return false;
    case GroupSpec::Kind::Direct: return has_quaternion_part(s.children[0]) || has_quaternion_part(s.children[1]);
    case GroupSpec::Kind::Semidirect: return has_quaternion_part(s.children[0]);
    default: return true;
  }
}

inline void induced_components(const Group& g, const Automorphism& phi, u64 j, std::vector<UnitComponent>& out) {
  const GroupSpec& spec = *g.spec();
  using K = GroupSpec::Kind;
  switch (spec.kind) {
    case K::Cyclic:
      if (spec.param > 1) out.push_back({"Z/" + std::to_string(spec.param), spec.param, modular::powmod(phi.images[0], j, spec.param)});
      return;
    case K::Q8: out.push_back({"Q8 2-part", 8, 1}); return;
    case K::TStar: {
      out.push_back({"Q8 2-part", 8, 1});
      const u64 three = modular::ipow(3, spec.param);
      out.push_back({"3-part Z/" + std::to_string(three), three, modular::powmod(three_part_unit(g, phi), j, three)});
      return;
    }
    case K::Q16:
    case K::OStar: {
      out.push_back({"Q16 2-part", 16, modular::powmod(q16_exponent(g, phi), j, 16)});
      if (spec.kind == K::OStar) {
        const u64 three = modular::ipow(3, spec.param);
        out.push_back({"3-part Z/" + std::to_string(three), three, modular::powmod(three_part_unit(g, phi), j, three)});
      }
      return;
    }
    case K::Direct: {
      const Group left = build(spec.children[0]);
      const Group right = build(spec.children[1]);
      const u64 nl = left.order();
      std::vector<Index> li, ri;
      for (Index s : left.generator_elements()) {
        const Index y = phi(s);
        if (y / nl != 0) throw DomainError("automorphism does not preserve the left direct factor");
        li.push_back(static_cast<Index>(y % nl));
      }
      for (Index s : right.generator_elements()) {
        const Index y = phi(static_cast<Index>(nl * s));
        if (y % nl != 0) throw DomainError("automorphism does not preserve the right direct factor");
        ri.push_back(static_cast<Index>(y / nl));
      }
      induced_components(left, *complete_automorphism(left, li), j, out);
      induced_components(right, *complete_automorphism(right, ri), j, out);
      return;
    }
    case K::Semidirect: {
      const u64 a = spec.param;
      const Group h = build(spec.children[0]);
      const Index ya = phi(static_cast<Index>(1 % a));
      if (ya / a != 0) throw std::logic_error("automorphism does not preserve Z/a");
      if (a > 1) out.push_back({"Z/" + std::to_string(a), a, modular::powmod(ya % a, j, a)});
      std::vector<Index> hi;
      for (Index s : h.generator_elements()) hi.push_back(static_cast<Index>(phi(static_cast<Index>(a * s)) / a));
      induced_components(h, *complete_automorphism(h, hi), j, out);
      return;
    }
  }
}

}  // namespace detail

inline InducedUnitAction induced_unit_action(const Group& g, const Automorphism& phi, u64 degree) {
  if (!g.spec()) throw DomainError("induced_unit_action: group has no family spec");
  if (degree == 0 || degree % 2 != 0) throw DomainError("induced_unit_action: degree must be even and positive");
  if (detail::has_quaternion_part(*g.spec()) && degree % 4 != 0)
    throw DomainError("induced_unit_action: degree " + std::to_string(degree) + " is not a multiple of the period 4 of " + g.label());
  InducedUnitAction out;
  out.degree = degree;
  detail::induced_components(g, phi, degree / 2, out.components);
  return out;
}

/// The splitting map: restriction to Z/a (a unit l) and the induced automorphism of H.
struct SplitAutomorphism {
  u64 unit;
  std::vector<Index> complement_images;
  friend auto operator<=>(const SplitAutomorphism&, const SplitAutomorphism&) = default;
};

inline SplitAutomorphism split_semidirect_automorphism(const Group& g, const Automorphism& phi) {
  const GroupSpec& spec = *g.spec();
  if (spec.kind != GroupSpec::Kind::Semidirect) throw DomainError("split: not a semidirect product");
  const u64 a = spec.param;
  const Index ya = phi(static_cast<Index>(1 % a));
  if (ya / a != 0) throw std::logic_error("automorphism does not preserve Z/a");
  SplitAutomorphism out{ya % a, {}};
  const auto& gens = g.generators();
  for (std::size_t s = 1; s < gens.size(); ++s) out.complement_images.push_back(static_cast<Index>(phi(gens[s].element) / a));
  return out;
}

/// The automorphisms as an abstract group under composition (identity at index 0),
/// with a greedily chosen generating set and no relations.
inline Group automorphism_group(const Group& g, const std::vector<Automorphism>& auts) {
  const u64 n = auts.size();
  std::map<std::vector<Index>, Index> position;
  std::vector<const Automorphism*> order;
  const auto identity_images = g.generator_elements();
  for (const auto& a : auts)
    if (a.images == identity_images) order.push_back(&a);
  if (order.size() != 1) throw DomainError("automorphism_group: identity missing");
  for (const auto& a : auts)
    if (a.images != identity_images) order.push_back(&a);
  for (Index i = 0; i < n; ++i) position[order[i]->images] = i;
  std::vector<Index> table(n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      auto it = position.find(compose(*order[i], *order[j]).images);
      if (it == position.end()) throw DomainError("automorphism_group: set is not closed under composition");
      table[u64{i} * n + j] = it->second;
    }
  Group bare = Group::from_table(n, table, {}, {}, "Aut(" + g.label() + ")");
  std::vector<Generator> gens;
  std::vector<Index> chosen;
  u64 reached = 1;
  for (Index x = 1; x < n && reached < n; ++x) {
    auto with = chosen;
    with.push_back(x);
    const u64 size = bare.generated_subgroup(with).size();
    if (size > reached) {
      chosen = with;
      reached = size;
      gens.push_back({"a" + std::to_string(gens.size() + 1), x, 0});
    }
  }
  return Group::from_table(n, table, gens, {}, "Aut(" + g.label() + ")");
}

}  // namespace spaceform
