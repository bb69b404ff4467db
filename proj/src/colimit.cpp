#include "omegarel/colimit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace omegarel {

// ---------------------------------------------------------------------------
// Blocks

std::string Block::label() const {
  std::string out;
  for (const auto& v : vertices) {
    if (!out.empty()) out += '+';
    out += v;
  }
  return out;
}

size_t Block::tuple_count() const {
  size_t n = 1;
  for (const auto& a : attrs) n *= a.domain->size();
  return n;
}

std::string Block::tuple_label(const Key& k) const {
  std::string out;
  for (size_t i = 0; i < attrs.size(); ++i) {
    if (i) out += '|';
    out += attrs[i].domain->label(k.at(i));
  }
  return out;
}

size_t Block::tuple_index(const Key& k) const {
  size_t idx = 0;
  for (size_t i = 0; i < attrs.size(); ++i)
    idx = idx * attrs[i].domain->size() + (size_t)k.at(i);
  return idx;
}

std::vector<Block> colimit_blocks(const MultiDiagram& d) {
  std::set<std::vector<std::string>> families;
  for (const auto& a : d.graph().arrows()) {
    auto s = a.sources, t = a.targets;
    std::sort(s.begin(), s.end());
    std::sort(t.begin(), t.end());
    families.insert(std::move(s));
    families.insert(std::move(t));
  }
  for (const auto& v : d.graph().isolated_vertices()) families.insert({v});

  std::vector<Block> blocks;
  for (const auto& fam : families) {
    Block b;
    b.vertices = fam;
    for (const auto& v : fam) b.attrs.push_back(d.attribute_of(v));
    blocks.push_back(std::move(b));
  }
  return blocks;
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

size_t block_index(const std::vector<Block>& blocks,
                   std::vector<std::string> family) {
  std::sort(family.begin(), family.end());
  for (size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].vertices == family) return i;
  throw GraphError("no block for family " + [&] {
    std::string s;
    for (const auto& v : family) s += (s.empty() ? "" : "+") + v;
    return s;
  }());
}

// Pointwise plus of two relations with identical attribute layout.
Relation plus_rel(const Relation& a, const Relation& b, const Flavor& fl) {
  Relation out = a;
  for (const auto& [k, w] : b.entries()) out.set(k, fl.plus(out.at(k), w));
  return out;
}

std::vector<std::string> names_of(const std::vector<Attribute>& attrs) {
  std::vector<std::string> out;
  out.reserve(attrs.size());
  for (const auto& a : attrs) out.push_back(a.name);
  return out;
}

} // namespace

AggregatedDiagram aggregate(const MultiDiagram& d) {
  const Flavor& fl = d.flavor();
  if (!fl.plus_idempotent())
    throw NonIdempotentPlus("aggregation needs lambda+lambda=lambda; flavor (" +
                            fl.times_name() + ", " + fl.plus_name() +
                            ") does not satisfy it");

  AggregatedDiagram agg;
  agg.blocks = colimit_blocks(d);

  for (const auto& a : d.graph().arrows()) {
    size_t j = block_index(agg.blocks, a.sources);
    size_t l = block_index(agg.blocks, a.targets);
    Relation r = d.relation_of(a.name).reorder(agg.blocks[j].vertices,
                                               agg.blocks[l].vertices);
    auto key = std::make_pair(j, l);
    auto it = agg.morphisms.find(key);
    if (it == agg.morphisms.end())
      agg.morphisms.emplace(key, std::move(r));
    else
      it->second = plus_rel(it->second, r, fl);
  }

  for (size_t j = 0; j < agg.blocks.size(); ++j) {
    std::vector<Similarity> parts;
    for (const auto& v : agg.blocks[j].vertices)
      parts.push_back(d.object_at(v).sim);
    Relation diag = Similarity::product(std::move(parts)).as_relation(fl);
    auto key = std::make_pair(j, j);
    auto it = agg.morphisms.find(key);
    if (it == agg.morphisms.end())
      agg.morphisms.emplace(key, std::move(diag));
    else
      it->second = plus_rel(it->second, diag, fl);
  }
  return agg;
}

// ---------------------------------------------------------------------------
// Vague colimit

namespace {

// Every composite of aggregated morphisms must stay below the direct
// morphism between the blocks the composite connects; collect the failures.
void check_composite_bound(const AggregatedDiagram& agg, const Flavor& fl,
                           ColimitObject& out) {
  for (const auto& [k1, f1] : agg.morphisms) {
    for (const auto& [k2, f2] : agg.morphisms) {
      const Block& j1 = agg.blocks[k1.first];
      const Block& l1 = agg.blocks[k1.second];
      const Block& j2 = agg.blocks[k2.first];
      const Block& l2 = agg.blocks[k2.second];
      std::set<std::string> shared;
      for (const auto& v : j2.vertices)
        if (std::find(l1.vertices.begin(), l1.vertices.end(), v) !=
            l1.vertices.end())
          shared.insert(v);
      if (shared.empty()) continue;
      // the composite must itself be a block-to-block morphism
      bool collides = false;
      for (const auto& v : j2.vertices)
        if (!shared.count(v) &&
            std::find(j1.vertices.begin(), j1.vertices.end(), v) !=
                j1.vertices.end())
          collides = true;
      for (const auto& v : l1.vertices)
        if (!shared.count(v) &&
            std::find(l2.vertices.begin(), l2.vertices.end(), v) !=
                l2.vertices.end())
          collides = true;
      if (collides) continue;

      Relation comp = compose(f1, f2, fl);
      if (comp.support_size() == 0) continue;
      std::vector<std::string> s = names_of(comp.sources());
      std::vector<std::string> t = names_of(comp.targets());
      std::sort(s.begin(), s.end());
      std::sort(t.begin(), t.end());

      auto describe = [&](const std::pair<size_t, size_t>& k) {
        return "f{" + agg.blocks[k.first].label() + "->" +
               agg.blocks[k.second].label() + "}";
      };
      auto find_block = [&](const std::vector<std::string>& fam)
          -> std::optional<size_t> {
        for (size_t i = 0; i < agg.blocks.size(); ++i)
          if (agg.blocks[i].vertices == fam) return i;
        return std::nullopt;
      };
      auto bs = find_block(s), bt = find_block(t);
      if (bs && bt) {
        auto bound = agg.morphisms.find({*bs, *bt});
        if (bound != agg.morphisms.end()) {
          Relation aligned = comp.reorder(agg.blocks[*bs].vertices,
                                          agg.blocks[*bt].vertices);
          if (auto w = aligned.leq_witness(bound->second, 1e-9)) {
            size_t ns = agg.blocks[*bs].attrs.size();
            Key sk(w->begin(), w->begin() + ns);
            Key tk(w->begin() + ns, w->end());
            out.violations.push_back(
                describe(k1) + " then " + describe(k2) + " exceeds f{" +
                agg.blocks[*bs].label() + "->" + agg.blocks[*bt].label() +
                "} at (" + agg.blocks[*bs].tuple_label(sk) + ", " +
                agg.blocks[*bt].tuple_label(tk) + ")");
          }
          continue;
        }
      }
      out.violations.push_back(describe(k1) + " then " + describe(k2) +
                               " has no bounding morphism");
    }
  }
  out.precondition_ok = out.violations.empty();
}

} // namespace

ColimitObject vague_colimit(const MultiDiagram& d) {
  const Flavor& fl = d.flavor();
  AggregatedDiagram agg = aggregate(d);

  ColimitObject out;
  out.blocks = agg.blocks;

  std::set<std::pair<size_t, size_t>> keys;
  for (const auto& [k, r] : agg.morphisms) {
    keys.insert(k);
    keys.insert({k.second, k.first});
  }
  for (const auto& [j, l] : keys) {
    Relation c(out.blocks[j].attrs, out.blocks[l].attrs, fl.lattice());
    if (auto it = agg.morphisms.find({j, l}); it != agg.morphisms.end())
      c = plus_rel(c, it->second, fl);
    if (auto it = agg.morphisms.find({l, j}); it != agg.morphisms.end())
      c = plus_rel(c, it->second.reverse(), fl);
    out.relation.emplace(std::make_pair(j, l), std::move(c));
  }

  check_composite_bound(agg, fl, out);
  return out;
}

double ColimitObject::at(size_t bj, const Key& a, size_t bl, const Key& b,
                         const Flavor& fl) const {
  auto it = relation.find({bj, bl});
  if (it == relation.end()) return fl.zero();
  Key k = a;
  k.insert(k.end(), b.begin(), b.end());
  return it->second.at(k);
}

size_t ColimitObject::carrier_size() const {
  size_t n = 0;
  for (const auto& b : blocks) n += b.tuple_count();
  return n;
}

// ---------------------------------------------------------------------------
// Closure

Relation similarity_closure_relation(const Relation& c, const Flavor& fl) {
  if (!fl.plus_idempotent())
    throw NonIdempotentPlus("closure needs lambda+lambda=lambda; flavor (" +
                            fl.times_name() + ", " + fl.plus_name() +
                            ") does not satisfy it");
  const auto& src = c.sources();
  const auto& tgt = c.targets();
  if (src.size() != tgt.size())
    throw DomainMismatch("closure needs an endo-relation");
  for (size_t i = 0; i < src.size(); ++i)
    if (!same_attribute(src[i], tgt[i]))
      throw DomainMismatch("closure needs an endo-relation");

  const double top = fl.one();
  for_each_key(src, [&](const Key& a) {
    Key k = a;
    k.insert(k.end(), a.begin(), a.end());
    if (std::abs(c.at(k) - top) > 1e-9)
      throw NotReflexive("closure input misses top on the diagonal");
  });
  for (const auto& [k, w] : c.entries()) {
    Key flipped(k.size());
    size_t n = src.size();
    for (size_t i = 0; i < n; ++i) {
      flipped[i] = k[n + i];
      flipped[n + i] = k[i];
    }
    if (std::abs(c.at(flipped) - w) > 1e-9)
      throw NotSymmetric("closure input is not symmetric");
  }

  size_t carrier = 1;
  for (const auto& a : src) carrier *= a.domain->size();
  Relation cur = c;
  for (size_t round = 0; round < carrier + 2; ++round) {
    Relation next = plus_rel(cur, compose(cur, cur, fl), fl);
    if (next.equals(cur)) break;
    cur = std::move(next);
  }
  return cur;
}

Similarity similarity_closure(const Relation& c, const Flavor& fl) {
  return Similarity::from_relation(similarity_closure_relation(c, fl));
}

ColimitObject similarity_closure(const ColimitObject& c, const Flavor& fl) {
  if (!fl.plus_idempotent())
    throw NonIdempotentPlus("closure needs lambda+lambda=lambda; flavor (" +
                            fl.times_name() + ", " + fl.plus_name() +
                            ") does not satisfy it");
  for (size_t j = 0; j < c.blocks.size(); ++j)
    if (!c.relation.count({j, j}))
      throw NotReflexive("colimit relation misses the diagonal of block " +
                         c.blocks[j].label());

  ColimitObject cur = c;
  size_t cap = cur.carrier_size() + 2;
  for (size_t round = 0; round < cap; ++round) {
    ColimitObject next = cur;
    for (size_t j = 0; j < cur.blocks.size(); ++j) {
      for (size_t l = 0; l < cur.blocks.size(); ++l) {
        Relation acc(cur.blocks[j].attrs, cur.blocks[l].attrs, fl.lattice());
        bool present = false;
        if (auto it = cur.relation.find({j, l}); it != cur.relation.end()) {
          acc = it->second;
          present = true;
        }
        for (size_t m = 0; m < cur.blocks.size(); ++m) {
          auto left = cur.relation.find({j, m});
          auto right = cur.relation.find({m, l});
          if (left == cur.relation.end() || right == cur.relation.end())
            continue;
          if (left->second.support_size() == 0 ||
              right->second.support_size() == 0)
            continue;
          acc = plus_rel(acc, compose(left->second, right->second, fl), fl);
          present = true;
        }
        if (present) next.relation.insert_or_assign({j, l}, std::move(acc));
      }
    }
    bool stable = next.relation.size() == cur.relation.size();
    if (stable)
      for (const auto& [k, r] : next.relation) {
        auto it = cur.relation.find(k);
        if (it == cur.relation.end() || !r.equals(it->second)) {
          stable = false;
          break;
        }
      }
    cur = std::move(next);
    if (stable) break;
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Classical oracle

namespace {

struct UnionFind {
  std::vector<size_t> parent;
  explicit UnionFind(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  size_t find(size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a; // keep the smallest index as the root
    else parent[a] = b;
  }
};

} // namespace

SetColimitResult set_colimit_oracle(const MultiDiagram& d) {
  const Flavor& fl = d.flavor();
  const double top = fl.one();

  SetColimitResult out;
  out.blocks = colimit_blocks(d);

  for (const auto& v : d.graph().vertices())
    if (!d.object_at(v).sim.is_identity())
      throw NonCrispArrow("similarity at vertex " + v +
                          " is not the identity");

  std::vector<size_t> offset(out.blocks.size() + 1, 0);
  for (size_t i = 0; i < out.blocks.size(); ++i)
    offset[i + 1] = offset[i] + out.blocks[i].tuple_count();
  UnionFind uf(offset.back());

  for (const auto& a : d.graph().arrows()) {
    size_t j = block_index(out.blocks, a.sources);
    size_t l = block_index(out.blocks, a.targets);
    Relation r = d.relation_of(a.name).reorder(out.blocks[j].vertices,
                                               out.blocks[l].vertices);
    size_t ns = out.blocks[j].attrs.size();
    std::map<Key, Key> image;
    for (const auto& [k, w] : r.entries()) {
      if (w != top)
        throw NonCrispArrow("arrow " + a.name + " has weight " +
                            fl.lattice()->format(w) + "; the oracle needs " +
                            "crisp maps");
      Key s(k.begin(), k.begin() + ns);
      Key t(k.begin() + ns, k.end());
      if (!image.emplace(std::move(s), std::move(t)).second)
        throw NonCrispArrow("arrow " + a.name + " maps a tuple twice");
    }
    size_t expected = out.blocks[j].tuple_count();
    if (image.size() != expected)
      throw NonCrispArrow("arrow " + a.name + " is not total");
    for (const auto& [s, t] : image)
      uf.unite(offset[j] + out.blocks[j].tuple_index(s),
               offset[l] + out.blocks[l].tuple_index(t));
  }

  std::map<size_t, std::vector<std::pair<size_t, Key>>> classes;
  for (size_t i = 0; i < offset.back(); ++i) {
    size_t b = 0;
    while (offset[b + 1] <= i) ++b;
    size_t rem = i - offset[b];
    Key k(out.blocks[b].attrs.size());
    for (size_t p = k.size(); p > 0; --p) {
      size_t sz = out.blocks[b].attrs[p - 1].domain->size();
      k[p - 1] = (int)(rem % sz);
      rem /= sz;
    }
    classes[uf.find(i)].emplace_back(b, std::move(k));
  }
  for (auto& [root, members] : classes) out.classes.push_back(std::move(members));
  return out;
}

std::vector<std::vector<std::string>> SetColimitResult::class_labels() const {
  std::vector<std::vector<std::string>> out;
  for (const auto& cls : classes) {
    std::vector<std::string> labels;
    for (const auto& [b, k] : cls)
      labels.push_back(blocks[b].label() + ":" + blocks[b].tuple_label(k));
    out.push_back(std::move(labels));
  }
  return out;
}

} // namespace omegarel
