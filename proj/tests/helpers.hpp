#pragma once

// Shared fixtures for the test binaries: deterministic RNG helpers, small
// random relation/diagram generators, and a brute-force limit evaluator to
// check the sparse engine against.

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "omegarel/diagram.hpp"
#include "omegarel/lattice.hpp"
#include "omegarel/relation.hpp"

namespace testutil {

using namespace omegarel;

inline std::string data_path(const std::string& name) {
  return std::string(OMEGAREL_TEST_DATA_DIR) + "/" + name;
}

inline DomainPtr small_domain(const std::string& prefix, int n) {
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  return Domain::of(labels);
}

// Uniform weight from a small palette that includes the bounds, so crisp
// and boundary cases show up often.
inline double random_weight(std::mt19937& rng) {
  static const double palette[] = {0.0, 0.0, 0.25, 1.0 / 3, 0.5, 0.75, 1.0, 1.0};
  return palette[rng() % 8];
}

inline Relation random_relation(const std::vector<Attribute>& src,
                                const std::vector<Attribute>& tgt,
                                LatticePtr lat, std::mt19937& rng) {
  Relation r(src, tgt, lat);
  std::vector<Attribute> all = src;
  all.insert(all.end(), tgt.begin(), tgt.end());
  for_each_key(all, [&](const Key& k) { r.set(k, random_weight(rng)); });
  return r;
}

inline Relation random_crisp_relation(const std::vector<Attribute>& src,
                                      const std::vector<Attribute>& tgt,
                                      LatticePtr lat, std::mt19937& rng,
                                      int percent_on = 40) {
  Relation r(src, tgt, lat);
  std::vector<Attribute> all = src;
  all.insert(all.end(), tgt.begin(), tgt.end());
  for_each_key(all, [&](const Key& k) {
    if (rng() % 100 < (unsigned)percent_on) r.set(k, lat->top());
  });
  return r;
}

// Weight of one full vertex tuple under the diagram: flavor-times over all
// arrow relations plus isolated-vertex distributions. Quadratic and dumb on
// purpose; vague_limit must agree with it.
inline double brute_limit_weight(const MultiDiagram& d, const Key& full) {
  const auto& verts = d.graph().vertices();
  std::map<std::string, int> pos;
  for (size_t i = 0; i < verts.size(); ++i) pos[verts[i]] = full[i];
  const Flavor& fl = d.flavor();
  double w = fl.one();
  for (const auto& a : d.graph().arrows()) {
    Key k;
    for (const auto& v : a.sources) k.push_back(pos.at(v));
    for (const auto& v : a.targets) k.push_back(pos.at(v));
    w = fl.times(w, d.relation_of(a.name).at(k));
  }
  for (const auto& v : d.graph().isolated_vertices())
    w = fl.times(w, d.object_at(v).dist.at({pos.at(v)}));
  return w;
}

inline Relation brute_limit(const MultiDiagram& d) {
  Relation out({}, d.attributes(), d.flavor().lattice());
  for_each_key(d.attributes(), [&](const Key& k) {
    out.set(k, brute_limit_weight(d, k));
  });
  return out;
}

// A random crisp diagram in the shape conservativity cares about: a few
// vertices, a few arrows with random small endpoint families.
struct RandomDiagramConfig {
  int max_vertices = 4;
  int max_domain = 5;
  int max_arrows = 5;
  bool crisp = true;
  int percent_on = 40;
};

inline MultiDiagram random_diagram(LatticePtr lat, const Flavor& fl,
                                   std::mt19937& rng,
                                   const RandomDiagramConfig& cfg = {}) {
  int nv = 1 + (int)(rng() % (unsigned)cfg.max_vertices);
  MultiGraph g;
  std::map<std::string, OmegaObject> objects;
  std::vector<Attribute> attrs;
  for (int i = 0; i < nv; ++i) {
    std::string name(1, (char)('A' + i));
    int dsize = 1 + (int)(rng() % (unsigned)cfg.max_domain);
    Attribute attr{name, small_domain(name, dsize)};
    g.add_vertex(name);
    attrs.push_back(attr);
    objects.emplace(name, OmegaObject::crisp(
                              {attr}, Relation::top_distribution({attr}, lat)));
  }

  std::map<std::string, Relation> rels;
  int na = (int)(rng() % (unsigned)(cfg.max_arrows + 1));
  for (int i = 0; i < na; ++i) {
    // pick disjoint nonempty source/target families
    std::vector<int> perm(nv);
    for (int j = 0; j < nv; ++j) perm[j] = j;
    std::shuffle(perm.begin(), perm.end(), rng);
    int ns = 1 + (int)(rng() % (unsigned)nv);
    if (ns == nv) ns = nv > 1 ? nv - 1 : 1;
    int remaining = nv - ns;
    if (remaining < 1) continue;
    int nt = 1 + (int)(rng() % (unsigned)remaining);
    std::vector<std::string> src_names, tgt_names;
    std::vector<Attribute> src, tgt;
    for (int j = 0; j < ns; ++j) {
      src_names.push_back(attrs[perm[j]].name);
      src.push_back(attrs[perm[j]]);
    }
    for (int j = ns; j < ns + nt; ++j) {
      tgt_names.push_back(attrs[perm[j]].name);
      tgt.push_back(attrs[perm[j]]);
    }
    std::string name = "f" + std::to_string(i);
    g.add_arrow({name, src_names, tgt_names});
    rels.emplace(name, cfg.crisp
                           ? random_crisp_relation(src, tgt, lat, rng,
                                                   cfg.percent_on)
                           : random_relation(src, tgt, lat, rng));
  }
  return MultiDiagram(std::move(g), std::move(objects), std::move(rels), fl);
}

} // namespace testutil
