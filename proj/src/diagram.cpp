#include "omegarel/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace omegarel {

// ---------------------------------------------------------------------------
// MultiGraph

MultiGraph::MultiGraph(std::vector<std::string> vertices,
                       std::vector<MultiArrow> arrows) {
  for (auto& v : vertices) add_vertex(v);
  for (auto& a : arrows) add_arrow(std::move(a));
}

void MultiGraph::add_vertex(const std::string& label) {
  if (label.empty()) throw GraphError("vertex label must be non-empty");
  if (has_vertex(label)) throw GraphError("duplicate vertex label: " + label);
  vertices_.push_back(label);
}

void MultiGraph::add_arrow(MultiArrow arrow) {
  if (arrow.name.empty()) throw GraphError("arrow name must be non-empty");
  for (const auto& a : arrows_)
    if (a.name == arrow.name) throw GraphError("duplicate arrow name: " + arrow.name);
  if (arrow.sources.empty() || arrow.targets.empty())
    throw GraphError("arrow " + arrow.name + " needs at least one source and target");
  std::set<std::string> seen;
  for (const auto& v : arrow.sources) {
    if (!has_vertex(v))
      throw UnknownVertex("arrow " + arrow.name + " uses unknown vertex " + v);
    if (!seen.insert(v).second)
      throw GraphError("arrow " + arrow.name + " repeats vertex " + v);
  }
  for (const auto& v : arrow.targets) {
    if (!has_vertex(v))
      throw UnknownVertex("arrow " + arrow.name + " uses unknown vertex " + v);
    if (!seen.insert(v).second)
      throw GraphError("arrow " + arrow.name + " repeats vertex " + v);
  }
  arrows_.push_back(std::move(arrow));
}

bool MultiGraph::has_vertex(const std::string& label) const {
  return std::find(vertices_.begin(), vertices_.end(), label) != vertices_.end();
}

std::vector<std::string> MultiGraph::source_vertices() const {
  std::set<std::string> as_source, as_target;
  for (const auto& a : arrows_) {
    as_source.insert(a.sources.begin(), a.sources.end());
    as_target.insert(a.targets.begin(), a.targets.end());
  }
  std::vector<std::string> out;
  for (const auto& v : vertices_)
    if (as_source.count(v) && !as_target.count(v)) out.push_back(v);
  return out;
}

std::vector<std::string> MultiGraph::target_vertices() const {
  std::set<std::string> as_source, as_target;
  for (const auto& a : arrows_) {
    as_source.insert(a.sources.begin(), a.sources.end());
    as_target.insert(a.targets.begin(), a.targets.end());
  }
  std::vector<std::string> out;
  for (const auto& v : vertices_)
    if (as_target.count(v) && !as_source.count(v)) out.push_back(v);
  return out;
}

std::vector<std::string> MultiGraph::isolated_vertices() const {
  std::set<std::string> touched;
  for (const auto& a : arrows_) {
    touched.insert(a.sources.begin(), a.sources.end());
    touched.insert(a.targets.begin(), a.targets.end());
  }
  std::vector<std::string> out;
  for (const auto& v : vertices_)
    if (!touched.count(v)) out.push_back(v);
  return out;
}

MultiGraph glue(const MultiGraph& g1, const MultiGraph& g2) {
  auto boundary1 = g1.target_vertices();
  auto boundary2 = g2.source_vertices();
  std::set<std::string> glued;
  for (const auto& v : boundary2)
    if (std::find(boundary1.begin(), boundary1.end(), v) != boundary1.end())
      glued.insert(v);

  MultiGraph out = g1;
  std::map<std::string, std::string> rename2; // g2 label -> glued label
  for (const auto& v : g2.vertices()) {
    if (glued.count(v)) { rename2[v] = v; continue; }
    std::string label = v;
    while (out.has_vertex(label)) label += "#2";
    rename2[v] = label;
    out.add_vertex(label);
  }
  std::set<std::string> arrow_names;
  for (const auto& a : out.arrows()) arrow_names.insert(a.name);
  for (const auto& a : g2.arrows()) {
    MultiArrow copy = a;
    while (arrow_names.count(copy.name)) copy.name += "#2";
    arrow_names.insert(copy.name);
    for (auto& v : copy.sources) v = rename2.at(v);
    for (auto& v : copy.targets) v = rename2.at(v);
    out.add_arrow(std::move(copy));
  }
  return out;
}

// ---------------------------------------------------------------------------
// MultiDiagram

MultiDiagram::MultiDiagram(MultiGraph graph,
                           std::map<std::string, OmegaObject> vertex_objects,
                           std::map<std::string, Relation> arrow_relations,
                           Flavor flavor,
                           std::optional<std::vector<std::string>> sources)
    : graph_(std::move(graph)), vertex_objects_(std::move(vertex_objects)),
      arrow_relations_(std::move(arrow_relations)), flavor_(std::move(flavor)),
      sources_(std::move(sources)) {
  for (const auto& v : graph_.vertices()) {
    auto it = vertex_objects_.find(v);
    if (it == vertex_objects_.end())
      throw DanglingVertexObject("vertex " + v + " has no object");
    const auto& obj = it->second;
    if (obj.carrier.size() != 1 || obj.carrier[0].name != v)
      throw DanglingVertexObject("object of vertex " + v +
                                 " must carry the single attribute " + v);
    if (!obj.dist.lattice()->same_as(*flavor_.lattice()))
      throw InconsistentLattice("object of vertex " + v +
                                " lives over a different lattice");
  }
  for (const auto& [name, obj] : vertex_objects_)
    if (!graph_.has_vertex(name))
      throw DanglingVertexObject("object for unknown vertex " + name);
  for (const auto& a : graph_.arrows()) {
    auto it = arrow_relations_.find(a.name);
    if (it == arrow_relations_.end())
      throw GraphError("arrow " + a.name + " has no relation");
    const Relation& r = it->second;
    if (!r.lattice()->same_as(*flavor_.lattice()))
      throw InconsistentLattice("relation of arrow " + a.name +
                                " lives over a different lattice");
    auto matches = [&](const std::vector<Attribute>& block,
                       const std::vector<std::string>& family) {
      if (block.size() != family.size()) return false;
      for (const auto& v : family) {
        bool found = false;
        for (const auto& attr : block)
          if (attr.name == v && *attr.domain == *attribute_of(v).domain)
            found = true;
        if (!found) return false;
      }
      return true;
    };
    if (!matches(r.sources(), a.sources) || !matches(r.targets(), a.targets))
      throw SignatureMismatch("relation of arrow " + a.name +
                              " does not match the arrow's endpoints");
  }
  for (const auto& [name, rel] : arrow_relations_) {
    bool known = false;
    for (const auto& a : graph_.arrows()) known = known || a.name == name;
    if (!known) throw GraphError("relation for unknown arrow " + name);
  }
  if (sources_) {
    for (const auto& v : *sources_)
      if (!graph_.has_vertex(v))
        throw UnknownVertex("declared source vertex " + v + " is unknown");
  }
}

const OmegaObject& MultiDiagram::object_at(const std::string& vertex) const {
  auto it = vertex_objects_.find(vertex);
  if (it == vertex_objects_.end()) throw UnknownVertex("unknown vertex " + vertex);
  return it->second;
}

const Relation& MultiDiagram::relation_of(const std::string& arrow) const {
  auto it = arrow_relations_.find(arrow);
  if (it == arrow_relations_.end()) throw GraphError("unknown arrow " + arrow);
  return it->second;
}

const Attribute& MultiDiagram::attribute_of(const std::string& vertex) const {
  return object_at(vertex).carrier[0];
}

std::vector<Attribute> MultiDiagram::attributes() const {
  std::vector<Attribute> out;
  for (const auto& v : graph_.vertices()) out.push_back(attribute_of(v));
  return out;
}

// ---------------------------------------------------------------------------
// Vague limit

namespace {

// Sparse natural join of two distributions on their shared attributes.
Relation join_factors(const Relation& a, const Relation& b, const Flavor& fl) {
  std::vector<size_t> a_shared, b_shared, b_fresh;
  const auto& at = a.targets();
  const auto& bt = b.targets();
  for (size_t j = 0; j < bt.size(); ++j) {
    bool shared = false;
    for (size_t i = 0; i < at.size(); ++i)
      if (at[i].name == bt[j].name) {
        a_shared.push_back(i);
        b_shared.push_back(j);
        shared = true;
        break;
      }
    if (!shared) b_fresh.push_back(j);
  }
  std::vector<Attribute> attrs = at;
  for (size_t j : b_fresh) attrs.push_back(bt[j]);
  Relation out({}, attrs, a.lattice());

  std::map<Key, std::vector<const std::pair<const Key, double>*>> index;
  for (const auto& e : b.entries()) {
    Key proj;
    proj.reserve(b_shared.size());
    for (size_t j : b_shared) proj.push_back(e.first[j]);
    index[std::move(proj)].push_back(&e);
  }
  const double bot = fl.zero();
  std::map<Key, double> acc;
  for (const auto& ea : a.entries()) {
    Key proj;
    proj.reserve(a_shared.size());
    for (size_t i : a_shared) proj.push_back(ea.first[i]);
    auto hit = index.find(proj);
    if (hit == index.end()) continue;
    for (const auto* eb : hit->second) {
      double w = fl.times(ea.second, eb->second);
      if (w == bot) continue;
      Key k = ea.first;
      k.reserve(attrs.size());
      for (size_t j : b_fresh) k.push_back(eb->first[j]);
      acc[std::move(k)] = w; // join keys are unique: no aggregation here
    }
  }
  for (auto& [k, w] : acc) out.set(k, w);
  return out;
}

double estimated_join_size(const Relation& a, const Relation& b) {
  double size = (double)a.support_size() * (double)b.support_size();
  for (const auto& ba : b.targets())
    for (const auto& aa : a.targets())
      if (aa.name == ba.name) size /= (double)ba.domain->size();
  return size;
}

} // namespace

Relation vague_limit(const MultiDiagram& d) {
  const Flavor& fl = d.flavor();
  std::vector<Relation> factors;
  for (const auto& a : d.graph().arrows())
    factors.push_back(d.relation_of(a.name).tabulate());
  for (const auto& v : d.graph().isolated_vertices())
    factors.push_back(d.object_at(v).dist);

  Relation acc = Relation::scalar(fl.one(), fl.lattice());
  std::vector<bool> used(factors.size(), false);
  for (size_t round = 0; round < factors.size(); ++round) {
    // cheapest estimated intermediate first; ties in declaration order
    size_t best = factors.size();
    double best_size = 0;
    for (size_t i = 0; i < factors.size(); ++i) {
      if (used[i]) continue;
      double est = estimated_join_size(acc, factors[i]);
      if (best == factors.size() || est < best_size) { best = i; best_size = est; }
    }
    used[best] = true;
    acc = join_factors(acc, factors[best], fl);
  }

  std::vector<std::string> order = d.graph().vertices();
  return acc.reorder({}, order);
}

// ---------------------------------------------------------------------------
// Cones

Relation cone_distribution(const Cone& cone, const MultiDiagram& d) {
  const auto& verts = d.graph().vertices();
  for (const auto& v : verts)
    if (!cone.legs.count(v)) throw LegMissing("cone has no leg at vertex " + v);
  for (const auto& [v, leg] : cone.legs) {
    if (!d.graph().has_vertex(v)) throw UnknownVertex("cone leg at unknown vertex " + v);
    if (leg.size() != cone.apex.size())
      throw LegMissing("cone leg at " + v + " does not cover the apex");
    for (int idx : leg)
      if (idx < 0 || idx >= (int)d.attribute_of(v).domain->size())
        throw DomainMismatch("cone leg at " + v + " leaves the domain");
  }
  const Flavor& fl = d.flavor();
  Relation out({}, d.attributes(), fl.lattice());
  for (size_t r = 0; r < cone.apex.size(); ++r) {
    Key k;
    k.reserve(verts.size());
    for (const auto& v : verts) k.push_back(cone.legs.at(v)[r]);
    out.set(k, fl.plus(out.at(k), fl.one()));
  }
  return out;
}

LimitDegree lambda_limit(const MultiDiagram& d, const Cone& cone, double lambda,
                         double eps) {
  Relation lim = vague_limit(d);
  Relation cd = cone_distribution(cone, d);
  std::vector<Similarity> parts;
  for (const auto& v : d.graph().vertices()) parts.push_back(d.object_at(v).sim);
  Similarity prod = Similarity::product(std::move(parts));
  LimitDegree out;
  out.degree = lambda_similar(lim, cd, prod, d.flavor());
  out.satisfied = out.degree >= lambda - eps;
  return out;
}

// ---------------------------------------------------------------------------
// Commutativity

CommutativityReport commutativity(const MultiDiagram& d,
                                  const std::vector<std::string>& source_vertices,
                                  double eps) {
  std::set<std::string> keep(source_vertices.begin(), source_vertices.end());
  if (keep.size() != source_vertices.size())
    throw DuplicateAttribute("source vertex listed twice");
  for (const auto& v : source_vertices)
    if (!d.graph().has_vertex(v)) throw UnknownVertex("unknown source vertex " + v);

  Relation lim = vague_limit(d);
  std::vector<std::string> drop;
  for (const auto& v : d.graph().vertices())
    if (!keep.count(v)) drop.push_back(v);
  Relation degrees = lim.sum_out(drop, d.flavor()).reorder({}, source_vertices);

  const double top = d.flavor().one();
  CommutativityReport rep{degrees, true, top};
  size_t full = 1;
  for (const auto& a : degrees.targets()) full *= a.domain->size();
  if (degrees.support_size() < full) {
    rep.commutative = false;
    rep.inf_degree = d.flavor().zero();
  }
  for (const auto& [k, w] : degrees.entries()) {
    (void)k;
    if (std::abs(w - top) > eps) rep.commutative = false;
    rep.inf_degree = std::min(rep.inf_degree, w);
  }
  return rep;
}

bool lambda_commutative(const CommutativityReport& report, double lambda, double eps) {
  return report.inf_degree >= lambda - eps;
}

} // namespace omegarel
