#include "omegarel/query.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace omegarel {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(s);
  while (std::getline(ss, cell, sep)) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(cell);
  }
  return out;
}

} // namespace

QueryMap parse_query_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  QueryMap q;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) -> void {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
    };

    std::stringstream ss(line);
    std::string head;
    ss >> head;
    if (head == "vertex") {
      // vertex <q> = <d>
      std::string name, eq, image;
      ss >> name >> eq >> image;
      if (name.empty() || eq != "=" || image.empty())
        fail("usage: vertex <query-vertex> = <diagram-vertex>");
      q.vertices.emplace_back(name, image);
    } else if (head == "arrow") {
      // arrow <qa> : s1,s2 -> t = <da>
      auto colon = line.find(':');
      auto arrow_pos = line.find("->");
      auto eq = line.rfind('=');
      if (colon == std::string::npos || arrow_pos == std::string::npos ||
          eq == std::string::npos || eq < arrow_pos)
        fail("usage: arrow <name> : s1,s2 -> t1,t2 = <diagram-arrow>");
      QueryMap::Arrow a;
      a.name = trim(line.substr(5, colon - 5));
      a.sources = split(line.substr(colon + 1, arrow_pos - colon - 1), ',');
      a.targets = split(line.substr(arrow_pos + 2, eq - arrow_pos - 2), ',');
      a.image = trim(line.substr(eq + 1));
      if (a.name.empty() || a.sources.empty() || a.targets.empty() ||
          a.image.empty())
        fail("usage: arrow <name> : s1,s2 -> t1,t2 = <diagram-arrow>");
      q.arrows.push_back(std::move(a));
    } else {
      fail("unknown directive " + head);
    }
  }
  return q;
}

void validate_query(const QueryMap& q, const MultiDiagram& d) {
  std::map<std::string, std::string> image;
  for (const auto& [name, target] : q.vertices) {
    if (image.count(name))
      throw NotAHomomorphism("query vertex " + name + " mapped twice");
    if (!d.graph().has_vertex(target))
      throw NotAHomomorphism("query vertex " + name +
                             " maps to unknown vertex " + target);
    image.emplace(name, target);
  }
  std::set<std::string> arrow_names;
  for (const auto& a : q.arrows) {
    if (!arrow_names.insert(a.name).second)
      throw NotAHomomorphism("query arrow " + a.name + " declared twice");
    const MultiArrow* target = nullptr;
    for (const auto& da : d.graph().arrows())
      if (da.name == a.image) target = &da;
    if (!target)
      throw NotAHomomorphism("query arrow " + a.name +
                             " maps to unknown arrow " + a.image);
    auto check_family = [&](const std::vector<std::string>& qf,
                            const std::vector<std::string>& df,
                            const char* side) {
      if (qf.size() != df.size())
        throw NotAHomomorphism("query arrow " + a.name + " has " +
                               std::to_string(qf.size()) + " " + side +
                               "s; its image has " +
                               std::to_string(df.size()));
      for (size_t i = 0; i < qf.size(); ++i) {
        auto it = image.find(qf[i]);
        if (it == image.end())
          throw NotAHomomorphism("query arrow " + a.name +
                                 " uses unmapped vertex " + qf[i]);
        if (it->second != df[i])
          throw NotAHomomorphism("query arrow " + a.name + " sends " + side +
                                 " " + qf[i] + " to " + it->second +
                                 " but its image expects " + df[i]);
      }
    };
    check_family(a.sources, target->sources, "source");
    check_family(a.targets, target->targets, "target");
  }
}

MultiDiagram pull_back(const QueryMap& q, const MultiDiagram& d) {
  validate_query(q, d);
  const Flavor& fl = d.flavor();

  MultiGraph g;
  std::map<std::string, OmegaObject> objects;
  for (const auto& [name, target] : q.vertices) {
    g.add_vertex(name);
    const OmegaObject& obj = d.object_at(target);
    Attribute attr{name, obj.carrier[0].domain};
    Relation dist = obj.dist.rename({{target, name}});
    Similarity sim =
        obj.sim.is_identity()
            ? Similarity::identity({attr})
            : Similarity::from_relation(
                  obj.sim.as_relation(fl).rename({{target, name}}));
    objects.emplace(name, OmegaObject({attr}, std::move(dist),
                                      std::move(sim)));
  }

  std::map<std::string, Relation> relations;
  for (const auto& a : q.arrows) {
    g.add_arrow({a.name, a.sources, a.targets});
    const MultiArrow* target = nullptr;
    for (const auto& da : d.graph().arrows())
      if (da.name == a.image) target = &da;
    Relation r =
        d.relation_of(a.image).reorder(target->sources, target->targets);
    std::map<std::string, std::string> rename;
    for (size_t i = 0; i < a.sources.size(); ++i)
      rename.emplace(target->sources[i], a.sources[i]);
    for (size_t i = 0; i < a.targets.size(); ++i)
      rename.emplace(target->targets[i], a.targets[i]);
    relations.emplace(a.name, r.rename(rename));
  }

  return MultiDiagram(std::move(g), std::move(objects), std::move(relations),
                      fl, std::nullopt);
}

Relation answer_query(const MultiDiagram& d, const QueryMap& q) {
  return vague_limit(pull_back(q, d));
}

DescriptionReport lambda_description(
    const MultiDiagram& d, const Relation& dataset,
    const std::map<std::string, std::string>& column_to_vertex,
    const Similarity& sim, double lambda, double eps) {
  if (!dataset.is_distribution())
    throw ColumnMismatch("the dataset must be a distribution");

  std::set<std::string> used_vertices;
  std::map<std::string, std::string> vertex_to_column;
  for (const auto& [col, vertex] : column_to_vertex) {
    if (!used_vertices.insert(vertex).second)
      throw NotInjective("two columns map to vertex " + vertex);
    if (!d.graph().has_vertex(vertex))
      throw ColumnMismatch("column " + col + " maps to unknown vertex " +
                           vertex);
    vertex_to_column.emplace(vertex, col);
  }

  std::vector<std::string> keep; // image vertices, in dataset column order
  for (const auto& col : dataset.targets()) {
    auto it = column_to_vertex.find(col.name);
    if (it == column_to_vertex.end())
      throw ColumnMismatch("dataset column " + col.name + " is unmapped");
    if (*col.domain != *d.attribute_of(it->second).domain)
      throw ColumnMismatch("dataset column " + col.name +
                           " does not share the domain of vertex " +
                           it->second);
    keep.push_back(it->second);
  }
  if (keep.size() != column_to_vertex.size())
    throw ColumnMismatch("the column mapping names absent columns");

  std::vector<std::string> drop;
  for (const auto& v : d.graph().vertices())
    if (std::find(keep.begin(), keep.end(), v) == keep.end())
      drop.push_back(v);

  Relation restricted = vague_limit(d)
                            .sum_out(drop, d.flavor())
                            .reorder({}, keep)
                            .rename(vertex_to_column);

  DescriptionReport out;
  out.degree = lambda_similar(dataset, restricted, sim, d.flavor());
  out.satisfied = out.degree >= lambda - eps;
  return out;
}

} // namespace omegarel
