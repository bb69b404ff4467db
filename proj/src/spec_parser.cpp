#include "omegarel/spec_parser.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "omegarel/decimal.hpp"
#include "omegarel/table_io.hpp"

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

[[noreturn]] void fail(const std::string& path, size_t lineno,
                       const std::string& msg) {
  throw ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
}

// Whitespace tokens, except that `->` always stands alone.
std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      if (!cur.empty()) out.push_back(cur);
      out.push_back("->");
      cur.clear();
      ++i;
    } else if (std::isspace((unsigned char)line[i])) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += line[i];
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

DomainPtr parse_domain_expr(const std::string& path, size_t lineno,
                            const std::string& expr) {
  if (expr.front() == '{') {
    if (expr.back() != '}') fail(path, lineno, "expected closing }");
    auto labels = split(expr.substr(1, expr.size() - 2), ',');
    if (labels.empty()) fail(path, lineno, "empty domain");
    return Domain::of(std::move(labels));
  }
  if (expr.rfind("grid(", 0) == 0 && expr.back() == ')') {
    auto nums = split(expr.substr(5, expr.size() - 6), ',');
    if (nums.size() != 3) fail(path, lineno, "grid needs (lo, hi, step)");
    std::array<double, 3> v;
    for (size_t i = 0; i < 3; ++i) {
      auto p = parse_decimal(nums[i]);
      if (!p) fail(path, lineno, "grid bound " + nums[i] + " is not a number");
      v[i] = *p;
    }
    if (v[2] <= 0 || v[1] < v[0]) fail(path, lineno, "bad grid bounds");
    return Domain::grid(v[0], v[1], v[2]);
  }
  fail(path, lineno, "expected {a,b,...} or grid(lo,hi,step)");
}

} // namespace

DiagramSpec parse_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);

  DiagramSpec spec;
  auto slash = path.find_last_of('/');
  spec.base_dir = slash == std::string::npos ? "." : path.substr(0, slash);

  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto tok = tokenize(line);
    const std::string& head = tok[0];

    if (head == "lattice") {
      if (tok.size() != 2) fail(path, lineno, "usage: lattice <kind-or-file>");
      if (!spec.lattice.empty()) fail(path, lineno, "lattice declared twice");
      spec.lattice = tok[1];
    } else if (head == "flavor") {
      if (tok.size() != 3 || tok[1].rfind("times=", 0) != 0 ||
          tok[2].rfind("plus=", 0) != 0)
        fail(path, lineno, "usage: flavor times=<op> plus=<op>");
      if (!spec.times.empty()) fail(path, lineno, "flavor declared twice");
      spec.times = tok[1].substr(6);
      spec.plus = tok[2].substr(5);
    } else if (head == "domain") {
      // re-join everything after `=` so {a, b} survives tokenization
      auto eq = line.find('=');
      if (tok.size() < 4 || eq == std::string::npos || tok[2] != "=")
        fail(path, lineno, "usage: domain <Name> = {...} | grid(lo,hi,step)");
      const std::string& name = tok[1];
      if (spec.domains.count(name))
        fail(path, lineno, "domain " + name + " declared twice");
      std::string expr = trim(line.substr(eq + 1));
      // strip spaces inside the expression to one canonical form
      std::string compact;
      for (char c : expr)
        if (!std::isspace((unsigned char)c)) compact += c;
      spec.domains.emplace(name, parse_domain_expr(path, lineno, compact));
    } else if (head == "vertex") {
      if (tok.size() < 4 || tok[2] != ":")
        fail(path, lineno,
             "usage: vertex <V> : <Domain> [dist=<file>|top] "
             "[sim=<file>|identity]");
      DiagramSpec::Vertex v;
      v.name = tok[1];
      v.domain = tok[3];
      for (size_t i = 4; i < tok.size(); ++i) {
        if (tok[i].rfind("dist=", 0) == 0) v.dist = tok[i].substr(5);
        else if (tok[i].rfind("sim=", 0) == 0) v.sim = tok[i].substr(4);
        else fail(path, lineno, "unknown vertex option " + tok[i]);
      }
      for (const auto& other : spec.vertices)
        if (other.name == v.name)
          fail(path, lineno, "vertex " + v.name + " declared twice");
      spec.vertices.push_back(std::move(v));
    } else if (head == "arrow") {
      // arrow <name> : V1,V2 -> W1,W2 table=<file>|builtin=<name>
      if (tok.size() != 7 || tok[2] != ":" || tok[4] != "->")
        fail(path, lineno,
             "usage: arrow <name> : V1,V2 -> W table=<file>|builtin=<name>");
      DiagramSpec::Arrow a;
      a.name = tok[1];
      a.sources = split(tok[3], ',');
      a.targets = split(tok[5], ',');
      if (a.sources.empty() || a.targets.empty())
        fail(path, lineno, "arrow needs sources and targets");
      if (tok[6].rfind("table=", 0) == 0) a.table = tok[6].substr(6);
      else if (tok[6].rfind("builtin=", 0) == 0) a.builtin = tok[6].substr(8);
      else fail(path, lineno, "expected table=<file> or builtin=<name>");
      if (a.builtin == "" && a.table == "")
        fail(path, lineno, "empty table reference");
      for (const auto& other : spec.arrows)
        if (other.name == a.name)
          fail(path, lineno, "arrow " + a.name + " declared twice");
      spec.arrows.push_back(std::move(a));
    } else if (head == "sources") {
      if (tok.size() != 2) fail(path, lineno, "usage: sources V1,V2");
      if (spec.sources) fail(path, lineno, "sources declared twice");
      spec.sources = split(tok[1], ',');
    } else {
      fail(path, lineno, "unknown directive " + head);
    }
  }

  if (spec.lattice.empty()) throw ParseError(path + ": no lattice declared");
  if (spec.times.empty()) throw ParseError(path + ": no flavor declared");
  return spec;
}

namespace {

Relation gaussian_sum_relation(const std::vector<Attribute>& src,
                               const Attribute& tgt, LatticePtr lat) {
  for (const auto& a : src)
    if (!a.domain->numeric())
      throw ParseError("builtin gaussian-sum needs numeric domains (" +
                       a.name + " is not)");
  if (!tgt.domain->numeric())
    throw ParseError("builtin gaussian-sum needs numeric domains (" +
                     tgt.name + " is not)");
  Relation r(src, {tgt}, lat);
  for_each_key(src, [&](const Key& k) {
    double sum = 0;
    for (size_t i = 0; i < k.size(); ++i) sum += src[i].domain->value(k[i]);
    for (size_t w = 0; w < tgt.domain->size(); ++w) {
      double d = tgt.domain->value((int)w) - sum;
      Key full = k;
      full.push_back((int)w);
      r.set(full, std::exp(-d * d / 2));
    }
  });
  return r;
}

Relation equality_relation(const Attribute& src, const Attribute& tgt,
                           LatticePtr lat) {
  if (*src.domain != *tgt.domain)
    throw DomainMismatch("builtin equality needs equal domains on " +
                         src.name + " and " + tgt.name);
  Relation r({src}, {tgt}, lat);
  for (size_t i = 0; i < src.domain->size(); ++i)
    r.set({(int)i, (int)i}, lat->top());
  return r;
}

} // namespace

LoadedDiagram load_diagram(const std::string& path) {
  DiagramSpec spec = parse_spec(path);
  LatticePtr lat = lattice_from_name(spec.lattice, spec.base_dir);
  Flavor fl = Flavor::make(lat, spec.times, spec.plus);
  auto resolve = [&](const std::string& file) {
    return file.find('/') == 0 ? file : spec.base_dir + "/" + file;
  };

  MultiGraph g;
  std::map<std::string, DomainPtr> vertex_domain;
  std::map<std::string, OmegaObject> objects;
  for (const auto& v : spec.vertices) {
    auto dom = spec.domains.find(v.domain);
    if (dom == spec.domains.end())
      throw ParseError(path + ": vertex " + v.name +
                       " uses undeclared domain " + v.domain);
    g.add_vertex(v.name);
    vertex_domain.emplace(v.name, dom->second);
    Attribute attr{v.name, dom->second};
    Relation dist = v.dist == "top"
                        ? Relation::top_distribution({attr}, lat)
                        : read_weighted_table(resolve(v.dist), {attr}, lat);
    Similarity sim =
        v.sim == "identity"
            ? Similarity::identity({attr})
            : read_similarity_table(resolve(v.sim), {attr}, lat);
    objects.emplace(v.name, OmegaObject({attr}, std::move(dist),
                                        std::move(sim)));
  }

  std::map<std::string, Relation> relations;
  for (const auto& a : spec.arrows) {
    for (const auto& v : a.sources)
      if (!g.has_vertex(v))
        throw ParseError(path + ": arrow " + a.name +
                         " uses undeclared vertex " + v);
    for (const auto& v : a.targets)
      if (!g.has_vertex(v))
        throw ParseError(path + ": arrow " + a.name +
                         " uses undeclared vertex " + v);
    g.add_arrow({a.name, a.sources, a.targets});

    std::vector<Attribute> src, tgt;
    for (const auto& v : a.sources) src.push_back({v, vertex_domain.at(v)});
    for (const auto& v : a.targets) tgt.push_back({v, vertex_domain.at(v)});

    if (!a.table.empty()) {
      std::vector<Attribute> all = src;
      all.insert(all.end(), tgt.begin(), tgt.end());
      Relation flat = read_weighted_table(resolve(a.table), all, lat);
      std::vector<std::string> src_names;
      for (const auto& s : src) src_names.push_back(s.name);
      relations.emplace(a.name, flat.untabulate(src_names));
    } else if (a.builtin == "gaussian-sum") {
      if (tgt.size() != 1)
        throw ParseError(path + ": gaussian-sum needs one target");
      relations.emplace(a.name, gaussian_sum_relation(src, tgt[0], lat));
    } else if (a.builtin == "equality") {
      if (src.size() != 1 || tgt.size() != 1)
        throw ParseError(path + ": equality needs one source and one target");
      relations.emplace(a.name, equality_relation(src[0], tgt[0], lat));
    } else {
      throw ParseError(path + ": unknown builtin " + a.builtin);
    }
  }

  MultiDiagram d(std::move(g), std::move(objects), std::move(relations), fl,
                 spec.sources);
  return {std::move(spec), std::move(lat), std::move(fl), std::move(d)};
}

} // namespace omegarel
