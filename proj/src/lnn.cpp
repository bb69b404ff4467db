#include "omegarel/lnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace omegarel {

// ---------------------------------------------------------------------------
// Network structure

LnnNetwork::LnnNetwork(std::vector<std::pair<std::string, WireRole>> wires,
                       std::vector<Neuron> neurons)
    : neurons_(std::move(neurons)) {
  for (auto& [id, role] : wires) {
    if (id.empty()) throw NetworkError("wire id must be non-empty");
    if (roles_.count(id)) throw NetworkError("duplicate wire id: " + id);
    roles_.emplace(id, role);
    wire_order_.push_back(id);
  }

  std::map<std::string, size_t> producer;
  for (size_t i = 0; i < neurons_.size(); ++i) {
    const Neuron& n = neurons_[i];
    if (n.inputs.size() != n.weights.size())
      throw NetworkError("neuron producing " + n.output + " has " +
                         std::to_string(n.inputs.size()) + " inputs but " +
                         std::to_string(n.weights.size()) + " weights");
    if (n.inputs.empty())
      throw NetworkError("neuron producing " + n.output + " has no inputs");
    bool nonzero = false;
    for (double w : n.weights) nonzero = nonzero || w != 0;
    if (!nonzero)
      throw NetworkError("neuron producing " + n.output +
                         " has only zero weights");
    std::set<std::string> seen;
    for (const auto& in : n.inputs) {
      if (!roles_.count(in))
        throw NetworkError("neuron producing " + n.output +
                           " reads undeclared wire " + in);
      if (!seen.insert(in).second)
        throw NetworkError("neuron producing " + n.output +
                           " reads wire " + in + " twice");
    }
    if (!roles_.count(n.output))
      throw NetworkError("neuron writes undeclared wire " + n.output);
    if (roles_.at(n.output) == WireRole::input)
      throw NetworkError("input wire " + n.output + " cannot be produced");
    if (!producer.emplace(n.output, i).second)
      throw NetworkError("wire " + n.output + " is produced twice");
  }
  for (const auto& [id, role] : roles_)
    if (role != WireRole::input && !producer.count(id))
      throw NetworkError("wire " + id + " has no producer");

  // Kahn's algorithm over neuron dependencies.
  std::vector<size_t> pending(neurons_.size(), 0);
  std::map<size_t, std::vector<size_t>> consumers;
  for (size_t i = 0; i < neurons_.size(); ++i)
    for (const auto& in : neurons_[i].inputs)
      if (auto it = producer.find(in); it != producer.end()) {
        ++pending[i];
        consumers[it->second].push_back(i);
      }
  std::vector<size_t> ready;
  for (size_t i = 0; i < neurons_.size(); ++i)
    if (pending[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    size_t i = ready.front();
    ready.erase(ready.begin());
    topo_.push_back(i);
    for (size_t c : consumers[i])
      if (--pending[c] == 0) ready.push_back(c);
  }
  if (topo_.size() != neurons_.size())
    throw NetworkError("the wiring has a cycle");
}

WireRole LnnNetwork::role(const std::string& wire) const {
  auto it = roles_.find(wire);
  if (it == roles_.end()) throw NetworkError("unknown wire " + wire);
  return it->second;
}

std::vector<std::string> LnnNetwork::wires_with_role(WireRole r) const {
  std::vector<std::string> out;
  for (const auto& w : wire_order_)
    if (roles_.at(w) == r) out.push_back(w);
  return out;
}

std::map<std::string, double>
LnnNetwork::eval(const std::map<std::string, double>& inputs) const {
  std::map<std::string, double> env;
  for (const auto& [w, v] : inputs) {
    if (!roles_.count(w)) throw NetworkError("unknown wire " + w);
    if (roles_.at(w) != WireRole::input)
      throw NetworkError("wire " + w + " is not an input");
    env.emplace(w, v);
  }
  for (const auto& w : wires_with_role(WireRole::input))
    if (!env.count(w)) throw NetworkError("no value for input wire " + w);
  for (size_t i : topo_) {
    const Neuron& n = neurons_[i];
    std::vector<double> xs;
    xs.reserve(n.inputs.size());
    for (const auto& in : n.inputs) xs.push_back(env.at(in));
    env[n.output] = eval_neuron(n, xs);
  }
  return env;
}

double eval_neuron(const Neuron& n, const std::vector<double>& inputs) {
  if (inputs.size() != n.weights.size())
    throw ArityMismatch("neuron producing " + n.output + " expects " +
                        std::to_string(n.weights.size()) + " inputs, got " +
                        std::to_string(inputs.size()));
  double z = n.bias;
  for (size_t i = 0; i < inputs.size(); ++i) z += n.weights[i] * inputs[i];
  return std::min(1.0, std::max(0.0, z));
}

// ---------------------------------------------------------------------------
// JSON loading

namespace {

WireRole parse_role(const std::string& s) {
  if (s == "input") return WireRole::input;
  if (s == "hidden") return WireRole::hidden;
  if (s == "output") return WireRole::output;
  throw ParseError("unknown wire role " + s);
}

} // namespace

LnnNetwork LnnNetwork::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("network JSON: ") + e.what());
  }
  try {
    std::vector<std::pair<std::string, WireRole>> wires;
    for (const auto& w : j.at("wires"))
      wires.emplace_back(w.at("id").get<std::string>(),
                         parse_role(w.at("role").get<std::string>()));
    std::vector<Neuron> neurons;
    for (const auto& n : j.at("neurons")) {
      Neuron neuron;
      for (const auto& in : n.at("inputs"))
        neuron.inputs.push_back(in.get<std::string>());
      for (const auto& w : n.at("weights"))
        neuron.weights.push_back(w.get<double>());
      neuron.bias = n.at("bias").get<double>();
      neuron.output = n.at("output").get<std::string>();
      neurons.push_back(std::move(neuron));
    }
    return LnnNetwork(std::move(wires), std::move(neurons));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("network JSON: ") + e.what());
  }
}

LnnNetwork LnnNetwork::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

// ---------------------------------------------------------------------------
// Classification

Classification classify_neuron(const Neuron& n) {
  Classification out;
  int neg = 0, pos = 0;
  for (size_t i = 0; i < n.weights.size(); ++i) {
    double w = n.weights[i];
    if (w == 0) continue;
    if (w == 1) {
      out.literals.push_back({n.inputs[i], false});
      ++pos;
    } else if (w == -1) {
      out.literals.push_back({n.inputs[i], true});
      ++neg;
    } else {
      return {};
    }
  }
  if (out.literals.empty()) return {};
  bool conjunctive = n.bias == 1.0 - pos;
  bool disjunctive = n.bias == (double)neg;
  if (conjunctive && disjunctive) out.shape = NeuronShape::both;
  else if (conjunctive) out.shape = NeuronShape::conjunctive;
  else if (disjunctive) out.shape = NeuronShape::disjunctive;
  return out;
}

// ---------------------------------------------------------------------------
// Formulas

FormulaPtr Formula::literal(std::string wire, bool negated) {
  auto f = std::make_shared<Formula>();
  f->kind = Kind::literal;
  f->lit = {std::move(wire), negated};
  return f;
}

namespace {

FormulaPtr connective(Formula::Kind kind, std::vector<FormulaPtr> parts) {
  if (parts.empty()) throw NetworkError("empty connective");
  if (parts.size() == 1) return parts[0];
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->parts = std::move(parts);
  return f;
}

} // namespace

FormulaPtr Formula::conj(std::vector<FormulaPtr> parts) {
  return connective(Kind::conj, std::move(parts));
}

FormulaPtr Formula::disj(std::vector<FormulaPtr> parts) {
  return connective(Kind::disj, std::move(parts));
}

FormulaPtr negate(const FormulaPtr& f) {
  switch (f->kind) {
  case Formula::Kind::literal:
    return Formula::literal(f->lit.wire, !f->lit.negated);
  case Formula::Kind::conj:
  case Formula::Kind::disj: {
    std::vector<FormulaPtr> parts;
    for (const auto& p : f->parts) parts.push_back(negate(p));
    return f->kind == Formula::Kind::conj ? Formula::disj(std::move(parts))
                                          : Formula::conj(std::move(parts));
  }
  }
  throw NetworkError("malformed formula");
}

namespace {

void print(const FormulaPtr& f, bool root, std::string& out) {
  if (f->kind == Formula::Kind::literal) {
    if (f->lit.negated) out += '~';
    out += f->lit.wire;
    return;
  }
  const char* sep = f->kind == Formula::Kind::conj ? " & " : " | ";
  if (!root) out += '(';
  for (size_t i = 0; i < f->parts.size(); ++i) {
    if (i) out += sep;
    print(f->parts[i], false, out);
  }
  if (!root) out += ')';
}

} // namespace

std::string to_string(const FormulaPtr& f) {
  std::string out;
  print(f, true, out);
  return out;
}

double eval_formula(const FormulaPtr& f,
                    const std::map<std::string, double>& env) {
  switch (f->kind) {
  case Formula::Kind::literal: {
    auto it = env.find(f->lit.wire);
    if (it == env.end())
      throw NetworkError("formula variable " + f->lit.wire + " is unbound");
    return f->lit.negated ? 1.0 - it->second : it->second;
  }
  case Formula::Kind::conj: {
    double acc = 1.0;
    for (const auto& p : f->parts)
      acc = std::max(0.0, acc + eval_formula(p, env) - 1.0);
    return acc;
  }
  case Formula::Kind::disj: {
    double acc = 0.0;
    for (const auto& p : f->parts)
      acc = std::min(1.0, acc + eval_formula(p, env));
    return acc;
  }
  }
  throw NetworkError("malformed formula");
}

namespace {

void collect_variables(const FormulaPtr& f, std::vector<std::string>& out) {
  if (f->kind == Formula::Kind::literal) {
    if (std::find(out.begin(), out.end(), f->lit.wire) == out.end())
      out.push_back(f->lit.wire);
    return;
  }
  for (const auto& p : f->parts) collect_variables(p, out);
}

} // namespace

std::vector<std::string> formula_variables(const FormulaPtr& f) {
  std::vector<std::string> out;
  collect_variables(f, out);
  return out;
}

std::map<std::string, FormulaPtr> extract_formula(const LnnNetwork& net) {
  std::map<std::string, FormulaPtr> built;
  for (const auto& w : net.wires_with_role(WireRole::input))
    built.emplace(w, Formula::literal(w));
  for (size_t i : net.topo_order()) {
    const Neuron& n = net.neurons()[i];
    Classification cls = classify_neuron(n);
    if (!cls.classified())
      throw UnclassifiableNeuron("the neuron producing " + n.output +
                                 " denotes no connective");
    std::vector<FormulaPtr> parts;
    for (const auto& lit : cls.literals) {
      const FormulaPtr& sub = built.at(lit.wire);
      parts.push_back(lit.negated ? negate(sub) : sub);
    }
    built[n.output] = cls.shape == NeuronShape::disjunctive
                          ? Formula::disj(std::move(parts))
                          : Formula::conj(std::move(parts));
  }
  std::map<std::string, FormulaPtr> out;
  for (const auto& w : net.wires_with_role(WireRole::output))
    out.emplace(w, built.at(w));
  return out;
}

// ---------------------------------------------------------------------------
// Networks as diagrams

NetworkDiagram network_to_diagram(const LnnNetwork& net,
                                  const std::vector<double>& grid,
                                  const Flavor& fl) {
  std::vector<double> values = grid;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty()) throw EmptyGrid("the wire grid is empty");
  auto dom = Domain::from_values(values);

  MultiGraph g;
  for (const auto& w : net.wires()) g.add_vertex(w);
  for (const auto& n : net.neurons())
    g.add_arrow({n.output, n.inputs, {n.output}});

  const double top = fl.one();
  std::map<std::string, OmegaObject> objects;
  for (const auto& w : net.wires()) {
    Attribute attr{w, dom};
    objects.emplace(w, OmegaObject::crisp(
                           {attr}, Relation::top_distribution({attr},
                                                              fl.lattice())));
  }

  std::vector<SnapEvent> snaps;
  std::map<std::string, Relation> relations;
  for (const auto& n : net.neurons()) {
    std::vector<Attribute> src;
    for (const auto& in : n.inputs) src.push_back({in, dom});
    Relation r(src, {{n.output, dom}}, fl.lattice());
    for_each_key(src, [&](const Key& k) {
      std::vector<double> xs;
      xs.reserve(k.size());
      for (size_t i = 0; i < k.size(); ++i) xs.push_back(dom->value(k[i]));
      double z = eval_neuron(n, xs);
      int snap = 0;
      for (size_t i = 1; i < values.size(); ++i)
        if (std::abs(values[i] - z) < std::abs(values[snap] - z)) snap = (int)i;
      if (std::abs(values[snap] - z) > 1e-12)
        snaps.push_back({n.output, k, z, values[snap]});
      Key full = k;
      full.push_back(snap);
      r.set(full, top);
    });
    relations.emplace(n.output, std::move(r));
  }

  MultiDiagram d(std::move(g), std::move(objects), std::move(relations), fl,
                 net.wires_with_role(WireRole::input));
  return {std::move(d), std::move(snaps)};
}

double description_fit(const LnnNetwork& net, const std::vector<double>& grid,
                       const Relation& dataset, const Similarity& sim,
                       const Flavor& fl) {
  if (!dataset.is_distribution())
    throw ColumnMismatch("the dataset must be a distribution");
  NetworkDiagram nd = network_to_diagram(net, grid, fl);

  std::vector<std::string> keep;
  const auto& grid_dom = nd.diagram.attribute_of(net.wires().front()).domain;
  for (const auto& col : dataset.targets()) {
    bool known = false;
    for (const auto& w : net.wires()) known = known || w == col.name;
    if (!known)
      throw ColumnMismatch("dataset column " + col.name + " is not a wire");
    if (*col.domain != *grid_dom)
      throw ColumnMismatch("dataset column " + col.name +
                           " does not share the wire grid");
    keep.push_back(col.name);
  }

  std::vector<std::string> drop;
  for (const auto& w : net.wires())
    if (std::find(keep.begin(), keep.end(), w) == keep.end())
      drop.push_back(w);

  Relation restricted =
      vague_limit(nd.diagram).sum_out(drop, fl).reorder({}, keep);
  return lambda_similar(dataset, restricted, sim, fl);
}

} // namespace omegarel
