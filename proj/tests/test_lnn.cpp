#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "omegarel/lnn.hpp"
#include "omegarel/table_io.hpp"

using namespace omegarel;
using testutil::data_path;

namespace {

Neuron unit(std::vector<std::string> ins, std::vector<double> ws, double b,
            std::string out = "z") {
  return Neuron{std::move(ins), std::move(ws), b, std::move(out)};
}

FormulaPtr shape_formula(const Classification& c) {
  std::vector<FormulaPtr> lits;
  for (const auto& l : c.literals) lits.push_back(Formula::literal(l.wire, l.negated));
  return c.shape == NeuronShape::disjunctive ? Formula::disj(std::move(lits))
                                             : Formula::conj(std::move(lits));
}

double snap_to(double v, const std::vector<double>& grid) {
  double best = grid[0];
  for (double g : grid)
    if (std::abs(v - g) < std::abs(v - best)) best = g;
  return best;
}

// Per-unit snapped evaluation, the reference semantics for the network
// diagram: each unit output lands on the grid before the next unit reads it.
std::map<std::string, double> snapped_eval(const LnnNetwork& net,
                                           std::map<std::string, double> vals,
                                           const std::vector<double>& grid) {
  for (size_t i : net.topo_order()) {
    const Neuron& n = net.neurons()[i];
    std::vector<double> xs;
    for (const auto& w : n.inputs) xs.push_back(vals.at(w));
    vals[n.output] = snap_to(eval_neuron(n, xs), grid);
  }
  return vals;
}

const char* kTwoLayer = R"({
  "wires": [{"id": "x", "role": "input"}, {"id": "y", "role": "input"},
            {"id": "h", "role": "hidden"}, {"id": "out", "role": "output"}],
  "neurons": [
    {"inputs": ["x", "y"], "weights": [1, 1], "bias": -1, "output": "h"},
    {"inputs": ["h"], "weights": [-1], "bias": 1, "output": "out"}]
})";

} // namespace

TEST_CASE("clamped affine units") {
  Neuron n = unit({"a", "b"}, {1, 1}, -1);
  CHECK(eval_neuron(n, {0.7, 0.5}) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(eval_neuron(n, {0.2, 0.3}) == 0.0);
  CHECK(eval_neuron(n, {1.0, 1.0}) == 1.0);
  CHECK(eval_neuron(unit({"a"}, {-1}, 1), {0.25}) == 0.75);
  CHECK(eval_neuron(unit({"a", "b"}, {1, 1}, 0), {0.7, 0.8}) == 1.0);
  CHECK_THROWS_AS(eval_neuron(n, {0.5}), ArityMismatch);
}

TEST_CASE("units that denote binary connectives") {
  const std::vector<double> pts = {0, 1.0 / 3, 2.0 / 3, 1};
  struct Case {
    double wx, wy, bias;
    NeuronShape shape;
    bool nx, ny;
    const char* printed;
  };
  const Case table[] = {
      {-1, 1, 1, NeuronShape::disjunctive, true, false, "~x | y"},
      {1, -1, 0, NeuronShape::conjunctive, false, true, "x & ~y"},
      {1, 1, 0, NeuronShape::disjunctive, false, false, "x | y"},
      {-1, -1, 1, NeuronShape::conjunctive, true, true, "~x & ~y"},
      {1, -1, 1, NeuronShape::disjunctive, false, true, "x | ~y"},
      {1, 1, -1, NeuronShape::conjunctive, false, false, "x & y"},
      {-1, 1, 0, NeuronShape::conjunctive, true, false, "~x & y"},
      {-1, -1, 2, NeuronShape::disjunctive, true, true, "~x | ~y"},
  };
  for (const Case& c : table) {
    CAPTURE(c.printed);
    Neuron n = unit({"x", "y"}, {c.wx, c.wy}, c.bias);
    Classification cl = classify_neuron(n);
    REQUIRE(cl.shape == c.shape);
    REQUIRE(cl.literals.size() == 2);
    CHECK(cl.literals[0].negated == c.nx);
    CHECK(cl.literals[1].negated == c.ny);

    FormulaPtr f = shape_formula(cl);
    CHECK(to_string(f) == c.printed);
    // the formula computes exactly what the unit computes
    for (double x : pts)
      for (double y : pts)
        CHECK(eval_formula(f, {{"x", x}, {"y", y}}) ==
              doctest::Approx(eval_neuron(n, {x, y})).epsilon(1e-12));
  }

  // a single literal is simultaneously a conjunction and a disjunction
  CHECK(classify_neuron(unit({"x"}, {1}, 0)).shape == NeuronShape::both);
  CHECK(classify_neuron(unit({"x"}, {-1}, 1)).shape == NeuronShape::both);

  // zero weights drop their inputs before classification
  Classification dropped = classify_neuron(unit({"x", "q", "y"}, {1, 0, 1}, -1));
  CHECK(dropped.shape == NeuronShape::conjunctive);
  REQUIRE(dropped.literals.size() == 2);
  CHECK(dropped.literals[0].wire == "x");
  CHECK(dropped.literals[1].wire == "y");

  CHECK_FALSE(classify_neuron(unit({"x", "y"}, {0.5, 1}, 0)).classified());
  CHECK_FALSE(classify_neuron(unit({"x", "y"}, {1, 1}, 0.5)).classified());
  CHECK_FALSE(classify_neuron(unit({"x", "y"}, {1, 1}, 2)).classified());
  CHECK_FALSE(classify_neuron(unit({"x"}, {0}, 0)).classified());
}

TEST_CASE("formula algebra") {
  FormulaPtr x = Formula::literal("x"), ny = Formula::literal("y", true);
  FormulaPtr f = Formula::conj({x, Formula::disj({ny, Formula::literal("z")})});
  CHECK(to_string(f) == "x & (~y | z)");
  CHECK(to_string(negate(f)) == "~x | (y & ~z)");
  CHECK(formula_variables(f) == std::vector<std::string>{"x", "y", "z"});

  // single-part connectives collapse to the part
  CHECK(to_string(Formula::conj({ny})) == "~y");
  CHECK_THROWS_AS(Formula::disj({}), NetworkError);

  CHECK(eval_formula(f, {{"x", 0.5}, {"y", 0.75}, {"z", 0.5}}) ==
        doctest::Approx(std::max(0.5 + std::min(0.25 + 0.5, 1.0) - 1, 0.0))
            .epsilon(1e-12));
  CHECK_THROWS_AS(eval_formula(f, {{"x", 1.0}}), NetworkError);

  // double negation restores the printed form
  CHECK(to_string(negate(negate(f))) == to_string(f));
}

TEST_CASE("network structure and evaluation") {
  LnnNetwork net = LnnNetwork::from_json_file(data_path("paper_network.json"));
  CHECK(net.wires().size() == 9);
  CHECK(net.wires_with_role(WireRole::input) ==
        std::vector<std::string>{"x1", "x2", "x3", "x4", "x5", "x6"});
  CHECK(net.wires_with_role(WireRole::output) == std::vector<std::string>{"y"});
  CHECK(net.role("h1") == WireRole::hidden);
  CHECK_THROWS_AS(net.role("nope"), NetworkError);

  std::map<std::string, double> env = {{"x1", 0}, {"x2", 1},    {"x3", 0.3},
                                       {"x4", 1}, {"x5", 0.7},  {"x6", 0.7}};
  auto out = net.eval(env);
  CHECK(out.at("h1") == 1.0);
  CHECK(out.at("h2") == 1.0);
  CHECK(out.at("y") == 1.0);

  env["x1"] = 1;
  env["x4"] = 0;
  out = net.eval(env);
  // h1 = clamp(-1 - 1 + 0.3 + 0 + 2) = 0.3, h2 = clamp(-1 - 0.3 + 0 + 0.7 + 2) = 1
  CHECK(out.at("h1") == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(out.at("h2") == 1.0);
  CHECK(out.at("y") == doctest::Approx(0.3).epsilon(1e-9));

  std::map<std::string, double> short_env = {{"x1", 0}};
  CHECK_THROWS_AS(net.eval(short_env), NetworkError);
  env["h1"] = 0.5; // feeding a non-input wire
  CHECK_THROWS_AS(net.eval(env), NetworkError);
}

TEST_CASE("network JSON rejects broken wiring") {
  CHECK_THROWS_AS(LnnNetwork::from_json_text("{"), ParseError);
  CHECK_THROWS_AS(LnnNetwork::from_json_text(R"({"wires": [{"id": "x",
    "role": "sideways"}], "neurons": []})"),
                  ParseError);
  CHECK_THROWS_AS(LnnNetwork::from_json_file("/no/such/file.json"), ParseError);

  auto make = [](const char* neurons) {
    return std::string(R"({"wires": [{"id": "x", "role": "input"},
      {"id": "a", "role": "hidden"}, {"id": "b", "role": "output"}],
      "neurons": )") + neurons + "}";
  };
  // a hidden wire nobody produces
  CHECK_THROWS_AS(LnnNetwork::from_json_text(make(
                      R"([{"inputs": ["x"], "weights": [1], "bias": 0,
                           "output": "b"}])")),
                  NetworkError);
  // two producers for one wire
  CHECK_THROWS_AS(LnnNetwork::from_json_text(make(
                      R"([{"inputs": ["x"], "weights": [1], "bias": 0, "output": "a"},
                          {"inputs": ["x"], "weights": [1], "bias": 0, "output": "a"},
                          {"inputs": ["a"], "weights": [1], "bias": 0, "output": "b"}])")),
                  NetworkError);
  // a cycle through the two non-input wires
  CHECK_THROWS_AS(LnnNetwork::from_json_text(make(
                      R"([{"inputs": ["b"], "weights": [1], "bias": 0, "output": "a"},
                          {"inputs": ["a"], "weights": [1], "bias": 0, "output": "b"}])")),
                  NetworkError);
  // weight list out of step with the inputs
  CHECK_THROWS_AS(LnnNetwork::from_json_text(make(
                      R"([{"inputs": ["x"], "weights": [1, 1], "bias": 0,
                           "output": "a"},
                          {"inputs": ["a"], "weights": [1], "bias": 0, "output": "b"}])")),
                  NetworkError);
  // writing an input wire
  CHECK_THROWS_AS(LnnNetwork::from_json_text(make(
                      R"([{"inputs": ["a"], "weights": [1], "bias": 0, "output": "x"},
                          {"inputs": ["x"], "weights": [1], "bias": 0, "output": "a"},
                          {"inputs": ["a"], "weights": [1], "bias": 0, "output": "b"}])")),
                  NetworkError);
}

TEST_CASE("formula extraction") {
  LnnNetwork net = LnnNetwork::from_json_file(data_path("paper_network.json"));
  auto formulas = extract_formula(net);
  REQUIRE(formulas.count("y"));
  FormulaPtr y = formulas.at("y");
  CHECK(to_string(y) == "(~x1 | ~x2 | x3 | x4) & (~x1 | ~x3 | x4 | x5)");
  CHECK(formula_variables(y) ==
        std::vector<std::string>{"x1", "x2", "x3", "x4", "x5"});

  // the extracted formula equals the network on arbitrary inputs
  std::mt19937 rng(3);
  auto coin = [&] { return (double)(rng() % 1001) / 1000.0; };
  for (int t = 0; t < 300; ++t) {
    std::map<std::string, double> env;
    for (const auto& w : net.wires_with_role(WireRole::input)) env[w] = coin();
    CHECK(eval_formula(y, env) ==
          doctest::Approx(net.eval(env).at("y")).epsilon(1e-12));
  }

  // a hidden wire consumed under a negative weight substitutes dualized
  LnnNetwork two = LnnNetwork::from_json_text(kTwoLayer);
  auto fs = extract_formula(two);
  CHECK(to_string(fs.at("out")) == "~x | ~y");
  for (int t = 0; t < 100; ++t) {
    std::map<std::string, double> env = {{"x", coin()}, {"y", coin()}};
    CHECK(eval_formula(fs.at("out"), env) ==
          doctest::Approx(two.eval(env).at("out")).epsilon(1e-12));
  }

  LnnNetwork odd = LnnNetwork::from_json_text(R"({
    "wires": [{"id": "x", "role": "input"}, {"id": "v", "role": "output"}],
    "neurons": [{"inputs": ["x"], "weights": [0.5], "bias": 0, "output": "v"}]})");
  CHECK_THROWS_AS(extract_formula(odd), UnclassifiableNeuron);
}

TEST_CASE("network diagrams on a closed grid") {
  LnnNetwork net = LnnNetwork::from_json_file(data_path("paper_network.json"));
  auto lat = Lattice::make("product");
  Flavor fl = Flavor::make(lat, "otimes", "join");
  const std::vector<double> grid = {0, 1.0 / 3, 2.0 / 3, 1};

  NetworkDiagram nd = network_to_diagram(net, grid, fl);
  CHECK(nd.snaps.empty()); // thirds are closed under these units
  CHECK(nd.diagram.graph().vertices().size() == 9);
  CHECK(nd.diagram.graph().arrows().size() == 3);

  // summing the hidden wires out of the limit leaves exactly the graph of
  // the end-to-end evaluation
  Relation flat = vague_limit(nd.diagram).sum_out({"h1", "h2"}, fl);
  std::vector<Attribute> cols = flat.targets();
  REQUIRE(cols.size() == 7);
  CHECK(flat.support_size() == 4096);
  const auto& dom = nd.diagram.attribute_of("x1").domain;
  std::vector<Attribute> xcols(cols.begin(), cols.end() - 1);
  for_each_key(xcols, [&](const Key& k) {
    std::map<std::string, double> env;
    for (size_t i = 0; i + 1 < cols.size(); ++i)
      env[cols[i].name] = dom->value(k[i]);
    double y = net.eval(env).at("y");
    Key full = k;
    full.push_back(*dom->index_of_value(y, 1e-9));
    CHECK(flat.at(full) == 1.0);
  });
}

TEST_CASE("off-grid unit outputs snap to the nearest point") {
  auto lat = Lattice::make("product");
  Flavor fl = Flavor::make(lat, "otimes", "join");
  LnnNetwork plus = LnnNetwork::from_json_text(R"({
    "wires": [{"id": "x", "role": "input"}, {"id": "y", "role": "input"},
              {"id": "z", "role": "output"}],
    "neurons": [{"inputs": ["x", "y"], "weights": [1, 1], "bias": 0,
                 "output": "z"}]})");

  NetworkDiagram nd = network_to_diagram(plus, {0, 0.3, 0.7, 1}, fl);
  REQUIRE(nd.snaps.size() == 1); // 0.3 + 0.3 = 0.6 sits between 0.3 and 0.7
  const SnapEvent& ev = nd.snaps[0];
  CHECK(ev.wire == "z");
  CHECK(ev.inputs == Key{1, 1});
  CHECK(ev.exact == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(ev.snapped == 0.7);
  CHECK(nd.diagram.relation_of("z").at({1, 1, 2}) == 1.0);

  // an exact tie moves down
  LnnNetwork half = LnnNetwork::from_json_text(R"({
    "wires": [{"id": "x", "role": "input"}, {"id": "z", "role": "output"}],
    "neurons": [{"inputs": ["x"], "weights": [1], "bias": -0.5,
                 "output": "z"}]})");
  NetworkDiagram tie = network_to_diagram(half, {0, 1}, fl);
  REQUIRE(tie.snaps.size() == 1);
  CHECK(tie.snaps[0].exact == 0.5);
  CHECK(tie.snaps[0].snapped == 0.0);

  CHECK_THROWS_AS(network_to_diagram(half, {}, fl), EmptyGrid);
}

TEST_CASE("how well the network describes a dataset") {
  LnnNetwork net = LnnNetwork::from_json_file(data_path("paper_network.json"));
  auto lat = Lattice::make("product");
  Flavor fl = Flavor::make(lat, "otimes", "join");
  const std::vector<double> grid = {0, 0.3, 0.7, 1};

  auto dom = Domain::from_values(grid);
  std::vector<Attribute> cols;
  for (const char* c : {"x1", "x2", "x3", "x4", "x5", "x6", "y"})
    cols.push_back({c, dom});
  Relation dataset = read_weighted_table(data_path("table3.csv"), cols, lat);
  CHECK(dataset.support_size() == 20);

  // reference semantics: every row's label must equal the per-unit snapped
  // evaluation of its inputs
  for (const auto& [k, w] : dataset.entries()) {
    std::map<std::string, double> env;
    for (size_t i = 0; i + 1 < cols.size(); ++i)
      env[cols[i].name] = dom->value(k[i]);
    auto vals = snapped_eval(net, env, grid);
    CHECK(vals.at("y") == doctest::Approx(dom->value(k[6])).epsilon(1e-12));
    CHECK(w == 1.0);
  }

  Similarity id = Similarity::identity(cols);
  CHECK(description_fit(net, grid, dataset, id, fl) == 1.0);

  // a dataset the network contradicts outright
  Relation wrong({}, cols, lat);
  wrong.set({0, 0, 0, 0, 0, 0, *dom->index_of_value(0.3, 1e-9)}, 1.0);
  CHECK(description_fit(net, grid, wrong, id, fl) == 0.0);

  // restricting to a column subset sums the rest out first
  Relation margin({}, {cols[0], cols[6]}, lat); // x1 = 0 forces y = 1
  margin.set({0, 3}, 1.0);
  Similarity mid = Similarity::identity({cols[0], cols[6]});
  CHECK(description_fit(net, grid, margin, mid, fl) == 1.0);

  Relation bad({}, {Attribute{"q", dom}}, lat);
  CHECK_THROWS_AS(description_fit(net, grid, bad, id, fl), ColumnMismatch);
  Relation off({}, {Attribute{"x1", Domain::from_values({0, 1})}}, lat);
  CHECK_THROWS_AS(description_fit(net, grid, off, id, fl), ColumnMismatch);
  Relation notdist({cols[0]}, {cols[6]}, lat);
  CHECK_THROWS_AS(description_fit(net, grid, notdist, id, fl), ColumnMismatch);
}
