#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "omegarel/diagram.hpp"
#include "omegarel/relation.hpp"

namespace omegarel {

/// One clamped-affine unit: z = min(1, max(0, w1*x1 + ... + wn*xn + b)).
struct Neuron {
  std::vector<std::string> inputs;
  std::vector<double> weights;
  double bias = 0;
  std::string output;
};

enum class WireRole { input, hidden, output };

/**
 * A feed-forward network of clamped-affine units over named wires.
 * Wires are partitioned into inputs (fed from outside), hidden wires and
 * outputs (each produced by exactly one neuron); the wiring must be acyclic.
 *
 * File format: JSON with
 *   {"wires":   [{"id": "x1", "role": "input"}, ...],
 *    "neurons": [{"inputs": ["x1","x2"], "weights": [1,1],
 *                 "bias": -1, "output": "y"}, ...]}
 */
class LnnNetwork {
public:
  LnnNetwork(std::vector<std::pair<std::string, WireRole>> wires,
             std::vector<Neuron> neurons);
  static LnnNetwork from_json_text(const std::string& text);
  static LnnNetwork from_json_file(const std::string& path);

  const std::vector<Neuron>& neurons() const { return neurons_; }
  const std::vector<std::string>& wires() const { return wire_order_; }
  WireRole role(const std::string& wire) const;
  std::vector<std::string> wires_with_role(WireRole r) const;

  /// Neuron indices ordered so every input is produced before use.
  const std::vector<size_t>& topo_order() const { return topo_; }

  /// Evaluate the whole network; returns a value for every wire.
  std::map<std::string, double>
  eval(const std::map<std::string, double>& inputs) const;

private:
  std::vector<std::string> wire_order_;
  std::map<std::string, WireRole> roles_;
  std::vector<Neuron> neurons_;
  std::vector<size_t> topo_;
};

double eval_neuron(const Neuron& n, const std::vector<double>& inputs);

// ---------------------------------------------------------------------------
// Classification and formulas

enum class NeuronShape { conjunctive, disjunctive, both, unclassified };

struct Literal {
  std::string wire;
  bool negated = false;
};

/**
 * Classification of a unit as a Lukasiewicz connective. After dropping
 * zero weights (disconnected inputs), weights must all be +-1; with
 * n negative and p positive weights, bias 1-p makes the unit a strong
 * conjunction of literals and bias n a strong disjunction (negated
 * literals on the negative-weight inputs). A single literal is both.
 * Anything else is unclassified; no rounding is attempted.
 */
struct Classification {
  NeuronShape shape = NeuronShape::unclassified;
  std::vector<Literal> literals; // in the neuron's input order
  bool classified() const { return shape != NeuronShape::unclassified; }
};

Classification classify_neuron(const Neuron& n);

/// Formula over wire names: literals combined by strong conjunction and
/// strong disjunction. Negation appears on literals only.
struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { literal, conj, disj };
  Kind kind = Kind::literal;
  Literal lit;                      // literal
  std::vector<FormulaPtr> parts;    // conj / disj

  static FormulaPtr literal(std::string wire, bool negated = false);
  static FormulaPtr conj(std::vector<FormulaPtr> parts);
  static FormulaPtr disj(std::vector<FormulaPtr> parts);
};

/// De Morgan dual: literals flip, connectives swap.
FormulaPtr negate(const FormulaPtr& f);

/// `~x` for negation, ` & ` and ` | ` for the connectives; subformulas
/// in parentheses, the whole formula bare.
std::string to_string(const FormulaPtr& f);

double eval_formula(const FormulaPtr& f,
                    const std::map<std::string, double>& env);

/// Variables in order of first appearance.
std::vector<std::string> formula_variables(const FormulaPtr& f);

/**
 * Per output wire, the formula over input wires denoted by the network:
 * each unit becomes its connective of literals, hidden wires are then
 * substituted by their formulas (dualized under a negated occurrence).
 * Throws UnclassifiableNeuron naming the produced wire otherwise.
 */
std::map<std::string, FormulaPtr> extract_formula(const LnnNetwork& net);

// ---------------------------------------------------------------------------
// Networks as diagrams

/// A unit output that fell between grid points and was moved.
struct SnapEvent {
  std::string wire;   // the produced wire
  Key inputs;         // grid indices of the unit's inputs
  double exact;       // clamped affine value
  double snapped;     // grid value used instead
};

struct NetworkDiagram {
  MultiDiagram diagram;
  std::vector<SnapEvent> snaps;
};

/**
 * One vertex per wire, all sharing the given grid as domain; one crisp
 * arrow per unit, relating each input tuple to the unit's output snapped
 * to the nearest grid point (ties toward the lower point). Vertex
 * distributions are top, similarities identities.
 */
NetworkDiagram network_to_diagram(const LnnNetwork& net,
                                  const std::vector<double>& grid,
                                  const Flavor& fl);

/**
 * Degree to which a dataset is described by the network: the vague limit
 * of the network diagram, summed down to the dataset's columns, compared
 * with the dataset distribution by lambda-similarity under `sim`.
 * Dataset columns must name wires and share the grid domain.
 */
double description_fit(const LnnNetwork& net, const std::vector<double>& grid,
                       const Relation& dataset, const Similarity& sim,
                       const Flavor& fl);

} // namespace omegarel
