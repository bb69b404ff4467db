#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "omegarel/errors.hpp"

namespace omegarel {

/**
 * A complete residuated lattice: a bounded lattice (meet, join, bot, top)
 * carrying a commutative monoid (conj, top) whose residuum (implies)
 * satisfies the adjunction
 *
 *     z <= implies(x, y)   iff   conj(x, z) <= y.
 *
 * Four built-in truth-value algebras live on [0,1] or {0,1}:
 *
 *   lukasiewicz   conj = max(x+y-1, 0)   implies = min(1, 1-x+y)
 *   goedel        conj = min(x, y)       implies = (x<=y ? 1 : y)
 *   product       conj = x*y             implies = (x<=y ? 1 : y/x)
 *   boolean       two-element sublattice {0,1}, all of the above coincide
 *
 * The product residuum at x = 0 is defined to be top (the supremum that
 * the adjunction prescribes). Łukasiewicz and boolean additionally carry
 * the strong disjunction min(x+y, 1); the other built-ins do not, and
 * asking for it raises UnknownOpName.
 *
 * Custom finite algebras load from explicit operation tables (see
 * from_tables / table_io) and are validated exhaustively against the
 * lattice laws and the adjunction. Their elements are label indices.
 *
 * Cartesian products of lattices act componentwise on value vectors; the
 * scalar (double) entry points require arity() == 1, which is all the
 * relational layer supports.
 */
class Lattice {
public:
  enum class Kind { lukasiewicz, goedel, product, boolean_kind, finite, cartesian };

  /// Operation tables for a custom finite lattice. Indices into `elements`.
  struct FiniteTables {
    std::string name;
    std::vector<std::string> elements;
    int bot = -1, top = -1;
    std::vector<std::vector<int>> conj, implies, meet, join;
    std::vector<std::vector<int>> strong_disj; // optional, empty if absent
  };

  /// Built-in lattice by name: "lukasiewicz", "goedel", "product", "boolean".
  static std::shared_ptr<const Lattice> make(const std::string& kind);
  /// Custom finite lattice; validates every law exhaustively.
  static std::shared_ptr<const Lattice> from_tables(FiniteTables tables);
  /// Componentwise product of two lattices.
  static std::shared_ptr<const Lattice> cartesian(std::shared_ptr<const Lattice> a,
                                                  std::shared_ptr<const Lattice> b);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  /// Number of scalar components (1 except for cartesian lattices).
  int arity() const { return arity_; }
  bool is_finite() const;

  // Scalar operations. Require arity() == 1.
  double conj(double x, double y) const;
  double implies(double x, double y) const;
  double meet(double x, double y) const;
  double join(double x, double y) const;
  bool has_strong_disj() const;
  double strong_disj(double x, double y) const;
  double bot() const;
  double top() const;
  bool leq(double x, double y) const;
  bool contains(double x) const;

  /// Formats a carrier element (finite lattices print their label).
  std::string format(double x) const;
  /// Parses a carrier element; for finite lattices the label, otherwise a
  /// decimal in [0,1] (boolean: 0 or 1). Nullopt when not in the carrier.
  std::optional<double> parse(const std::string& text) const;

  // Vector operations, defined for every arity. Each component is handled
  // by the corresponding component lattice.
  using Value = std::vector<double>;
  Value conj(const Value& x, const Value& y) const;
  Value implies(const Value& x, const Value& y) const;
  Value meet(const Value& x, const Value& y) const;
  Value join(const Value& x, const Value& y) const;
  Value bot_value() const;
  Value top_value() const;
  bool leq(const Value& x, const Value& y) const;

  /// Structural equality: two lattices are compatible when relations over
  /// one may be combined with relations over the other.
  bool same_as(const Lattice& other) const;

  /// Representative sample of the carrier, used by law/flavor validation.
  std::vector<double> sample() const;

private:
  Lattice() = default;

  Kind kind_ = Kind::lukasiewicz;
  std::string name_;
  int arity_ = 1;
  FiniteTables tables_;                                // kind == finite
  std::vector<std::shared_ptr<const Lattice>> parts_;  // kind == cartesian

  void validate_tables() const;
  const Lattice& scalar() const;
};

using LatticePtr = std::shared_ptr<const Lattice>;

/**
 * A flavor is the semiring structure (carrier, times, top, plus) that
 * drives relational composition: `times` weighs the conjunction of facts
 * along a path, `plus` aggregates over the eliminated middle tuples.
 *
 * `times` is the lattice conj or meet; `plus` is join or (where defined)
 * the strong disjunction. Construction checks, on a deterministic carrier
 * sample: times-monoid laws with unit top, plus associativity and
 * commutativity, monotonicity of both, and distributivity of times over
 * plus. Distributivity does not hold for the strong disjunction (e.g. on
 * Łukasiewicz, x=0.8, y=z=0.7 gives x(y+z)=0.8 but xy+xz=1); such flavors
 * still construct — the algebra is used as-is downstream — and record a
 * witnessing triple, unless `require_distributive` is set, in which case
 * construction throws DistributivityViolation.
 *
 * plus over an empty index set yields bot, so bot-default sparse relations
 * and the aggregation agree.
 */
class Flavor {
public:
  enum class Times { conj, meet };
  enum class Plus { strong_disj, join };

  /// Op names: times = "otimes" | "meet", plus = "oplus" | "join".
  static Flavor make(LatticePtr lattice, const std::string& times,
                     const std::string& plus, bool require_distributive = false);
  static Flavor make(LatticePtr lattice, Times times, Plus plus,
                     bool require_distributive = false);

  const LatticePtr& lattice() const { return lattice_; }
  Times times_op() const { return times_; }
  Plus plus_op() const { return plus_; }
  std::string times_name() const { return times_ == Times::conj ? "otimes" : "meet"; }
  std::string plus_name() const { return plus_ == Plus::strong_disj ? "oplus" : "join"; }

  double times(double x, double y) const;
  double plus(double x, double y) const;
  double one() const { return lattice_->top(); }
  double zero() const { return lattice_->bot(); }

  /// Sampled semiring distributivity; witness() gives a failing (x,y,z).
  bool distributive() const { return distributive_; }
  const std::optional<std::array<double, 3>>& witness() const { return witness_; }
  /// Sampled idempotency of plus (true for join, false for oplus outside
  /// the boolean lattice). Colimit aggregation requires it.
  bool plus_idempotent() const { return plus_idempotent_; }

private:
  Flavor() = default;
  LatticePtr lattice_;
  Times times_ = Times::conj;
  Plus plus_ = Plus::join;
  bool distributive_ = true;
  bool plus_idempotent_ = true;
  std::optional<std::array<double, 3>> witness_;
};

} // namespace omegarel
