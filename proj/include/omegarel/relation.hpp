#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "omegarel/lattice.hpp"

namespace omegarel {

/**
 * A finite attribute domain: an ordered list of element labels, optionally
 * carrying numeric values (grids and measured data). Ordering is the
 * declaration order and fixes tuple sort order everywhere.
 */
class Domain {
public:
  explicit Domain(std::vector<std::string> labels);
  /// Numeric domain from values; labels are the shortest exact decimals.
  static std::shared_ptr<const Domain> from_values(std::vector<double> values);
  /// Inclusive grid lo, lo+step, ..., up to hi (within 1e-9 of it).
  static std::shared_ptr<const Domain> grid(double lo, double hi, double step);
  static std::shared_ptr<const Domain> of(std::vector<std::string> labels);

  size_t size() const { return labels_.size(); }
  const std::string& label(int i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  bool numeric() const { return numeric_; }
  double value(int i) const { return values_.at(i); }
  const std::vector<double>& values() const { return values_; }

  /// Index by exact label; numeric domains fall back to value matching
  /// within 1e-12 so "1" and "1.0" name the same point.
  std::optional<int> index_of(const std::string& label) const;
  std::optional<int> index_of_value(double v, double tol = 1e-12) const;

  bool operator==(const Domain& o) const { return labels_ == o.labels_; }
  bool operator!=(const Domain& o) const { return !(*this == o); }

private:
  std::vector<std::string> labels_;
  std::vector<double> values_;
  bool numeric_ = false;
};

using DomainPtr = std::shared_ptr<const Domain>;

struct Attribute {
  std::string name;
  DomainPtr domain;
};

bool same_attribute(const Attribute& a, const Attribute& b);

/// Positional tuple of domain indices, sources first, then targets.
using Key = std::vector<int>;

/**
 * A lattice-valued relation between named attribute tuples: a sparse map
 * from (source tuple, target tuple) to carrier elements, with absent keys
 * reading as bot. Attribute names are unique within the source block and
 * within the target block; an endo-relation (a similarity, or the result
 * of composing a relation with its reverse) repeats names across the two
 * blocks, in which case the domains must agree.
 *
 * Distributions are relations with no source attributes.
 */
class Relation {
public:
  Relation(std::vector<Attribute> sources, std::vector<Attribute> targets,
           LatticePtr lattice);

  /// Scalar: no attributes at all, a single carrier element.
  static Relation scalar(double w, LatticePtr lattice);
  /// Identity endo-relation: top on the diagonal of the given attributes.
  static Relation identity(const std::vector<Attribute>& attrs, LatticePtr lattice);
  /// Distribution with every tuple at top.
  static Relation top_distribution(const std::vector<Attribute>& attrs, LatticePtr lattice);

  const std::vector<Attribute>& sources() const { return sources_; }
  const std::vector<Attribute>& targets() const { return targets_; }
  std::vector<Attribute> all_attributes() const;
  size_t arity() const { return sources_.size() + targets_.size(); }
  bool is_distribution() const { return sources_.empty(); }
  const LatticePtr& lattice() const { return lattice_; }

  /// Stores w at the tuple; storing bot erases (absent and bot coincide).
  void set(Key key, double w);
  void set_labels(const std::vector<std::string>& labels, double w);
  double at(const Key& key) const;
  int index_in_domain(size_t pos, const std::string& label) const;

  /// Sparse entries in lexicographic tuple order; bot never appears.
  const std::map<Key, double>& entries() const { return entries_; }
  size_t support_size() const { return entries_.size(); }

  /// Swap the two blocks: reverse()(t, s) == (*this)(s, t).
  Relation reverse() const;
  /// External product: every weight multiplied by lambda under the flavor.
  Relation scaled(double lambda, const Flavor& fl) const;
  /// All attributes moved to the target block (a distribution).
  Relation tabulate() const;
  /// Inverse of tabulate for a chosen source split; names must partition
  /// this distribution's attributes.
  Relation untabulate(const std::vector<std::string>& source_names) const;
  /// Cylindrical extension of a distribution to a superset of attributes.
  Relation extend_to(const std::vector<Attribute>& bigger) const;
  /// Eliminate named attributes of a distribution with flavor plus.
  Relation sum_out(const std::vector<std::string>& names, const Flavor& fl) const;
  Relation rename(const std::map<std::string, std::string>& mapping) const;
  /// Reorder blocks to the given attribute-name orders (same name sets).
  Relation reorder(const std::vector<std::string>& source_names,
                   const std::vector<std::string>& target_names) const;

  /// Same source and target name sets with equal domains.
  bool same_signature(const Relation& g) const;
  /// Pointwise lattice order; throws SignatureMismatch. Tuples are aligned
  /// by attribute name, so block order need not match.
  bool leq(const Relation& g, double tol = 0.0) const;
  bool equals(const Relation& g, double tol = 0.0) const;
  /// First tuple (in this relation's order) where leq/equals fails.
  std::optional<Key> leq_witness(const Relation& g, double tol = 0.0) const;

private:
  std::vector<Attribute> sources_, targets_;
  std::map<Key, double> entries_;
  LatticePtr lattice_;

  void check_key(const Key& k) const;
  friend Relation compose(const Relation& f, const Relation& g, const Flavor& fl);
};

/**
 * Relational composition in diagram order: f's targets feed g's sources,
 * matched by attribute name. With S the shared attributes,
 *
 *   (f.g)(x, z) = plus over tuples y in prod(S) of times(f(x, y), g(y, z))
 *
 * and the result signature is sources(f) + (sources(g) - S) against
 * targets(g) + (targets(f) - S). A name occurring in both result source
 * blocks (or both target blocks) is rejected as DuplicateAttribute.
 */
Relation compose(const Relation& f, const Relation& g, const Flavor& fl);

/// compose(f, compose(g, h)) with the same checks.
Relation compose(const Relation& f, const Relation& g, const Relation& h,
                 const Flavor& fl);

/// Calls fn with every key of the product of the attribute domains, in
/// lexicographic order (first attribute most significant).
void for_each_key(const std::vector<Attribute>& attrs,
                  const std::function<void(const Key&)>& fn);

} // namespace omegarel
