#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omegarel/relation.hpp"

namespace omegarel {

/**
 * A similarity over a carrier of attributes, kept as a list of blocks so
 * products across disjoint carriers never have to be materialized: the
 * value at a pair of carrier tuples is the flavor-times over the blocks,
 * and an identity block contributes top or bot by equality alone.
 */
class Similarity {
public:
  /// Identity similarity (crisp equality) on the given attributes.
  static Similarity identity(std::vector<Attribute> carrier);
  /// Wraps an endo-relation (sources == targets, name for name).
  static Similarity from_relation(Relation endo);
  /// Concatenation of blocks over disjoint carriers.
  static Similarity product(std::vector<Similarity> parts);

  const std::vector<Attribute>& carrier() const { return carrier_; }

  /// Value at a pair of carrier tuples (indices in carrier order).
  double at(const Key& a, const Key& b, const Flavor& fl) const;

  /// Materialized endo-relation over the full carrier.
  Relation as_relation(const Flavor& fl) const;

  bool is_identity() const;

private:
  struct Block {
    std::vector<Attribute> attrs;
    std::optional<Relation> rel; // nullopt: identity block
  };
  Similarity() = default;
  std::vector<Attribute> carrier_;
  std::vector<Block> blocks_;
};

/// A weighted dataset living inside a similarity space: carrier attributes,
/// a distribution over them, and a similarity on them.
struct OmegaObject {
  std::vector<Attribute> carrier;
  Relation dist;
  Similarity sim;

  OmegaObject(std::vector<Attribute> carrier_, Relation dist_, Similarity sim_);
  static OmegaObject crisp(std::vector<Attribute> carrier, Relation dist);
};

/// Diagnostic for the similarity axioms under a flavor. `witness` entries
/// are carrier tuple pairs where the named axiom first fails.
struct SimilarityReport {
  bool reflexive = false, symmetric = false, transitive = false;
  std::optional<std::pair<Key, Key>> reflexivity_witness;
  std::optional<std::pair<Key, Key>> symmetry_witness;
  std::optional<std::pair<Key, Key>> transitivity_witness;
  bool ok() const { return reflexive && symmetric && transitive; }
  /// transitive and idempotent (alpha . alpha == alpha)
  bool equivalence = false;
};

SimilarityReport check_similarity(const Relation& alpha, const Flavor& fl,
                                  double eps = 1e-9);

/// Diagnostic for the bimodule conditions of f against source and target
/// objects: distributions are carried (dist then f <= target dist) and the
/// similarities are absorbed on both sides. The optional extensionality
/// condition (source dist then similarity <= source dist) is off by
/// default.
struct BimoduleReport {
  bool carries_dist = false;
  bool absorbs_source_sim = false;
  bool absorbs_target_sim = false;
  bool extensional = true;
  std::optional<Key> witness;
  bool ok() const {
    return carries_dist && absorbs_source_sim && absorbs_target_sim && extensional;
  }
};

BimoduleReport check_bimodule(const Relation& f, const OmegaObject& from,
                              const OmegaObject& to, const Flavor& fl,
                              bool extensionality = false, double eps = 1e-9);

/// entire: identity on the sources <= f then reverse(f)
/// simple: reverse(f) then f <= identity on the targets
struct MapReport {
  bool entire = false, simple = false;
  bool map() const { return entire && simple; }
};

MapReport classify_map(const Relation& f, const Flavor& fl, double eps = 1e-9);

/// Checks that f presents `to` as a quotient-like refinement of `from`:
/// reverse(f) then f is the identity on to.carrier, f carries the
/// distribution onto to.dist, and conjugating from's similarity by f gives
/// to's similarity.
struct RefinementReport {
  bool identity_on_target = false;
  bool carries_dist = false;
  bool transports_sim = false;
  std::optional<Key> witness;
  bool ok() const { return identity_on_target && carries_dist && transports_sim; }
};

RefinementReport check_refinement(const Relation& f, const OmegaObject& from,
                                  const OmegaObject& to, const Flavor& fl,
                                  double eps = 1e-9);

/// Degree to which two distributions over the similarity's carrier agree:
/// plus over pairs (a, b) of times(y(b), times(alpha(a, b), x(a))).
double lambda_similar(const Relation& x, const Relation& y,
                      const Similarity& alpha, const Flavor& fl);

/// Agreement degree of two parallel relations: lambda_similar of their
/// tabulations under a similarity on the union of their attributes.
double lambda_similar_relations(const Relation& f, const Relation& g,
                                const Similarity& alpha_beta, const Flavor& fl);

// ---------------------------------------------------------------------------
// Kernel-induced similarities

struct KernelSpec {
  enum class Kind { linear, normalized_linear, polynomial, gaussian_rbf };
  Kind kind = Kind::linear;
  double l = 1.0; // polynomial offset / rbf scale
  int p = 2;      // polynomial degree

  static KernelSpec linear() { return {Kind::linear, 0, 0}; }
  static KernelSpec normalized_linear() { return {Kind::normalized_linear, 0, 0}; }
  static KernelSpec polynomial(double l, int p) { return {Kind::polynomial, l, p}; }
  static KernelSpec gaussian_rbf(double l) { return {Kind::gaussian_rbf, l, 0}; }
};

double kernel_value(const KernelSpec& k, const std::vector<double>& x,
                    const std::vector<double>& y);

struct KernelSimilarityResult {
  Similarity sim;
  /// Pairs whose squared kernel distance came out negative and were
  /// clamped to zero; nonempty signals a non-positive-definite kernel.
  int clamped_pairs = 0;
  double most_negative = 0.0;
};

/**
 * Similarity from a kernel: d(x,y) = sqrt(k(x,x) - 2 k(x,y) + k(y,y)) and
 * s(x,y) = base^(-d(x,y)), base > 1. `points` must align with the
 * attribute's domain; for a numeric domain points may be omitted and the
 * domain values are used as one-dimensional vectors.
 */
KernelSimilarityResult kernel_similarity(const Attribute& attr,
                                         const std::vector<std::vector<double>>& points,
                                         const KernelSpec& kernel, double base,
                                         LatticePtr lattice);
KernelSimilarityResult kernel_similarity(const Attribute& attr, const KernelSpec& kernel,
                                         double base, LatticePtr lattice);

} // namespace omegarel
