#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "omegarel/diagram.hpp"
#include "omegarel/omega_object.hpp"
#include "omegarel/relation.hpp"

namespace omegarel {

/**
 * One block of the aggregated diagram: a family of vertices, kept in sorted
 * label order so that equal families met through different arrows coincide.
 * The block's carrier is the product of its vertex domains.
 */
struct Block {
  std::vector<std::string> vertices;
  std::vector<Attribute> attrs;

  std::string label() const;             // vertices joined by '+'
  size_t tuple_count() const;
  std::string tuple_label(const Key& k) const; // domain labels joined by '|'
  size_t tuple_index(const Key& k) const;      // mixed-radix position
};

/// The blocks of a diagram: every arrow's source family, every arrow's
/// target family, and a singleton per isolated vertex; sorted, deduplicated.
std::vector<Block> colimit_blocks(const MultiDiagram& d);

/**
 * Aggregation of a multi-diagram: between two blocks there is at most one
 * morphism, the plus-sum of all parallel arrows, and each diagonal carries
 * the product of the block's vertex similarities. Requires idempotent plus.
 */
struct AggregatedDiagram {
  std::vector<Block> blocks;
  std::map<std::pair<size_t, size_t>, Relation> morphisms;
};

AggregatedDiagram aggregate(const MultiDiagram& d);

/**
 * The vague colimit: an endo-relation on the disjoint union of block
 * carriers, stored blockwise. Entry (J,L) is f_{J,L} plus the reverse of
 * f_{L,J}, so the whole relation equals its own reverse and the diagonals
 * dominate the identity. Transitivity is only guaranteed when every
 * composite of aggregated morphisms is bounded by the direct morphism
 * between the corresponding blocks; vague_colimit checks that bound and
 * records each violation, leaving the result intact.
 */
struct ColimitObject {
  std::vector<Block> blocks;
  std::map<std::pair<size_t, size_t>, Relation> relation;
  bool precondition_ok = true;
  std::vector<std::string> violations;

  double at(size_t bj, const Key& a, size_t bl, const Key& b,
            const Flavor& fl) const;
  size_t carrier_size() const;
};

ColimitObject vague_colimit(const MultiDiagram& d);

/**
 * Least similarity containing a reflexive, symmetric endo-relation:
 * iterate c <- c + c.c until nothing changes (bounded by carrier size + 2
 * rounds). Requires idempotent plus.
 */
Relation similarity_closure_relation(const Relation& c, const Flavor& fl);
Similarity similarity_closure(const Relation& c, const Flavor& fl);
ColimitObject similarity_closure(const ColimitObject& c, const Flavor& fl);

/**
 * Classical colimit of a crisp diagram, for cross-checking: union-find over
 * the disjoint union of block carriers, merging every source tuple with its
 * image under every arrow. All arrow relations must be crisp maps and all
 * vertex similarities identities.
 */
struct SetColimitResult {
  std::vector<Block> blocks;
  // Classes of (block index, tuple key), each class and the class list
  // ordered by first appearance in carrier order.
  std::vector<std::vector<std::pair<size_t, Key>>> classes;

  std::vector<std::vector<std::string>> class_labels() const;
};

SetColimitResult set_colimit_oracle(const MultiDiagram& d);

} // namespace omegarel
