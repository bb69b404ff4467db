#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "omegarel/omega_object.hpp"
#include "omegarel/relation.hpp"

namespace omegarel {

struct MultiArrow {
  std::string name;
  std::vector<std::string> sources, targets;
};

/**
 * A finite multi-graph: labeled vertices and arrows from vertex families
 * to vertex families. Arrow source and target families must be disjoint
 * (no loops) and may not repeat a vertex.
 */
class MultiGraph {
public:
  MultiGraph() = default;
  MultiGraph(std::vector<std::string> vertices, std::vector<MultiArrow> arrows);

  void add_vertex(const std::string& label);
  void add_arrow(MultiArrow arrow);

  const std::vector<std::string>& vertices() const { return vertices_; }
  const std::vector<MultiArrow>& arrows() const { return arrows_; }
  bool has_vertex(const std::string& label) const;

  /// Vertices used as arrow sources but never as arrow targets.
  std::vector<std::string> source_vertices() const;
  /// Vertices used as arrow targets but never as arrow sources.
  std::vector<std::string> target_vertices() const;
  /// Vertices touched by no arrow at all.
  std::vector<std::string> isolated_vertices() const;

private:
  std::vector<std::string> vertices_;
  std::vector<MultiArrow> arrows_;
};

/**
 * Glue g2 onto g1: vertices shared between g1's target boundary and g2's
 * source boundary are identified; every other colliding label from g2 is
 * kept distinct under a "#2" suffix (arrows likewise). Arrows are the
 * disjoint union.
 */
MultiGraph glue(const MultiGraph& g1, const MultiGraph& g2);

/**
 * A diagram over a multi-graph: one object per vertex (carrier is the
 * single attribute named by the vertex label), one relation per arrow
 * whose blocks are exactly the arrow's endpoint attributes, a flavor, and
 * an optional distinguished source-vertex list.
 */
class MultiDiagram {
public:
  MultiDiagram(MultiGraph graph, std::map<std::string, OmegaObject> vertex_objects,
               std::map<std::string, Relation> arrow_relations, Flavor flavor,
               std::optional<std::vector<std::string>> sources = std::nullopt);

  const MultiGraph& graph() const { return graph_; }
  const Flavor& flavor() const { return flavor_; }
  const OmegaObject& object_at(const std::string& vertex) const;
  const Relation& relation_of(const std::string& arrow) const;
  const std::optional<std::vector<std::string>>& sources() const { return sources_; }
  const Attribute& attribute_of(const std::string& vertex) const;
  /// All vertex attributes in declaration order.
  std::vector<Attribute> attributes() const;

private:
  MultiGraph graph_;
  std::map<std::string, OmegaObject> vertex_objects_;
  std::map<std::string, Relation> arrow_relations_;
  Flavor flavor_;
  std::optional<std::vector<std::string>> sources_;
};

/**
 * The vague limit: a distribution over the product of every vertex domain,
 * weighing each tuple by flavor-times over all arrow relations evaluated
 * at their attributes, times the distributions of isolated vertices.
 * Factors are joined sparsely, smallest estimated intermediate first; the
 * result is reordered to vertex declaration order.
 */
Relation vague_limit(const MultiDiagram& d);

/// A crisp cone: a finite apex and one leg per vertex.
struct Cone {
  std::vector<std::string> apex;                       // element names
  std::map<std::string, std::vector<int>> legs;        // vertex -> per-apex domain index
};

/// Distribution over the vertex product induced by a cone: plus-fold of
/// top over apex elements mapping to each tuple (the image, crisply).
Relation cone_distribution(const Cone& cone, const MultiDiagram& d);

struct LimitDegree {
  double degree = 0;
  bool satisfied = false;
};

/// Degree to which the cone is a limit: lambda_similar of the vague limit
/// against the cone distribution under the product of vertex similarities.
LimitDegree lambda_limit(const MultiDiagram& d, const Cone& cone, double lambda,
                         double eps = 1e-9);

struct CommutativityReport {
  Relation degrees;       // distribution over the kept source vertices
  bool commutative = false; // degrees constantly top over the full product
  double inf_degree = 0;    // infimum over the full source product
};

/**
 * Commutativity along the source family: sum out every non-source vertex
 * of the vague limit. With an empty family this is the universal degree (a
 * scalar). `commutative` asks the result to be constantly top across the
 * whole source product, absent tuples reading bot.
 */
CommutativityReport commutativity(const MultiDiagram& d,
                                  const std::vector<std::string>& source_vertices,
                                  double eps = 1e-9);

/// degree >= lambda - eps against the report's infimum.
bool lambda_commutative(const CommutativityReport& report, double lambda,
                        double eps = 1e-9);

} // namespace omegarel
