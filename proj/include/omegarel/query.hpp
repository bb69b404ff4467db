#pragma once

#include <map>
#include <string>
#include <vector>

#include "omegarel/diagram.hpp"
#include "omegarel/omega_object.hpp"

namespace omegarel {

/**
 * A multi-graph homomorphism from a query graph into a diagram's graph:
 * vertices map to vertices and arrows to arrows so that the ordered source
 * and target families are preserved position by position. The query file
 * declares both the query graph and the mapping, one line each:
 *
 *   vertex q = A
 *   arrow qa : q1,q2 -> q3 = f
 */
struct QueryMap {
  struct Arrow {
    std::string name;
    std::vector<std::string> sources, targets;
    std::string image;
  };
  std::vector<std::pair<std::string, std::string>> vertices; // name -> image
  std::vector<Arrow> arrows;
};

QueryMap parse_query_file(const std::string& path);

/// Checks the homomorphism conditions against d's graph; throws
/// NotAHomomorphism naming the violating arrow or vertex.
void validate_query(const QueryMap& q, const MultiDiagram& d);

/// The composite diagram: query-shaped, with objects and relations pulled
/// back along the homomorphism (attributes renamed to query vertices).
MultiDiagram pull_back(const QueryMap& q, const MultiDiagram& d);

/// vague_limit of the pulled-back diagram.
Relation answer_query(const MultiDiagram& d, const QueryMap& q);

/**
 * Degree to which the dataset matches the diagram's limit through the
 * column mapping: sum the limit down to the mapped vertices, rename them
 * to the dataset's columns, and compare by lambda-similarity under `sim`.
 */
struct DescriptionReport {
  double degree = 0;
  bool satisfied = false;
};

DescriptionReport lambda_description(
    const MultiDiagram& d, const Relation& dataset,
    const std::map<std::string, std::string>& column_to_vertex,
    const Similarity& sim, double lambda, double eps = 1e-9);

} // namespace omegarel
