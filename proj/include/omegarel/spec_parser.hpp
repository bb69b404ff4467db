#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "omegarel/diagram.hpp"
#include "omegarel/lattice.hpp"

namespace omegarel {

/**
 * Parsed form of a diagram spec file. The format is line-oriented; `#`
 * starts a comment. In any order, with lattice/flavor/domains before use:
 *
 *   lattice lukasiewicz            # or goedel|product|boolean|<file.json>
 *   flavor times=otimes plus=join  # times: otimes|meet, plus: oplus|join
 *   domain D = {a, b, c}
 *   domain G = grid(-2, 2, 0.1)
 *   vertex A : D                   # options: dist=<file>|top
 *   vertex B : D dist=b.csv sim=beta.csv   #  sim=<file>|identity
 *   arrow f : A,B -> C table=f.csv # or builtin=gaussian-sum|equality
 *   sources A,B
 *
 * File paths are resolved against the spec file's directory.
 */
struct DiagramSpec {
  struct Vertex {
    std::string name, domain;
    std::string dist = "top", sim = "identity";
  };
  struct Arrow {
    std::string name;
    std::vector<std::string> sources, targets;
    std::string table;   // exactly one of table / builtin is set
    std::string builtin;
  };

  std::string base_dir;
  std::string lattice;
  std::string times, plus;
  std::map<std::string, DomainPtr> domains;
  std::vector<Vertex> vertices;
  std::vector<Arrow> arrows;
  std::optional<std::vector<std::string>> sources;
};

/// Syntax pass only: reads the file, checks line shapes, parses domains.
DiagramSpec parse_spec(const std::string& path);

/// Everything the engine needs from one spec file.
struct LoadedDiagram {
  DiagramSpec spec;
  LatticePtr lattice;
  Flavor flavor;
  MultiDiagram diagram;
};

/// Parse, resolve references, load tables, validate, build.
LoadedDiagram load_diagram(const std::string& path);

} // namespace omegarel
