#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "omegarel/omega_object.hpp"
#include "omegarel/relation.hpp"

namespace omegarel {

// Weighted tables are CSV: one header row with the attribute names plus a
// final `omega` column, one row per tuple with nonbot weight. A table
// without an `omega` column is a plain dataset; every row weighs top.

/// Read against known attributes; header columns may appear in any order.
Relation read_weighted_table(const std::string& path,
                             const std::vector<Attribute>& attrs,
                             LatticePtr lattice);

/// Read with inferred domains: per column, the distinct values sorted
/// numerically when they all parse as numbers, lexicographically otherwise.
Relation read_weighted_table(const std::string& path, LatticePtr lattice);

/// Sources first, then targets, then omega; rows sorted by tuple; weights
/// in the shortest decimal that parses back to the same value.
std::string format_weighted_table(const Relation& r);
void write_weighted_table(std::ostream& out, const Relation& r);

// Similarities use two copies of the carrier columns, suffixed `_1` and
// `_2`, so the header stays free of duplicate names.
Similarity read_similarity_table(const std::string& path,
                                 const std::vector<Attribute>& attrs,
                                 LatticePtr lattice);
std::string format_similarity_table(const Relation& endo);

/// Custom finite lattice from JSON: {"elements": [...], "bot": ..,
/// "top": .., "otimes"/"implies"/"meet"/"join": tables of element labels,
/// "oplus": optional}. Tables are validated exhaustively on load.
LatticePtr read_lattice_file(const std::string& path);

/// A built-in lattice name, or else a JSON file path resolved against
/// `base_dir`.
LatticePtr lattice_from_name(const std::string& kind_or_path,
                             const std::string& base_dir);

} // namespace omegarel
