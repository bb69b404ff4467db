#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "omegarel/colimit.hpp"
#include "omegarel/decimal.hpp"
#include "omegarel/diagram.hpp"
#include "omegarel/lnn.hpp"
#include "omegarel/query.hpp"
#include "omegarel/spec_parser.hpp"
#include "omegarel/table_io.hpp"

using namespace omegarel;

namespace {

double verdict_eps() {
  const char* env = std::getenv("OMEGAREL_EPS");
  if (!env) return 1e-9;
  auto v = parse_decimal(env);
  if (!v) {
    std::cerr << "warning: ignoring malformed OMEGAREL_EPS\n";
    return 1e-9;
  }
  return *v;
}

// Raw value, plus the element label for finite lattices.
std::string format_degree(const LatticePtr& lat, double v) {
  if (lat->is_finite())
    return format_decimal(v) + " (" + lat->format(v) + ")";
  return lat->format(v);
}

std::pair<std::string, std::string> parse_flavor_flag(const std::string& s) {
  // times=<op>,plus=<op>
  auto comma = s.find(',');
  if (comma == std::string::npos || s.rfind("times=", 0) != 0 ||
      s.find("plus=", comma + 1) != comma + 1)
    throw ParseError("expected --flavor times=<op>,plus=<op>");
  return {s.substr(6, comma - 6), s.substr(comma + 6)};
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace((unsigned char)c)) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"many-valued relational algebra over residuated lattices"};
  app.require_subcommand(1);
  const double eps = verdict_eps();

  // ---- limit ------------------------------------------------------------
  std::string limit_spec;
  auto* limit_cmd = app.add_subcommand("limit", "vague limit of a diagram");
  limit_cmd->add_option("spec", limit_spec, "diagram spec file")->required();

  // ---- commute ----------------------------------------------------------
  std::string commute_spec, commute_sources;
  std::optional<double> commute_lambda;
  auto* commute_cmd =
      app.add_subcommand("commute", "commutativity degrees over the sources");
  commute_cmd->add_option("spec", commute_spec, "diagram spec file")
      ->required();
  commute_cmd->add_option("--sources", commute_sources,
                          "comma-separated source vertices (default: the "
                          "spec's `sources` line)");
  commute_cmd->add_option("--lambda", commute_lambda,
                          "verdict threshold; exit 1 when not met");

  // ---- colimit ----------------------------------------------------------
  std::string colimit_spec;
  bool colimit_closed = false, colimit_oracle = false;
  auto* colimit_cmd =
      app.add_subcommand("colimit", "vague colimit block relation");
  colimit_cmd->add_option("spec", colimit_spec, "diagram spec file")
      ->required();
  colimit_cmd->add_flag("--closed", colimit_closed,
                        "apply the similarity closure");
  colimit_cmd->add_flag("--oracle", colimit_oracle,
                        "print the classical partition instead (crisp only)");

  // ---- similar ----------------------------------------------------------
  std::string sim_t1, sim_t2, sim_file = "identity";
  std::string sim_lattice = "lukasiewicz", sim_flavor = "times=otimes,plus=join";
  auto* similar_cmd =
      app.add_subcommand("similar", "lambda-similarity of two distributions");
  similar_cmd->add_option("table1", sim_t1, "weighted table")->required();
  similar_cmd->add_option("table2", sim_t2, "weighted table")->required();
  similar_cmd->add_option("--similarity", sim_file,
                          "similarity table, or `identity`");
  similar_cmd->add_option("--lattice", sim_lattice,
                          "lukasiewicz|goedel|product|boolean|<file.json>");
  similar_cmd->add_option("--flavor", sim_flavor, "times=<op>,plus=<op>");

  // ---- query ------------------------------------------------------------
  std::string query_spec, query_file;
  auto* query_cmd =
      app.add_subcommand("query", "evaluate a query homomorphism");
  query_cmd->add_option("spec", query_spec, "diagram spec file")->required();
  query_cmd->add_option("query", query_file, "query mapping file")->required();

  // ---- lnn-extract --------------------------------------------------------
  std::string lnn_file, lnn_grid = "0,0.3,0.7,1";
  std::string lnn_dataset, lnn_similarity = "identity";
  std::string lnn_lattice = "lukasiewicz", lnn_flavor = "times=otimes,plus=join";
  std::optional<double> lnn_lambda;
  auto* lnn_cmd = app.add_subcommand(
      "lnn-extract", "formulas denoted by a Lukasiewicz network");
  lnn_cmd->add_option("network", lnn_file, "network JSON file")->required();
  lnn_cmd->add_option("--grid", lnn_grid, "comma-separated wire grid");
  lnn_cmd->add_option("--dataset", lnn_dataset,
                      "weighted table to score against the network");
  lnn_cmd->add_option("--similarity", lnn_similarity,
                      "similarity table for the fit, or `identity`");
  lnn_cmd->add_option("--lattice", lnn_lattice,
                      "lattice for the fit computation");
  lnn_cmd->add_option("--flavor", lnn_flavor, "times=<op>,plus=<op>");
  lnn_cmd->add_option("--lambda", lnn_lambda,
                      "fit threshold; exit 1 when not met");

  // ---- describe -----------------------------------------------------------
  std::string desc_spec, desc_dataset, desc_similarity = "identity", desc_map;
  std::optional<double> desc_lambda;
  auto* desc_cmd = app.add_subcommand(
      "describe", "lambda-description check of a dataset against a diagram");
  desc_cmd->add_option("spec", desc_spec, "diagram spec file")->required();
  desc_cmd->add_option("--dataset", desc_dataset, "weighted table")
      ->required();
  desc_cmd->add_option("--similarity", desc_similarity,
                       "similarity table on the dataset columns");
  desc_cmd->add_option("--map", desc_map,
                       "column=vertex,... (default: columns name vertices)");
  desc_cmd->add_option("--lambda", desc_lambda,
                       "verdict threshold; exit 1 when not met");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (limit_cmd->parsed()) {
    LoadedDiagram ld = load_diagram(limit_spec);
    write_weighted_table(std::cout, vague_limit(ld.diagram));
    return 0;
  }

  if (commute_cmd->parsed()) {
    LoadedDiagram ld = load_diagram(commute_spec);
    std::vector<std::string> sources;
    if (!commute_sources.empty()) sources = split_commas(commute_sources);
    else if (ld.diagram.sources()) sources = *ld.diagram.sources();
    else throw ParseError("no sources given and none declared in the spec");
    CommutativityReport rep = commutativity(ld.diagram, sources, eps);
    write_weighted_table(std::cout, rep.degrees);
    std::cout << "# commutative: " << (rep.commutative ? "true" : "false")
              << "\n";
    std::cout << "# inf-degree: " << format_degree(ld.lattice, rep.inf_degree)
              << "\n";
    if (commute_lambda) {
      bool ok = lambda_commutative(rep, *commute_lambda, eps);
      std::cout << "# " << format_decimal(*commute_lambda)
                << "-commutative: " << (ok ? "true" : "false") << "\n";
      return ok ? 0 : 1;
    }
    return 0;
  }

  if (colimit_cmd->parsed()) {
    LoadedDiagram ld = load_diagram(colimit_spec);
    if (colimit_oracle) {
      SetColimitResult res = set_colimit_oracle(ld.diagram);
      for (const auto& cls : res.class_labels()) {
        for (size_t i = 0; i < cls.size(); ++i)
          std::cout << (i ? ", " : "") << cls[i];
        std::cout << "\n";
      }
      return 0;
    }
    ColimitObject c = vague_colimit(ld.diagram);
    for (const auto& v : c.violations)
      std::cerr << "warning: " << v << "\n";
    if (colimit_closed) c = similarity_closure(c, ld.flavor);
    std::cout << "block_1,tuple_1,block_2,tuple_2,omega\n";
    for (const auto& [key, rel] : c.relation) {
      const Block& bj = c.blocks[key.first];
      const Block& bl = c.blocks[key.second];
      size_t ns = bj.attrs.size();
      for (const auto& [k, w] : rel.entries()) {
        Key a(k.begin(), k.begin() + ns);
        Key b(k.begin() + ns, k.end());
        std::cout << bj.label() << "," << bj.tuple_label(a) << ","
                  << bl.label() << "," << bl.tuple_label(b) << ","
                  << ld.lattice->format(w) << "\n";
      }
    }
    return 0;
  }

  if (similar_cmd->parsed()) {
    LatticePtr lat = lattice_from_name(sim_lattice, ".");
    auto [times, plus] = parse_flavor_flag(sim_flavor);
    Flavor fl = Flavor::make(lat, times, plus);
    Relation t1 = read_weighted_table(sim_t1, lat);
    Relation t2 = read_weighted_table(sim_t2, t1.targets(), lat);
    Similarity sim = sim_file == "identity"
                         ? Similarity::identity(t1.targets())
                         : read_similarity_table(sim_file, t1.targets(), lat);
    std::cout << format_degree(lat, lambda_similar(t1, t2, sim, fl)) << "\n";
    return 0;
  }

  if (query_cmd->parsed()) {
    LoadedDiagram ld = load_diagram(query_spec);
    QueryMap q = parse_query_file(query_file);
    write_weighted_table(std::cout, answer_query(ld.diagram, q));
    return 0;
  }

  if (lnn_cmd->parsed()) {
    LnnNetwork net = LnnNetwork::from_json_file(lnn_file);
    auto formulas = extract_formula(net);
    for (const auto& [wire, f] : formulas)
      std::cout << wire << " = " << to_string(f) << "\n";
    if (lnn_dataset.empty()) return 0;

    std::vector<double> grid;
    for (const auto& cell : split_commas(lnn_grid)) {
      auto v = parse_decimal(cell);
      if (!v) throw ParseError("grid value " + cell + " is not a number");
      grid.push_back(*v);
    }
    LatticePtr lat = lattice_from_name(lnn_lattice, ".");
    auto [times, plus] = parse_flavor_flag(lnn_flavor);
    Flavor fl = Flavor::make(lat, times, plus);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.empty()) throw EmptyGrid("the wire grid is empty");
    auto dom = Domain::from_values(grid);
    std::vector<Attribute> cols;
    {
      // columns must name wires; let the engine check the details
      Relation probe = read_weighted_table(lnn_dataset, lat);
      for (const auto& a : probe.targets()) cols.push_back({a.name, dom});
    }
    Relation dataset = read_weighted_table(lnn_dataset, cols, lat);
    Similarity sim = lnn_similarity == "identity"
                         ? Similarity::identity(cols)
                         : read_similarity_table(lnn_similarity, cols, lat);
    double fit = description_fit(net, grid, dataset, sim, fl);
    std::cout << "fit: " << format_degree(lat, fit) << "\n";
    if (lnn_lambda) return fit >= *lnn_lambda - eps ? 0 : 1;
    return 0;
  }

  if (desc_cmd->parsed()) {
    LoadedDiagram ld = load_diagram(desc_spec);
    std::map<std::string, std::string> mapping;
    for (const auto& pair : split_commas(desc_map)) {
      auto eq = pair.find('=');
      if (eq == std::string::npos)
        throw ParseError("expected --map column=vertex,...");
      mapping.emplace(pair.substr(0, eq), pair.substr(eq + 1));
    }
    // default: dataset columns name diagram vertices directly
    Relation probe = read_weighted_table(desc_dataset, ld.lattice);
    if (mapping.empty())
      for (const auto& a : probe.targets()) mapping.emplace(a.name, a.name);
    std::vector<Attribute> cols;
    for (const auto& a : probe.targets()) {
      auto it = mapping.find(a.name);
      if (it == mapping.end())
        throw ColumnMismatch("dataset column " + a.name + " is unmapped");
      cols.push_back({a.name, ld.diagram.attribute_of(it->second).domain});
    }
    Relation dataset = read_weighted_table(desc_dataset, cols, ld.lattice);
    Similarity sim =
        desc_similarity == "identity"
            ? Similarity::identity(cols)
            : read_similarity_table(desc_similarity, cols, ld.lattice);
    double lambda = desc_lambda.value_or(ld.lattice->bot());
    DescriptionReport rep =
        lambda_description(ld.diagram, dataset, mapping, sim, lambda, eps);
    std::cout << "degree: " << format_degree(ld.lattice, rep.degree) << "\n";
    if (desc_lambda) {
      std::cout << format_decimal(*desc_lambda)
                << "-described: " << (rep.satisfied ? "true" : "false")
                << "\n";
      return rep.satisfied ? 0 : 1;
    }
    return 0;
  }

  return 0;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
