#include "omegarel/table_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "omegarel/decimal.hpp"

namespace omegarel {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  bool weighted = false; // final column is `omega`
};

Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  Csv csv;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto cells = split_csv(t);
    if (csv.header.empty()) {
      csv.header = std::move(cells);
      continue;
    }
    if (cells.size() != csv.header.size())
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(csv.header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    csv.rows.push_back(std::move(cells));
  }
  if (csv.header.empty()) throw ParseError(path + ": missing header row");
  csv.weighted = csv.header.back() == "omega";
  return csv;
}

Relation from_csv(const Csv& csv, const std::string& path,
                  const std::vector<Attribute>& attrs, LatticePtr lattice) {
  size_t ncols = csv.header.size() - (csv.weighted ? 1 : 0);
  if (ncols != attrs.size())
    throw ParseError(path + ": expected " + std::to_string(attrs.size()) +
                     " attribute columns, found " + std::to_string(ncols));
  std::vector<size_t> column(attrs.size());
  for (size_t i = 0; i < attrs.size(); ++i) {
    bool found = false;
    for (size_t c = 0; c < ncols; ++c)
      if (csv.header[c] == attrs[i].name) {
        if (found)
          throw ParseError(path + ": column " + attrs[i].name +
                           " appears twice");
        column[i] = c;
        found = true;
      }
    if (!found)
      throw ParseError(path + ": missing column " + attrs[i].name);
  }

  Relation r({}, attrs, lattice);
  const double top = lattice->top();
  for (const auto& row : csv.rows) {
    Key k(attrs.size());
    for (size_t i = 0; i < attrs.size(); ++i) {
      const std::string& cell = row[column[i]];
      auto idx = attrs[i].domain->index_of(cell);
      if (!idx)
        throw ParseError(path + ": value " + cell +
                         " is not in the domain of " + attrs[i].name);
      k[i] = *idx;
    }
    double w = top;
    if (csv.weighted) {
      auto parsed = lattice->parse(row.back());
      if (!parsed)
        throw ParseError(path + ": weight " + row.back() +
                         " is not a lattice element");
      w = *parsed;
    }
    r.set(k, w);
  }
  return r;
}

} // namespace

Relation read_weighted_table(const std::string& path,
                             const std::vector<Attribute>& attrs,
                             LatticePtr lattice) {
  return from_csv(read_csv(path), path, attrs, lattice);
}

Relation read_weighted_table(const std::string& path, LatticePtr lattice) {
  Csv csv = read_csv(path);
  if (csv.rows.empty())
    throw ParseError(path + ": cannot infer domains from an empty table");
  size_t ncols = csv.header.size() - (csv.weighted ? 1 : 0);
  std::vector<Attribute> attrs;
  for (size_t c = 0; c < ncols; ++c) {
    std::vector<std::string> labels;
    for (const auto& row : csv.rows)
      if (std::find(labels.begin(), labels.end(), row[c]) == labels.end())
        labels.push_back(row[c]);
    bool numeric = !labels.empty();
    std::vector<double> values;
    for (const auto& l : labels) {
      auto v = parse_decimal(l);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (numeric) {
      std::sort(values.begin(), values.end());
      attrs.push_back({csv.header[c], Domain::from_values(std::move(values))});
    } else {
      std::sort(labels.begin(), labels.end());
      attrs.push_back({csv.header[c], Domain::of(std::move(labels))});
    }
  }
  return from_csv(csv, path, attrs, lattice);
}

std::string format_weighted_table(const Relation& r) {
  std::string out;
  auto all = r.all_attributes();
  for (size_t i = 0; i < all.size(); ++i) {
    for (size_t j = i + 1; j < all.size(); ++j)
      if (all[i].name == all[j].name)
        throw DuplicateAttribute("cannot format a table with two " +
                                 all[i].name + " columns; rename first");
    out += all[i].name + ",";
  }
  out += "omega\n";
  for (const auto& [k, w] : r.entries()) {
    for (size_t i = 0; i < all.size(); ++i)
      out += all[i].domain->label(k[i]) + ",";
    out += r.lattice()->format(w) + "\n";
  }
  return out;
}

void write_weighted_table(std::ostream& out, const Relation& r) {
  out << format_weighted_table(r);
}

Similarity read_similarity_table(const std::string& path,
                                 const std::vector<Attribute>& attrs,
                                 LatticePtr lattice) {
  std::vector<Attribute> doubled;
  for (const auto& a : attrs) doubled.push_back({a.name + "_1", a.domain});
  for (const auto& a : attrs) doubled.push_back({a.name + "_2", a.domain});
  Relation flat = read_weighted_table(path, doubled, lattice);
  Relation endo(attrs, attrs, lattice);
  for (const auto& [k, w] : flat.entries()) endo.set(k, w);
  return Similarity::from_relation(std::move(endo));
}

std::string format_similarity_table(const Relation& endo) {
  const auto& src = endo.sources();
  const auto& tgt = endo.targets();
  if (src.size() != tgt.size())
    throw DomainMismatch("not an endo-relation");
  std::vector<Attribute> doubled;
  for (const auto& a : src) doubled.push_back({a.name + "_1", a.domain});
  for (const auto& a : tgt) doubled.push_back({a.name + "_2", a.domain});
  Relation flat({}, doubled, endo.lattice());
  for (const auto& [k, w] : endo.entries()) flat.set(k, w);
  return format_weighted_table(flat);
}

// ---------------------------------------------------------------------------
// Finite lattices

LatticePtr read_lattice_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  try {
    Lattice::FiniteTables t;
    t.name = j.value("name", path);
    for (const auto& e : j.at("elements"))
      t.elements.push_back(e.get<std::string>());
    auto index_of = [&](const std::string& label) {
      for (size_t i = 0; i < t.elements.size(); ++i)
        if (t.elements[i] == label) return (int)i;
      throw ParseError(path + ": unknown element " + label);
    };
    t.bot = index_of(j.at("bot").get<std::string>());
    t.top = index_of(j.at("top").get<std::string>());
    auto table = [&](const char* op) {
      std::vector<std::vector<int>> rows;
      for (const auto& row : j.at(op)) {
        std::vector<int> cells;
        for (const auto& cell : row)
          cells.push_back(index_of(cell.get<std::string>()));
        rows.push_back(std::move(cells));
      }
      return rows;
    };
    t.conj = table("otimes");
    t.implies = table("implies");
    t.meet = table("meet");
    t.join = table("join");
    if (j.contains("oplus")) t.strong_disj = table("oplus");
    return Lattice::from_tables(std::move(t));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

LatticePtr lattice_from_name(const std::string& kind_or_path,
                             const std::string& base_dir) {
  try {
    return Lattice::make(kind_or_path);
  } catch (const UnknownLatticeKind&) {
    std::string path = kind_or_path;
    if (!base_dir.empty() && path.find('/') != 0)
      path = base_dir + "/" + path;
    return read_lattice_file(path);
  }
}

} // namespace omegarel
