#include "omegarel/relation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include "omegarel/decimal.hpp"

namespace omegarel {

std::string format_decimal(double x) {
  if (x == 0.0) x = 0.0; // normalize -0
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_decimal(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw DomainMismatch("attribute domain must be non-empty");
  std::set<std::string> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second)
      throw DomainMismatch("duplicate domain label: " + l);
  numeric_ = true;
  for (const auto& l : labels_) {
    auto v = parse_decimal(l);
    if (!v) { numeric_ = false; break; }
    values_.push_back(*v);
  }
  if (!numeric_) values_.clear();
}

std::shared_ptr<const Domain> Domain::of(std::vector<std::string> labels) {
  return std::make_shared<Domain>(std::move(labels));
}

std::shared_ptr<const Domain> Domain::from_values(std::vector<double> values) {
  std::vector<std::string> labels;
  labels.reserve(values.size());
  for (double v : values) labels.push_back(format_decimal(v));
  return of(std::move(labels));
}

std::shared_ptr<const Domain> Domain::grid(double lo, double hi, double step) {
  if (step <= 0) throw DomainMismatch("grid step must be positive");
  std::vector<double> values;
  // When lo and step are short decimals, walk the grid in integer decimal
  // units so labels come out as the intended decimals (-2, -1.9, ...)
  // instead of accumulating binary rounding.
  double den = 1;
  while (den <= 1e9 &&
         (std::abs(lo * den - std::round(lo * den)) > 1e-6 ||
          std::abs(step * den - std::round(step * den)) > 1e-6))
    den *= 10;
  if (den <= 1e9) {
    const long long l = llround(lo * den), s = llround(step * den);
    for (long long v = l; (double)v / den <= hi + 1e-9; v += s)
      values.push_back((double)v / den);
  } else {
    for (int i = 0;; ++i) {
      double v = lo + i * step;
      if (v > hi + 1e-9) break;
      values.push_back(v);
    }
  }
  if (values.empty()) throw DomainMismatch("grid is empty");
  return from_values(std::move(values));
}

std::optional<int> Domain::index_of(const std::string& label) const {
  for (size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return (int)i;
  if (numeric_) {
    auto v = parse_decimal(label);
    if (v) return index_of_value(*v);
  }
  return std::nullopt;
}

std::optional<int> Domain::index_of_value(double v, double tol) const {
  if (!numeric_) return std::nullopt;
  int best = -1;
  double best_d = tol;
  for (size_t i = 0; i < values_.size(); ++i) {
    double d = std::abs(values_[i] - v);
    if (d <= best_d) { best_d = d; best = (int)i; }
  }
  if (best < 0) return std::nullopt;
  return best;
}

bool same_attribute(const Attribute& a, const Attribute& b) {
  return a.name == b.name && a.domain && b.domain && *a.domain == *b.domain;
}

// ---------------------------------------------------------------------------
// Relation

Relation::Relation(std::vector<Attribute> sources, std::vector<Attribute> targets,
                   LatticePtr lattice)
    : sources_(std::move(sources)), targets_(std::move(targets)),
      lattice_(std::move(lattice)) {
  if (!lattice_) throw CarrierError("relation requires a lattice");
  if (lattice_->arity() != 1)
    throw CarrierError("relations are defined over scalar lattices only");
  auto check_block = [](const std::vector<Attribute>& block, const char* which) {
    std::set<std::string> seen;
    for (const auto& a : block) {
      if (!a.domain) throw DomainMismatch("attribute " + a.name + " has no domain");
      if (!seen.insert(a.name).second)
        throw DuplicateAttribute("duplicate " + std::string(which) +
                                 " attribute: " + a.name);
    }
  };
  check_block(sources_, "source");
  check_block(targets_, "target");
  for (const auto& s : sources_)
    for (const auto& t : targets_)
      if (s.name == t.name && *s.domain != *t.domain)
        throw DomainMismatch("attribute " + s.name +
                             " appears on both sides with different domains");
}

Relation Relation::scalar(double w, LatticePtr lattice) {
  Relation r({}, {}, std::move(lattice));
  r.set({}, w);
  return r;
}

Relation Relation::identity(const std::vector<Attribute>& attrs, LatticePtr lattice) {
  Relation r(attrs, attrs, std::move(lattice));
  const double top = r.lattice_->top();
  Key key(attrs.size() * 2, 0);
  // iterate the product of domains once, diagonal entries only
  size_t n = attrs.size();
  std::vector<int> idx(n, 0);
  for (;;) {
    for (size_t i = 0; i < n; ++i) { key[i] = idx[i]; key[n + i] = idx[i]; }
    r.set(key, top);
    size_t p = n;
    while (p > 0) {
      --p;
      if (++idx[p] < (int)attrs[p].domain->size()) break;
      idx[p] = 0;
      if (p == 0) return r;
    }
    if (n == 0) return r;
  }
}

Relation Relation::top_distribution(const std::vector<Attribute>& attrs,
                                    LatticePtr lattice) {
  Relation r({}, attrs, std::move(lattice));
  const double top = r.lattice_->top();
  size_t n = attrs.size();
  std::vector<int> idx(n, 0);
  for (;;) {
    r.set(Key(idx.begin(), idx.end()), top);
    size_t p = n;
    while (p > 0) {
      --p;
      if (++idx[p] < (int)attrs[p].domain->size()) break;
      idx[p] = 0;
      if (p == 0) return r;
    }
    if (n == 0) return r;
  }
}

std::vector<Attribute> Relation::all_attributes() const {
  std::vector<Attribute> all = sources_;
  all.insert(all.end(), targets_.begin(), targets_.end());
  return all;
}

void Relation::check_key(const Key& k) const {
  if (k.size() != arity())
    throw ArityMismatch("tuple arity " + std::to_string(k.size()) +
                        " does not match relation arity " + std::to_string(arity()));
  auto all = all_attributes();
  for (size_t i = 0; i < k.size(); ++i)
    if (k[i] < 0 || k[i] >= (int)all[i].domain->size())
      throw DomainMismatch("tuple component out of range for attribute " + all[i].name);
}

void Relation::set(Key key, double w) {
  check_key(key);
  if (!lattice_->contains(w))
    throw CarrierError("weight " + format_decimal(w) + " is not in the carrier of " +
                       lattice_->name());
  if (w == lattice_->bot()) entries_.erase(key);
  else entries_[std::move(key)] = w;
}

int Relation::index_in_domain(size_t pos, const std::string& label) const {
  auto all = all_attributes();
  if (pos >= all.size()) throw ArityMismatch("attribute position out of range");
  auto idx = all[pos].domain->index_of(label);
  if (!idx)
    throw DomainMismatch("value '" + label + "' is not in the domain of attribute " +
                         all[pos].name);
  return *idx;
}

void Relation::set_labels(const std::vector<std::string>& labels, double w) {
  if (labels.size() != arity())
    throw ArityMismatch("tuple arity does not match relation arity");
  Key key(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) key[i] = index_in_domain(i, labels[i]);
  set(std::move(key), w);
}

double Relation::at(const Key& key) const {
  check_key(key);
  auto it = entries_.find(key);
  return it == entries_.end() ? lattice_->bot() : it->second;
}

Relation Relation::reverse() const {
  Relation r(targets_, sources_, lattice_);
  const size_t ns = sources_.size(), nt = targets_.size();
  for (const auto& [k, w] : entries_) {
    Key rk(k.size());
    for (size_t i = 0; i < nt; ++i) rk[i] = k[ns + i];
    for (size_t i = 0; i < ns; ++i) rk[nt + i] = k[i];
    r.entries_[std::move(rk)] = w;
  }
  return r;
}

Relation Relation::scaled(double lambda, const Flavor& fl) const {
  if (!fl.lattice()->same_as(*lattice_))
    throw LatticeMismatch("flavor lattice differs from relation lattice");
  if (!lattice_->contains(lambda))
    throw CarrierError("scale factor is not in the carrier");
  Relation r(sources_, targets_, lattice_);
  for (const auto& [k, w] : entries_) {
    double v = fl.times(w, lambda);
    if (v != lattice_->bot()) r.entries_[k] = v;
  }
  return r;
}

Relation Relation::tabulate() const {
  // An endo-relation repeats names across blocks; flattening those into a
  // single block has no well-formed attribute set.
  Relation r({}, all_attributes(), lattice_);
  r.entries_ = entries_;
  return r;
}

Relation Relation::untabulate(const std::vector<std::string>& source_names) const {
  if (!is_distribution())
    throw SignatureMismatch("untabulate expects a distribution");
  std::vector<Attribute> srcs, tgts;
  std::vector<size_t> src_pos, tgt_pos;
  std::set<std::string> wanted(source_names.begin(), source_names.end());
  if (wanted.size() != source_names.size())
    throw DuplicateAttribute("duplicate name in untabulate source split");
  for (size_t i = 0; i < targets_.size(); ++i) {
    if (wanted.count(targets_[i].name)) {
      srcs.push_back(targets_[i]);
      src_pos.push_back(i);
      wanted.erase(targets_[i].name);
    } else {
      tgts.push_back(targets_[i]);
      tgt_pos.push_back(i);
    }
  }
  if (!wanted.empty())
    throw UnknownAttribute("untabulate source split names an absent attribute: " +
                           *wanted.begin());
  Relation r(std::move(srcs), std::move(tgts), lattice_);
  for (const auto& [k, w] : entries_) {
    Key nk;
    nk.reserve(k.size());
    for (size_t p : src_pos) nk.push_back(k[p]);
    for (size_t p : tgt_pos) nk.push_back(k[p]);
    r.entries_[std::move(nk)] = w;
  }
  return r;
}

Relation Relation::extend_to(const std::vector<Attribute>& bigger) const {
  if (!is_distribution())
    throw SignatureMismatch("extend_to expects a distribution");
  // every current attribute must appear in `bigger` with the same domain
  std::vector<int> position_of(targets_.size(), -1);
  for (size_t i = 0; i < targets_.size(); ++i) {
    for (size_t j = 0; j < bigger.size(); ++j)
      if (same_attribute(targets_[i], bigger[j])) { position_of[i] = (int)j; break; }
    if (position_of[i] < 0)
      throw NotASuperset("extend_to target misses attribute " + targets_[i].name);
  }
  std::vector<size_t> fresh;
  for (size_t j = 0; j < bigger.size(); ++j) {
    bool covered = false;
    for (int p : position_of) covered = covered || (size_t)p == j;
    if (!covered) fresh.push_back(j);
  }
  Relation r({}, bigger, lattice_);
  for (const auto& [k, w] : entries_) {
    Key base(bigger.size(), 0);
    for (size_t i = 0; i < k.size(); ++i) base[position_of[i]] = k[i];
    // enumerate the fresh coordinates
    std::vector<int> idx(fresh.size(), 0);
    for (;;) {
      Key nk = base;
      for (size_t i = 0; i < fresh.size(); ++i) nk[fresh[i]] = idx[i];
      r.entries_[std::move(nk)] = w;
      size_t p = fresh.size();
      bool done = fresh.empty();
      while (p > 0) {
        --p;
        if (++idx[p] < (int)bigger[fresh[p]].domain->size()) break;
        idx[p] = 0;
        if (p == 0) done = true;
      }
      if (done) break;
    }
  }
  return r;
}

Relation Relation::sum_out(const std::vector<std::string>& names,
                           const Flavor& fl) const {
  if (!is_distribution())
    throw SignatureMismatch("sum_out expects a distribution");
  if (!fl.lattice()->same_as(*lattice_))
    throw LatticeMismatch("flavor lattice differs from relation lattice");
  std::set<std::string> drop(names.begin(), names.end());
  for (const auto& n : names) {
    bool found = false;
    for (const auto& a : targets_) found = found || a.name == n;
    if (!found) throw UnknownAttribute("sum_out names an absent attribute: " + n);
  }
  std::vector<Attribute> kept;
  std::vector<size_t> kept_pos;
  for (size_t i = 0; i < targets_.size(); ++i)
    if (!drop.count(targets_[i].name)) { kept.push_back(targets_[i]); kept_pos.push_back(i); }
  Relation r({}, kept, lattice_);
  for (const auto& [k, w] : entries_) {
    Key nk;
    nk.reserve(kept_pos.size());
    for (size_t p : kept_pos) nk.push_back(k[p]);
    auto it = r.entries_.find(nk);
    if (it == r.entries_.end()) r.entries_[std::move(nk)] = w;
    else it->second = fl.plus(it->second, w);
  }
  // aggregation may have produced bot (it cannot for join/oplus, but keep
  // the bot-absent invariant independent of the flavor)
  for (auto it = r.entries_.begin(); it != r.entries_.end();)
    it = it->second == lattice_->bot() ? r.entries_.erase(it) : std::next(it);
  return r;
}

Relation Relation::rename(const std::map<std::string, std::string>& mapping) const {
  auto apply = [&](std::vector<Attribute> block) {
    for (auto& a : block) {
      auto it = mapping.find(a.name);
      if (it != mapping.end()) a.name = it->second;
    }
    return block;
  };
  Relation r(apply(sources_), apply(targets_), lattice_);
  r.entries_ = entries_;
  return r;
}

Relation Relation::reorder(const std::vector<std::string>& source_names,
                           const std::vector<std::string>& target_names) const {
  auto plan = [](const std::vector<Attribute>& block,
                 const std::vector<std::string>& order) {
    if (order.size() != block.size())
      throw SignatureMismatch("reorder names do not cover the block");
    std::vector<size_t> pos;
    std::vector<Attribute> attrs;
    for (const auto& n : order) {
      bool found = false;
      for (size_t i = 0; i < block.size(); ++i)
        if (block[i].name == n) { pos.push_back(i); attrs.push_back(block[i]); found = true; break; }
      if (!found) throw UnknownAttribute("reorder names an absent attribute: " + n);
    }
    return std::pair(pos, attrs);
  };
  auto [spos, sattrs] = plan(sources_, source_names);
  auto [tpos, tattrs] = plan(targets_, target_names);
  Relation r(sattrs, tattrs, lattice_);
  const size_t ns = sources_.size();
  for (const auto& [k, w] : entries_) {
    Key nk;
    nk.reserve(k.size());
    for (size_t p : spos) nk.push_back(k[p]);
    for (size_t p : tpos) nk.push_back(k[ns + p]);
    r.entries_[std::move(nk)] = w;
  }
  return r;
}

bool Relation::same_signature(const Relation& g) const {
  auto as_set = [](const std::vector<Attribute>& block) {
    std::map<std::string, const Attribute*> m;
    for (const auto& a : block) m[a.name] = &a;
    return m;
  };
  auto match = [&](const std::vector<Attribute>& a, const std::vector<Attribute>& b) {
    if (a.size() != b.size()) return false;
    auto bm = as_set(b);
    for (const auto& attr : a) {
      auto it = bm.find(attr.name);
      if (it == bm.end() || *it->second->domain != *attr.domain) return false;
    }
    return true;
  };
  return lattice_->same_as(*g.lattice_) && match(sources_, g.sources_) &&
         match(targets_, g.targets_);
}

std::optional<Key> Relation::leq_witness(const Relation& g, double tol) const {
  if (!same_signature(g))
    throw SignatureMismatch("pointwise comparison requires identical signatures");
  // align g's tuples to this relation's attribute order
  std::vector<std::string> sn, tn;
  for (const auto& a : sources_) sn.push_back(a.name);
  for (const auto& a : targets_) tn.push_back(a.name);
  Relation ga = g.reorder(sn, tn);
  for (const auto& [k, w] : entries_) {
    double gw = ga.at(k);
    if (!lattice_->leq(w, gw) && !(std::abs(w - gw) <= tol)) return k;
  }
  return std::nullopt;
}

bool Relation::leq(const Relation& g, double tol) const {
  return !leq_witness(g, tol).has_value();
}

bool Relation::equals(const Relation& g, double tol) const {
  if (!same_signature(g))
    throw SignatureMismatch("pointwise comparison requires identical signatures");
  std::vector<std::string> sn, tn;
  for (const auto& a : sources_) sn.push_back(a.name);
  for (const auto& a : targets_) tn.push_back(a.name);
  Relation ga = g.reorder(sn, tn);
  auto within = [&](const Relation& a, const Relation& b) {
    for (const auto& [k, w] : a.entries_) {
      double bw = b.entries_.count(k) ? b.entries_.at(k) : lattice_->bot();
      if (std::abs(w - bw) > tol) return false;
    }
    return true;
  };
  return within(*this, ga) && within(ga, *this);
}

// ---------------------------------------------------------------------------
// Composition

namespace {

struct KeyHash {
  size_t operator()(const Key& k) const {
    size_t h = 1469598103934665603ull;
    for (int v : k) {
      h ^= (size_t)(v + 1);
      h *= 1099511628211ull;
    }
    return h;
  }
};

} // namespace

Relation compose(const Relation& f, const Relation& g, const Flavor& fl) {
  if (!f.lattice()->same_as(*g.lattice()) || !fl.lattice()->same_as(*f.lattice()))
    throw LatticeMismatch("compose requires one common lattice");

  const auto& ft = f.targets();
  const auto& gs = g.sources();
  // shared interface: f's targets matched to g's sources by name
  std::vector<size_t> f_shared, g_shared;
  for (size_t i = 0; i < ft.size(); ++i) {
    for (size_t j = 0; j < gs.size(); ++j) {
      if (ft[i].name != gs[j].name) continue;
      if (*ft[i].domain != *gs[j].domain)
        throw DomainMismatch("shared attribute " + ft[i].name +
                             " has different domains in the two relations");
      f_shared.push_back(i);
      g_shared.push_back(j);
      break;
    }
  }
  auto in = [](const std::vector<size_t>& v, size_t x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };

  std::vector<Attribute> rsources = f.sources();
  std::vector<size_t> g_src_kept;
  for (size_t j = 0; j < gs.size(); ++j)
    if (!in(g_shared, j)) { rsources.push_back(gs[j]); g_src_kept.push_back(j); }
  std::vector<Attribute> rtargets = g.targets();
  std::vector<size_t> f_tgt_kept;
  for (size_t i = 0; i < ft.size(); ++i)
    if (!in(f_shared, i)) { rtargets.push_back(ft[i]); f_tgt_kept.push_back(i); }

  Relation r(rsources, rtargets, f.lattice()); // ctor rejects duplicate names per block

  // index g by its shared-source projection
  std::unordered_map<Key, std::vector<const std::pair<const Key, double>*>, KeyHash> gidx;
  const size_t gns = g.sources().size();
  for (const auto& e : g.entries()) {
    Key proj;
    proj.reserve(g_shared.size());
    for (size_t j : g_shared) proj.push_back(e.first[j]);
    gidx[std::move(proj)].push_back(&e);
  }

  const size_t fns = f.sources().size();
  const double bot = fl.zero();
  std::map<Key, double> acc;
  for (const auto& fe : f.entries()) {
    Key proj;
    proj.reserve(f_shared.size());
    for (size_t i : f_shared) proj.push_back(fe.first[fns + i]);
    auto hit = gidx.find(proj);
    if (hit == gidx.end()) continue;
    for (const auto* ge : hit->second) {
      double w = fl.times(fe.second, ge->second);
      Key k;
      k.reserve(r.arity());
      for (size_t i = 0; i < fns; ++i) k.push_back(fe.first[i]);
      for (size_t j : g_src_kept) k.push_back(ge->first[j]);
      for (size_t j = 0; j < g.targets().size(); ++j) k.push_back(ge->first[gns + j]);
      for (size_t i : f_tgt_kept) k.push_back(fe.first[fns + i]);
      auto it = acc.find(k);
      if (it == acc.end()) {
        if (w != bot) acc.emplace(std::move(k), w);
      } else {
        it->second = fl.plus(it->second, w);
      }
    }
  }
  for (auto it = acc.begin(); it != acc.end();)
    it = it->second == bot ? acc.erase(it) : std::next(it);
  for (auto& [k, w] : acc) r.set(k, w);
  return r;
}

Relation compose(const Relation& f, const Relation& g, const Relation& h,
                 const Flavor& fl) {
  return compose(compose(f, g, fl), h, fl);
}

void for_each_key(const std::vector<Attribute>& attrs,
                  const std::function<void(const Key&)>& fn) {
  for (const auto& a : attrs)
    if (a.domain->size() == 0) return;
  Key k(attrs.size(), 0);
  while (true) {
    fn(k);
    size_t i = attrs.size();
    while (i > 0) {
      --i;
      if (++k[i] < (int)attrs[i].domain->size()) break;
      k[i] = 0;
      if (i == 0) return;
    }
    if (attrs.empty()) return;
  }
}

} // namespace omegarel
