#include "omegarel/omega_object.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace omegarel {

namespace {

// iterate the full product of the attribute domains
template <typename F>
void for_each_tuple(const std::vector<Attribute>& attrs, F&& fn) {
  std::vector<int> idx(attrs.size(), 0);
  for (;;) {
    fn(idx);
    size_t p = idx.size();
    bool done = idx.empty();
    while (p > 0) {
      --p;
      if (++idx[p] < (int)attrs[p].domain->size()) break;
      idx[p] = 0;
      if (p == 0) done = true;
    }
    if (done) return;
  }
}

std::vector<std::string> names_of(const std::vector<Attribute>& attrs) {
  std::vector<std::string> n;
  n.reserve(attrs.size());
  for (const auto& a : attrs) n.push_back(a.name);
  return n;
}

void require_carrier_match(const std::vector<Attribute>& block,
                           const std::vector<Attribute>& carrier,
                           const std::string& what) {
  if (block.size() != carrier.size())
    throw SignatureMismatch(what + " does not match the carrier");
  for (const auto& a : block) {
    bool found = false;
    for (const auto& c : carrier)
      if (same_attribute(a, c)) { found = true; break; }
    if (!found)
      throw SignatureMismatch(what + " does not match the carrier at attribute " +
                              a.name);
  }
}

} // namespace

// ---------------------------------------------------------------------------
// Similarity

Similarity Similarity::identity(std::vector<Attribute> carrier) {
  Similarity s;
  s.blocks_.push_back({carrier, std::nullopt});
  s.carrier_ = std::move(carrier);
  return s;
}

Similarity Similarity::from_relation(Relation endo) {
  const auto& src = endo.sources();
  const auto& tgt = endo.targets();
  if (src.size() != tgt.size())
    throw SignatureMismatch("a similarity must relate a carrier with itself");
  for (size_t i = 0; i < src.size(); ++i)
    if (!same_attribute(src[i], tgt[i]))
      throw SignatureMismatch("a similarity must relate a carrier with itself; "
                              "attribute " + src[i].name + " differs");
  Similarity s;
  s.carrier_ = src;
  s.blocks_.push_back({src, std::move(endo)});
  return s;
}

Similarity Similarity::product(std::vector<Similarity> parts) {
  Similarity s;
  std::set<std::string> seen;
  for (auto& p : parts) {
    for (const auto& a : p.carrier_) {
      if (!seen.insert(a.name).second)
        throw DuplicateAttribute("similarity product blocks overlap at " + a.name);
      s.carrier_.push_back(a);
    }
    for (auto& b : p.blocks_) s.blocks_.push_back(std::move(b));
  }
  return s;
}

bool Similarity::is_identity() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](const Block& b) { return !b.rel.has_value(); });
}

double Similarity::at(const Key& a, const Key& b, const Flavor& fl) const {
  if (a.size() != carrier_.size() || b.size() != carrier_.size())
    throw ArityMismatch("similarity lookup tuple does not match the carrier");
  double acc = fl.one();
  const double bot = fl.zero();
  size_t off = 0;
  for (const auto& block : blocks_) {
    const size_t n = block.attrs.size();
    double v;
    if (!block.rel) {
      v = fl.one();
      for (size_t i = 0; i < n; ++i)
        if (a[off + i] != b[off + i]) { v = bot; break; }
    } else {
      Key k;
      k.reserve(2 * n);
      for (size_t i = 0; i < n; ++i) k.push_back(a[off + i]);
      for (size_t i = 0; i < n; ++i) k.push_back(b[off + i]);
      v = block.rel->at(k);
    }
    acc = fl.times(acc, v);
    if (acc == bot) return bot;
    off += n;
  }
  return acc;
}

Relation Similarity::as_relation(const Flavor& fl) const {
  Relation r(carrier_, carrier_, fl.lattice());
  const size_t n = carrier_.size();
  for_each_tuple(carrier_, [&](const std::vector<int>& a) {
    for_each_tuple(carrier_, [&](const std::vector<int>& b) {
      double v = at(a, b, fl);
      if (v != fl.zero()) {
        Key k;
        k.reserve(2 * n);
        k.insert(k.end(), a.begin(), a.end());
        k.insert(k.end(), b.begin(), b.end());
        r.set(std::move(k), v);
      }
    });
  });
  return r;
}

// ---------------------------------------------------------------------------
// OmegaObject

OmegaObject::OmegaObject(std::vector<Attribute> carrier_, Relation dist_,
                         Similarity sim_)
    : carrier(std::move(carrier_)), dist(std::move(dist_)), sim(std::move(sim_)) {
  if (!dist.is_distribution())
    throw SignatureMismatch("an object's distribution must have no sources");
  require_carrier_match(dist.targets(), carrier, "distribution");
  require_carrier_match(sim.carrier(), carrier, "similarity");
}

OmegaObject OmegaObject::crisp(std::vector<Attribute> carrier, Relation dist) {
  auto sim = Similarity::identity(carrier);
  return OmegaObject(std::move(carrier), std::move(dist), std::move(sim));
}

// ---------------------------------------------------------------------------
// Diagnostics

SimilarityReport check_similarity(const Relation& alpha, const Flavor& fl,
                                  double eps) {
  Similarity::from_relation(alpha); // shape check: endo over one carrier
  SimilarityReport rep;
  const auto& carrier = alpha.sources();
  const double top = fl.one();

  rep.reflexive = true;
  for_each_tuple(carrier, [&](const std::vector<int>& a) {
    if (!rep.reflexive) return;
    Key k;
    k.insert(k.end(), a.begin(), a.end());
    k.insert(k.end(), a.begin(), a.end());
    if (std::abs(alpha.at(k) - top) > eps) {
      rep.reflexive = false;
      rep.reflexivity_witness = {Key(a.begin(), a.end()), Key(a.begin(), a.end())};
    }
  });

  rep.symmetric = true;
  const size_t n = carrier.size();
  for (const auto& [k, w] : alpha.entries()) {
    Key flipped(k.size());
    for (size_t i = 0; i < n; ++i) { flipped[i] = k[n + i]; flipped[n + i] = k[i]; }
    if (std::abs(w - alpha.at(flipped)) > eps) {
      rep.symmetric = false;
      rep.symmetry_witness = {Key(k.begin(), k.begin() + n), Key(k.begin() + n, k.end())};
      break;
    }
  }

  Relation twice = compose(alpha, alpha, fl);
  auto witness = twice.leq_witness(alpha, eps);
  rep.transitive = !witness.has_value();
  if (witness) {
    rep.transitivity_witness = {Key(witness->begin(), witness->begin() + n),
                                Key(witness->begin() + n, witness->end())};
  }
  rep.equivalence = rep.ok() && twice.equals(alpha, eps);
  return rep;
}

BimoduleReport check_bimodule(const Relation& f, const OmegaObject& from,
                              const OmegaObject& to, const Flavor& fl,
                              bool extensionality, double eps) {
  require_carrier_match(f.sources(), from.carrier, "relation source block");
  require_carrier_match(f.targets(), to.carrier, "relation target block");
  BimoduleReport rep;
  Relation alpha = from.sim.as_relation(fl);
  Relation beta = to.sim.as_relation(fl);

  auto record = [&](std::optional<Key> w) {
    if (w && !rep.witness) rep.witness = std::move(w);
    return !rep.witness || !w;
  };

  auto w1 = compose(from.dist, f, fl).leq_witness(to.dist, eps);
  rep.carries_dist = !w1.has_value();
  record(std::move(w1));
  auto w2 = compose(alpha, f, fl).leq_witness(f, eps);
  rep.absorbs_source_sim = !w2.has_value();
  record(std::move(w2));
  auto w3 = compose(f, beta, fl).leq_witness(f, eps);
  rep.absorbs_target_sim = !w3.has_value();
  record(std::move(w3));
  if (extensionality) {
    auto w4 = compose(from.dist, alpha, fl).leq_witness(from.dist, eps);
    rep.extensional = !w4.has_value();
    record(std::move(w4));
  }
  return rep;
}

MapReport classify_map(const Relation& f, const Flavor& fl, double eps) {
  MapReport rep;
  Relation rev = f.reverse();
  Relation along = compose(f, rev, fl);    // endo on the sources
  Relation across = compose(rev, f, fl);   // endo on the targets
  rep.entire = Relation::identity(f.sources(), f.lattice()).leq(along, eps);
  rep.simple = across.leq(Relation::identity(f.targets(), f.lattice()), eps);
  return rep;
}

RefinementReport check_refinement(const Relation& f, const OmegaObject& from,
                                  const OmegaObject& to, const Flavor& fl,
                                  double eps) {
  require_carrier_match(f.sources(), from.carrier, "relation source block");
  require_carrier_match(f.targets(), to.carrier, "relation target block");
  RefinementReport rep;
  Relation rev = f.reverse();

  Relation across = compose(rev, f, fl);
  Relation id_b = Relation::identity(to.carrier, f.lattice());
  rep.identity_on_target = across.equals(id_b, eps);
  if (!rep.identity_on_target) rep.witness = across.leq_witness(id_b, eps);

  Relation carried = compose(from.dist, f, fl);
  rep.carries_dist = carried.equals(to.dist, eps);
  if (!rep.carries_dist && !rep.witness) rep.witness = carried.leq_witness(to.dist, eps);

  Relation conjugated = compose(rev, from.sim.as_relation(fl), f, fl);
  Relation beta = to.sim.as_relation(fl);
  rep.transports_sim = conjugated.equals(beta, eps);
  if (!rep.transports_sim && !rep.witness) {
    auto w = conjugated.leq_witness(beta, eps);
    rep.witness = w ? w : beta.leq_witness(conjugated, eps);
  }
  return rep;
}

double lambda_similar(const Relation& x, const Relation& y,
                      const Similarity& alpha, const Flavor& fl) {
  if (!x.is_distribution() || !y.is_distribution())
    throw SignatureMismatch("lambda_similar compares distributions");
  require_carrier_match(x.targets(), alpha.carrier(), "first distribution");
  require_carrier_match(y.targets(), alpha.carrier(), "second distribution");
  auto order = names_of(alpha.carrier());
  Relation xa = x.reorder({}, order);
  Relation ya = y.reorder({}, order);
  double acc = fl.zero();
  for (const auto& [a, wx] : xa.entries())
    for (const auto& [b, wy] : ya.entries())
      acc = fl.plus(acc, fl.times(wy, fl.times(alpha.at(a, b, fl), wx)));
  return acc;
}

double lambda_similar_relations(const Relation& f, const Relation& g,
                                const Similarity& alpha_beta, const Flavor& fl) {
  if (!f.same_signature(g))
    throw SignatureMismatch("agreement degree requires parallel relations");
  return lambda_similar(f.tabulate(), g.tabulate(), alpha_beta, fl);
}

// ---------------------------------------------------------------------------
// Kernels

double kernel_value(const KernelSpec& k, const std::vector<double>& x,
                    const std::vector<double>& y) {
  if (x.size() != y.size())
    throw ArityMismatch("kernel points have different dimensions");
  double dot = 0, nx = 0, ny = 0, dist2 = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
    dist2 += (x[i] - y[i]) * (x[i] - y[i]);
  }
  switch (k.kind) {
    case KernelSpec::Kind::linear: return dot;
    case KernelSpec::Kind::normalized_linear: {
      if (nx == 0 || ny == 0)
        throw BadKernel("normalized linear kernel is undefined at the zero vector");
      return dot / std::sqrt(nx * ny);
    }
    case KernelSpec::Kind::polynomial: return std::pow(dot + k.l, k.p);
    case KernelSpec::Kind::gaussian_rbf: return std::exp(-k.l * dist2);
  }
  throw BadKernel("unknown kernel kind");
}

KernelSimilarityResult kernel_similarity(const Attribute& attr,
                                         const std::vector<std::vector<double>>& points,
                                         const KernelSpec& kernel, double base,
                                         LatticePtr lattice) {
  if (base <= 1.0) throw BadKernel("similarity base must exceed 1");
  if (points.size() != attr.domain->size())
    throw DomainMismatch("kernel points do not align with the attribute domain");
  Relation rel({attr}, {attr}, std::move(lattice));
  KernelSimilarityResult out{Similarity::identity({attr}), 0, 0.0};
  const int n = (int)points.size();
  std::vector<double> self(n);
  for (int i = 0; i < n; ++i) self[i] = kernel_value(kernel, points[i], points[i]);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double d2 = self[i] - 2 * kernel_value(kernel, points[i], points[j]) + self[j];
      if (d2 < 0) {
        out.clamped_pairs++;
        out.most_negative = std::min(out.most_negative, d2);
        d2 = 0;
      }
      double s = std::pow(base, -std::sqrt(d2));
      if (s > 0) rel.set({i, j}, s);
    }
  }
  out.sim = Similarity::from_relation(std::move(rel));
  return out;
}

KernelSimilarityResult kernel_similarity(const Attribute& attr, const KernelSpec& kernel,
                                         double base, LatticePtr lattice) {
  if (!attr.domain->numeric())
    throw DomainMismatch("kernel similarity on a non-numeric domain needs "
                         "explicit point vectors");
  std::vector<std::vector<double>> pts;
  for (size_t i = 0; i < attr.domain->size(); ++i)
    pts.push_back({attr.domain->value((int)i)});
  return kernel_similarity(attr, pts, kernel, base, std::move(lattice));
}

} // namespace omegarel
