#include "omegarel/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace omegarel {

namespace {

std::string fmt_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

} // namespace

std::shared_ptr<const Lattice> Lattice::make(const std::string& kind) {
  auto lat = std::shared_ptr<Lattice>(new Lattice());
  lat->name_ = kind;
  if (kind == "lukasiewicz") lat->kind_ = Kind::lukasiewicz;
  else if (kind == "goedel") lat->kind_ = Kind::goedel;
  else if (kind == "product") lat->kind_ = Kind::product;
  else if (kind == "boolean") lat->kind_ = Kind::boolean_kind;
  else throw UnknownLatticeKind("unknown lattice kind: " + kind);
  return lat;
}

std::shared_ptr<const Lattice> Lattice::from_tables(FiniteTables tables) {
  auto lat = std::shared_ptr<Lattice>(new Lattice());
  lat->kind_ = Kind::finite;
  lat->name_ = tables.name.empty() ? "finite" : tables.name;
  lat->tables_ = std::move(tables);
  lat->validate_tables();
  return lat;
}

std::shared_ptr<const Lattice> Lattice::cartesian(std::shared_ptr<const Lattice> a,
                                                  std::shared_ptr<const Lattice> b) {
  auto lat = std::shared_ptr<Lattice>(new Lattice());
  lat->kind_ = Kind::cartesian;
  lat->name_ = a->name() + "*" + b->name();
  // Flatten so nested products stay a plain component list.
  auto push = [&](const std::shared_ptr<const Lattice>& l) {
    if (l->kind_ == Kind::cartesian)
      lat->parts_.insert(lat->parts_.end(), l->parts_.begin(), l->parts_.end());
    else
      lat->parts_.push_back(l);
  };
  push(a);
  push(b);
  lat->arity_ = static_cast<int>(lat->parts_.size());
  return lat;
}

bool Lattice::is_finite() const {
  switch (kind_) {
    case Kind::boolean_kind:
    case Kind::finite: return true;
    case Kind::cartesian:
      return std::all_of(parts_.begin(), parts_.end(),
                         [](const auto& p) { return p->is_finite(); });
    default: return false;
  }
}

const Lattice& Lattice::scalar() const {
  if (arity_ != 1)
    throw CarrierError("scalar lattice operation on a product lattice of arity " +
                       std::to_string(arity_) + "; use the vector interface");
  return *this;
}

double Lattice::conj(double x, double y) const {
  switch (scalar().kind_) {
    case Kind::lukasiewicz:
      // unit guards keep x (*) top == x exact; x+1.0-1.0 drops a bit
      if (x == 1.0) return y;
      if (y == 1.0) return x;
      return std::max(x + y - 1.0, 0.0);
    case Kind::goedel: return std::min(x, y);
    case Kind::product: return x * y;
    case Kind::boolean_kind: return std::min(x, y);
    case Kind::finite: return tables_.conj[(int)x][(int)y];
    default: return 0;
  }
}

double Lattice::implies(double x, double y) const {
  switch (scalar().kind_) {
    case Kind::lukasiewicz: return std::min(1.0, 1.0 - x + y);
    case Kind::goedel: return x <= y ? 1.0 : y;
    case Kind::product:
      if (x <= y) return 1.0;
      return x == 0.0 ? 1.0 : y / x;
    case Kind::boolean_kind: return x <= y ? 1.0 : 0.0;
    case Kind::finite: return tables_.implies[(int)x][(int)y];
    default: return 0;
  }
}

double Lattice::meet(double x, double y) const {
  if (scalar().kind_ == Kind::finite) return tables_.meet[(int)x][(int)y];
  return std::min(x, y);
}

double Lattice::join(double x, double y) const {
  if (scalar().kind_ == Kind::finite) return tables_.join[(int)x][(int)y];
  return std::max(x, y);
}

bool Lattice::has_strong_disj() const {
  switch (kind_) {
    case Kind::lukasiewicz:
    case Kind::boolean_kind: return true;
    case Kind::finite: return !tables_.strong_disj.empty();
    default: return false;
  }
}

double Lattice::strong_disj(double x, double y) const {
  switch (scalar().kind_) {
    case Kind::lukasiewicz:
      if (x == 0.0) return y;
      if (y == 0.0) return x;
      return std::min(x + y, 1.0);
    case Kind::boolean_kind: return std::max(x, y);
    case Kind::finite:
      if (tables_.strong_disj.empty()) break;
      return tables_.strong_disj[(int)x][(int)y];
    default: break;
  }
  throw UnknownOpName("strong disjunction (oplus) is not defined on lattice " + name_);
}

double Lattice::bot() const {
  return scalar().kind_ == Kind::finite ? tables_.bot : 0.0;
}

double Lattice::top() const {
  return scalar().kind_ == Kind::finite ? tables_.top : 1.0;
}

bool Lattice::leq(double x, double y) const {
  if (scalar().kind_ == Kind::finite) return tables_.meet[(int)x][(int)y] == (int)x;
  return x <= y;
}

bool Lattice::contains(double x) const {
  switch (scalar().kind_) {
    case Kind::boolean_kind: return x == 0.0 || x == 1.0;
    case Kind::finite: {
      double ip = 0;
      return std::modf(x, &ip) == 0.0 && x >= 0 && x < (double)tables_.elements.size();
    }
    default: return x >= 0.0 && x <= 1.0;
  }
}

std::string Lattice::format(double x) const {
  if (scalar().kind_ == Kind::finite) return tables_.elements.at((size_t)x);
  return fmt_double(x);
}

std::optional<double> Lattice::parse(const std::string& text) const {
  if (scalar().kind_ == Kind::finite) {
    for (size_t i = 0; i < tables_.elements.size(); ++i)
      if (tables_.elements[i] == text) return (double)i;
    return std::nullopt;
  }
  auto v = parse_double(text);
  if (!v || !contains(*v)) return std::nullopt;
  return v;
}

#define OMEGAREL_LIFT(op)                                                     \
  Lattice::Value Lattice::op(const Value& x, const Value& y) const {          \
    if ((int)x.size() != arity_ || (int)y.size() != arity_)                   \
      throw CarrierError("value arity does not match lattice arity");         \
    Value out(x.size());                                                      \
    if (kind_ != Kind::cartesian) { out[0] = op(x[0], y[0]); return out; }    \
    for (size_t i = 0; i < parts_.size(); ++i)                                \
      out[i] = parts_[i]->op(x[i], y[i]);                                     \
    return out;                                                               \
  }

OMEGAREL_LIFT(conj)
OMEGAREL_LIFT(implies)
OMEGAREL_LIFT(meet)
OMEGAREL_LIFT(join)
#undef OMEGAREL_LIFT

Lattice::Value Lattice::bot_value() const {
  if (kind_ != Kind::cartesian) return {bot()};
  Value out;
  for (const auto& p : parts_) out.push_back(p->bot());
  return out;
}

Lattice::Value Lattice::top_value() const {
  if (kind_ != Kind::cartesian) return {top()};
  Value out;
  for (const auto& p : parts_) out.push_back(p->top());
  return out;
}

bool Lattice::leq(const Value& x, const Value& y) const {
  if ((int)x.size() != arity_ || (int)y.size() != arity_)
    throw CarrierError("value arity does not match lattice arity");
  if (kind_ != Kind::cartesian) return leq(x[0], y[0]);
  for (size_t i = 0; i < parts_.size(); ++i)
    if (!parts_[i]->leq(x[i], y[i])) return false;
  return true;
}

bool Lattice::same_as(const Lattice& other) const {
  if (this == &other) return true;
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::finite:
      return tables_.elements == other.tables_.elements &&
             tables_.conj == other.tables_.conj &&
             tables_.implies == other.tables_.implies &&
             tables_.meet == other.tables_.meet &&
             tables_.join == other.tables_.join &&
             tables_.strong_disj == other.tables_.strong_disj;
    case Kind::cartesian: {
      if (parts_.size() != other.parts_.size()) return false;
      for (size_t i = 0; i < parts_.size(); ++i)
        if (!parts_[i]->same_as(*other.parts_[i])) return false;
      return true;
    }
    default: return true;
  }
}

std::vector<double> Lattice::sample() const {
  switch (scalar().kind_) {
    case Kind::boolean_kind: return {0.0, 1.0};
    case Kind::finite: {
      std::vector<double> s;
      for (size_t i = 0; i < tables_.elements.size(); ++i) s.push_back((double)i);
      return s;
    }
    default: {
      std::vector<double> s;
      for (int i = 0; i <= 20; ++i) s.push_back(i / 20.0);
      return s;
    }
  }
}

void Lattice::validate_tables() const {
  const auto& t = tables_;
  const int n = static_cast<int>(t.elements.size());
  auto fail = [&](const std::string& law, int x, int y, int z = -1) {
    std::ostringstream os;
    os << "finite lattice '" << name_ << "' violates " << law << " at ("
       << t.elements[x] << ", " << t.elements[y];
    if (z >= 0) os << ", " << t.elements[z];
    os << ")";
    throw LatticeValidationError(os.str());
  };
  if (n == 0) throw LatticeValidationError("finite lattice has no elements");
  if (t.bot < 0 || t.bot >= n || t.top < 0 || t.top >= n)
    throw LatticeValidationError("finite lattice bot/top out of range");
  auto square = [&](const std::vector<std::vector<int>>& m, const char* what) {
    if ((int)m.size() != n)
      throw LatticeValidationError(std::string("table ") + what + " has wrong size");
    for (const auto& row : m) {
      if ((int)row.size() != n)
        throw LatticeValidationError(std::string("table ") + what + " has wrong size");
      for (int v : row)
        if (v < 0 || v >= n)
          throw LatticeValidationError(std::string("table ") + what +
                                       " has an out-of-range entry");
    }
  };
  square(t.conj, "otimes");
  square(t.implies, "implies");
  square(t.meet, "meet");
  square(t.join, "join");
  if (!t.strong_disj.empty()) square(t.strong_disj, "oplus");

  auto leq_i = [&](int x, int y) { return t.meet[x][y] == x; };
  for (int x = 0; x < n; ++x) {
    if (t.meet[x][x] != x) fail("meet idempotency", x, x);
    if (t.join[x][x] != x) fail("join idempotency", x, x);
    if (!leq_i(t.bot, x)) fail("bot <= x", t.bot, x);
    if (!leq_i(x, t.top)) fail("x <= top", x, t.top);
    if (t.conj[t.top][x] != x) fail("top as otimes unit", t.top, x);
    for (int y = 0; y < n; ++y) {
      if (t.meet[x][y] != t.meet[y][x]) fail("meet commutativity", x, y);
      if (t.join[x][y] != t.join[y][x]) fail("join commutativity", x, y);
      if (t.conj[x][y] != t.conj[y][x]) fail("otimes commutativity", x, y);
      if (t.meet[x][t.join[x][y]] != x) fail("absorption", x, y);
      if (t.join[x][t.meet[x][y]] != x) fail("absorption", x, y);
      if (!t.strong_disj.empty() && t.strong_disj[x][y] != t.strong_disj[y][x])
        fail("oplus commutativity", x, y);
      for (int z = 0; z < n; ++z) {
        if (t.meet[x][t.meet[y][z]] != t.meet[t.meet[x][y]][z])
          fail("meet associativity", x, y, z);
        if (t.join[x][t.join[y][z]] != t.join[t.join[x][y]][z])
          fail("join associativity", x, y, z);
        if (t.conj[x][t.conj[y][z]] != t.conj[t.conj[x][y]][z])
          fail("otimes associativity", x, y, z);
        if (!t.strong_disj.empty() &&
            t.strong_disj[x][t.strong_disj[y][z]] != t.strong_disj[t.strong_disj[x][y]][z])
          fail("oplus associativity", x, y, z);
        // Residuation: z <= (x => y)  iff  x (x) z <= y.
        bool lhs = leq_i(z, t.implies[x][y]);
        bool rhs = leq_i(t.conj[x][z], y);
        if (lhs != rhs) fail("residuation adjunction", x, y, z);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Flavor

Flavor Flavor::make(LatticePtr lattice, const std::string& times,
                    const std::string& plus, bool require_distributive) {
  Times t;
  if (times == "otimes") t = Times::conj;
  else if (times == "meet") t = Times::meet;
  else throw UnknownOpName("unknown flavor times op: " + times +
                           " (expected otimes or meet)");
  Plus p;
  if (plus == "oplus") p = Plus::strong_disj;
  else if (plus == "join") p = Plus::join;
  else throw UnknownOpName("unknown flavor plus op: " + plus +
                           " (expected oplus or join)");
  return make(std::move(lattice), t, p, require_distributive);
}

Flavor Flavor::make(LatticePtr lattice, Times times, Plus plus,
                    bool require_distributive) {
  if (!lattice) throw CarrierError("flavor requires a lattice");
  if (lattice->arity() != 1)
    throw CarrierError("flavors are defined on scalar lattices only");
  if (plus == Plus::strong_disj && !lattice->has_strong_disj())
    throw UnknownOpName("strong disjunction (oplus) is not defined on lattice " +
                        lattice->name());

  Flavor f;
  f.lattice_ = std::move(lattice);
  f.times_ = times;
  f.plus_ = plus;

  const auto sample = f.lattice_->sample();
  auto close_enough = [&](double a, double b) {
    return f.lattice_->is_finite() ? a == b : std::abs(a - b) <= 1e-12;
  };

  // Monoid / semigroup / monotonicity laws must hold outright.
  for (double x : sample) {
    if (!close_enough(f.times(f.one(), x), x))
      throw FlavorValidationError("flavor times has no unit at top");
    for (double y : sample) {
      if (!close_enough(f.times(x, y), f.times(y, x)))
        throw FlavorValidationError("flavor times is not commutative");
      if (!close_enough(f.plus(x, y), f.plus(y, x)))
        throw FlavorValidationError("flavor plus is not commutative");
      for (double z : sample) {
        if (!close_enough(f.times(x, f.times(y, z)), f.times(f.times(x, y), z)))
          throw FlavorValidationError("flavor times is not associative");
        if (!close_enough(f.plus(x, f.plus(y, z)), f.plus(f.plus(x, y), z)))
          throw FlavorValidationError("flavor plus is not associative");
        if (f.lattice_->leq(y, z)) {
          if (!f.lattice_->leq(f.times(x, y), f.times(x, z) + 1e-15))
            throw FlavorValidationError("flavor times is not monotone");
          if (!f.lattice_->leq(f.plus(x, y), f.plus(x, z) + 1e-15))
            throw FlavorValidationError("flavor plus is not monotone");
        }
      }
    }
  }

  f.plus_idempotent_ = true;
  for (double x : sample)
    if (!close_enough(f.plus(x, x), x)) { f.plus_idempotent_ = false; break; }

  f.distributive_ = true;
  for (double x : sample) {
    for (double y : sample) {
      for (double z : sample) {
        double lhs = f.times(x, f.plus(y, z));
        double rhs = f.plus(f.times(x, y), f.times(x, z));
        if (!close_enough(lhs, rhs)) {
          f.distributive_ = false;
          f.witness_ = {x, y, z};
          goto done;
        }
      }
    }
  }
done:
  if (require_distributive && !f.distributive_) {
    const auto& w = *f.witness_;
    throw DistributivityViolation(
        "flavor (" + f.times_name() + ", " + f.plus_name() + ") on " +
        f.lattice_->name() + " is not distributive: witness x=" +
        f.lattice_->format(w[0]) + " y=" + f.lattice_->format(w[1]) +
        " z=" + f.lattice_->format(w[2]));
  }
  return f;
}

double Flavor::times(double x, double y) const {
  return times_ == Times::conj ? lattice_->conj(x, y) : lattice_->meet(x, y);
}

double Flavor::plus(double x, double y) const {
  return plus_ == Plus::strong_disj ? lattice_->strong_disj(x, y) : lattice_->join(x, y);
}

} // namespace omegarel
