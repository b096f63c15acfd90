#include "fluxfam/exponents.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace ff {

namespace {

Interval scale(const Interval& iv, const Q& c) {
  if (c >= 0) return {iv.lo * c, iv.hi * c};
  return {iv.hi * c, iv.lo * c};
}

Q parse_sqrt_arg(const std::string& refine) {
  if (refine.rfind("sqrt:", 0) != 0) throw DomainError("unknown refinement '" + refine + "'");
  return parse_q(refine.substr(5));
}

}  // namespace

BasisPtr ExponentBasis::make(std::vector<Symbol> symbols, std::vector<Relation> relations) {
  auto b = std::shared_ptr<ExponentBasis>(new ExponentBasis());
  std::set<std::string> names;
  for (const auto& s : symbols) {
    if (!names.insert(s.name).second) throw DomainError("duplicate symbol name '" + s.name + "'");
    if (s.radius < 0) throw DomainError("negative radius for '" + s.name + "'");
  }
  for (auto& s : symbols) {
    s.midpoint.canonicalize();
    s.radius.canonicalize();
  }
  b->syms_ = std::move(symbols);
  b->rels_ = std::move(relations);
  const std::size_t n = b->syms_.size();
  b->dep_.assign(n, -1);
  for (std::size_t r = 0; r < b->rels_.size(); ++r) {
    std::size_t i = b->index(b->rels_[r].symbol);
    if (b->dep_[i] >= 0) throw DomainError("symbol '" + b->rels_[r].symbol + "' declared dependent twice");
    if (b->rels_[r].rhs.size() != n) throw DomainError("relation length mismatch");
    b->dep_[i] = static_cast<int>(r);
  }
  for (const auto& rel : b->rels_)
    for (std::size_t j = 0; j < n; ++j)
      if (rel.rhs[j] != 0 && b->dep_[j] >= 0)
        throw DomainError("relation for '" + rel.symbol + "' refers to a dependent symbol");

  b->exact_.assign(n, false);
  b->encl_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    if (b->dep_[i] >= 0) continue;
    const Symbol& s = b->syms_[i];
    auto& lv = b->encl_[i];
    lv.resize(kMaxLevel + 1);
    b->exact_[i] = (s.radius == 0);
    if (s.refine.empty() || s.radius == 0) {
      for (auto& iv : lv) iv = {s.midpoint - s.radius, s.midpoint + s.radius};
      continue;
    }
    Q arg = parse_sqrt_arg(s.refine);
    Interval iv{s.midpoint - s.radius, s.midpoint + s.radius};
    if (arg < 0 || iv.hi < 0 || iv.hi * iv.hi < arg || (iv.lo > 0 && iv.lo * iv.lo > arg))
      throw DomainError("enclosure of '" + s.name + "' does not contain sqrt(" + q_str(arg) + ")");
    lv[0] = iv;
    for (int l = 1; l <= kMaxLevel; ++l) {
      Q m = (iv.lo + iv.hi) / 2;
      if (m * m <= arg) iv.lo = m; else iv.hi = m;
      lv[l] = iv;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (b->dep_[i] < 0) continue;
    const auto& rhs = b->rels_[b->dep_[i]].rhs;
    auto& lv = b->encl_[i];
    lv.resize(kMaxLevel + 1);
    bool ex = true;
    for (std::size_t j = 0; j < n; ++j)
      if (rhs[j] != 0 && !b->exact_[j]) ex = false;
    b->exact_[i] = ex;
    for (int l = 0; l <= kMaxLevel; ++l) {
      Interval acc{0, 0};
      for (std::size_t j = 0; j < n; ++j) {
        if (rhs[j] == 0) continue;
        Interval t = scale(b->encl_[j][l], rhs[j]);
        acc.lo += t.lo;
        acc.hi += t.hi;
      }
      lv[l] = acc;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (b->syms_[i].role == Role::Energy && b->encl_[i][0].lo + b->encl_[i][0].hi <= 0)
      throw DomainError("energy symbol '" + b->syms_[i].name + "' must be positive");
  return b;
}

std::size_t ExponentBasis::index(const std::string& name) const {
  for (std::size_t i = 0; i < syms_.size(); ++i)
    if (syms_[i].name == name) return i;
  throw DomainError("unknown symbol '" + name + "'");
}

bool ExponentBasis::has(const std::string& name) const {
  for (const auto& s : syms_)
    if (s.name == name) return true;
  return false;
}

QVec ExponentBasis::normalize(QVec c) const {
  if (c.size() != syms_.size()) throw DomainError("coordinate vector length mismatch");
  if (rels_.empty()) return c;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (dep_[i] < 0 || c[i] == 0) continue;
    Q k = c[i];
    c[i] = 0;
    const auto& rhs = rels_[dep_[i]].rhs;
    for (std::size_t j = 0; j < c.size(); ++j) c[j] += k * rhs[j];
  }
  return c;
}

const Interval& ExponentBasis::enclosure(std::size_t i, int level) const {
  return encl_.at(i).at(std::clamp(level, 0, kMaxLevel));
}

bool ExponentBasis::same(const ExponentBasis& o) const {
  if (this == &o) return true;
  if (syms_.size() != o.syms_.size() || rels_.size() != o.rels_.size()) return false;
  for (std::size_t i = 0; i < syms_.size(); ++i) {
    const auto &a = syms_[i], &b = o.syms_[i];
    if (a.name != b.name || a.role != b.role || a.midpoint != b.midpoint || a.radius != b.radius ||
        a.refine != b.refine)
      return false;
  }
  for (std::size_t i = 0; i < rels_.size(); ++i)
    if (rels_[i].symbol != o.rels_[i].symbol || rels_[i].rhs != o.rels_[i].rhs) return false;
  return true;
}

json ExponentBasis::to_json() const {
  json arr = json::array();
  for (const auto& s : syms_) {
    json e = {{"name", s.name},
              {"role", s.role == Role::Energy ? "energy" : "flux"},
              {"midpoint", q_str(s.midpoint)},
              {"radius", q_str(s.radius)}};
    if (!s.refine.empty()) e["refine"] = s.refine;
    arr.push_back(e);
  }
  if (rels_.empty()) return arr;
  json rels = json::array();
  for (const auto& r : rels_) {
    json rhs = json::array();
    for (const auto& q : r.rhs) rhs.push_back(q_str(q));
    rels.push_back({{"symbol", r.symbol}, {"rhs", rhs}});
  }
  return {{"symbols", arr}, {"relations", rels}};
}

BasisPtr ExponentBasis::from_json(const json& j) {
  const json& arr = j.is_array() ? j : j.at("symbols");
  std::vector<Symbol> syms;
  for (const auto& e : arr) {
    Symbol s;
    s.name = e.at("name").get<std::string>();
    std::string role = e.at("role").get<std::string>();
    if (role != "energy" && role != "flux") throw DomainError("role must be energy|flux");
    s.role = role == "energy" ? Role::Energy : Role::Flux;
    s.midpoint = parse_q(e.at("midpoint").get<std::string>());
    s.radius = parse_q(e.value("radius", std::string("0")));
    s.refine = e.value("refine", std::string());
    syms.push_back(s);
  }
  std::vector<Relation> rels;
  if (j.is_object() && j.contains("relations"))
    for (const auto& r : j.at("relations")) {
      Relation rel;
      rel.symbol = r.at("symbol").get<std::string>();
      for (const auto& q : r.at("rhs")) rel.rhs.push_back(parse_q(q.get<std::string>()));
      rels.push_back(rel);
    }
  return make(std::move(syms), std::move(rels));
}

bool same_basis(const BasisPtr& a, const BasisPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->same(*b);
}

// ---------------------------------------------------------------- Exponent

Exponent::Exponent(BasisPtr b) : b_(std::move(b)), c_(b_ ? b_->size() : 0, Q(0)) {}

Exponent::Exponent(BasisPtr b, QVec coords) : b_(std::move(b)) {
  if (!b_) throw DomainError("exponent without basis");
  c_ = b_->normalize(std::move(coords));
}

Exponent Exponent::of(BasisPtr b, const std::string& name, const Q& scale) {
  QVec c(b->size(), Q(0));
  c[b->index(name)] = scale;
  return Exponent(b, c);
}

namespace {
void require_same(const Exponent& a, const Exponent& b) {
  if (!same_basis(a.basis(), b.basis())) throw DomainError("exponent basis mismatch");
}
}  // namespace

Exponent Exponent::operator+(const Exponent& o) const {
  require_same(*this, o);
  Exponent r(*this);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
  return r;
}

Exponent Exponent::operator-(const Exponent& o) const {
  require_same(*this, o);
  Exponent r(*this);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
  return r;
}

Exponent Exponent::operator-() const {
  Exponent r(*this);
  for (auto& x : r.c_) x = -x;
  return r;
}

Exponent Exponent::operator*(const Q& s) const {
  Exponent r(*this);
  for (auto& x : r.c_) x *= s;
  return r;
}

bool Exponent::lex_less(const Exponent& o) const {
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] < o.c_[i]) return true;
    if (o.c_[i] < c_[i]) return false;
  }
  return false;
}

Interval Exponent::interval(int level) const {
  Interval acc{0, 0};
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    Interval t = scale(b_->enclosure(i, level), c_[i]);
    acc.lo += t.lo;
    acc.hi += t.hi;
  }
  return acc;
}

int Exponent::sign() const {
  if (is_zero()) return 0;
  bool exact = true;
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (c_[i] != 0 && !b_->exact(i)) exact = false;
  if (exact) {
    Q v = interval(0).lo;
    if (v == 0) throw PrecisionError("formally distinct exponents share the real value " + str());
    return v > 0 ? 1 : -1;
  }
  for (int level : {0, 2, 4, 8, 16, 32, ExponentBasis::kMaxLevel}) {
    Interval iv = interval(level);
    if (iv.lo > 0) return 1;
    if (iv.hi < 0) return -1;
  }
  throw PrecisionError("cannot separate exponent " + str() + " from zero after " +
                       std::to_string(ExponentBasis::kMaxLevel) + " radius halvings");
}

int compare(const Exponent& a, const Exponent& b) {
  if (a == b) return 0;
  return (a - b).sign();
}

bool Exponent::in_Gp(long p) const {
  for (const auto& x : c_)
    if (!p_integral(x, p)) return false;
  return true;
}

bool Exponent::has_role(Role r) const {
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (c_[i] != 0 && b_->symbol(i).role == r) return true;
  return false;
}

bool Exponent::nonneg_energy() const {
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (c_[i] < 0 && b_->symbol(i).role == Role::Energy) return false;
  return true;
}

std::string Exponent::str() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    if (!first) os << (c_[i] > 0 ? "+" : "");
    first = false;
    if (c_[i] == -1) os << "-";
    else if (c_[i] != 1) os << q_str(c_[i]) << "*";
    os << b_->symbol(i).name;
  }
  if (first) os << "0";
  return os.str();
}

json Exponent::to_json() const {
  json a = json::array();
  for (const auto& x : c_) a.push_back(q_str(x));
  return a;
}

Exponent Exponent::from_json(BasisPtr b, const json& j) {
  QVec c;
  for (const auto& x : j) c.push_back(x.is_string() ? parse_q(x.get<std::string>()) : Q(x.get<long>()));
  return Exponent(std::move(b), std::move(c));
}

// ----------------------------------------------------------- NovikovSeries

NovikovSeries::NovikovSeries(BasisPtr b, Exponent cutoff, bool polynomial)
    : b_(std::move(b)), cut_(std::move(cutoff)), poly_(polynomial) {
  if (!same_basis(b_, cut_.basis())) throw DomainError("cutoff basis mismatch");
}

NovikovSeries NovikovSeries::monomial(const Q& c, const Exponent& e, const Exponent& cutoff, bool polynomial) {
  NovikovSeries s(e.basis(), cutoff, polynomial);
  s.normalize({{c, e}}, false);
  return s;
}

NovikovSeries NovikovSeries::constant(const Q& c, const Exponent& cutoff) {
  return monomial(c, Exponent(cutoff.basis()), cutoff, true);
}

void NovikovSeries::normalize(std::vector<NovTerm> raw, bool demote) {
  std::sort(raw.begin(), raw.end(),
            [](const NovTerm& x, const NovTerm& y) { return compare(x.exp, y.exp) < 0; });
  std::vector<NovTerm> out;
  for (auto& t : raw) {
    if (!out.empty() && out.back().exp == t.exp) out.back().coef += t.coef;
    else out.push_back(std::move(t));
  }
  t_.clear();
  for (auto& t : out)
    if (t.coef != 0) t_.push_back(std::move(t));
  if (poly_ && demote && !t_.empty() && compare(t_.back().exp, cut_) >= 0) poly_ = false;
  if (!poly_)
    while (!t_.empty() && compare(t_.back().exp, cut_) >= 0) t_.pop_back();
}

void NovikovSeries::check_compatible(const NovikovSeries& o) const {
  if (!same_basis(b_, o.b_)) throw DomainError("Novikov series basis mismatch");
  if (cut_ != o.cut_) throw DomainError("Novikov series cutoff mismatch");
}

std::optional<Exponent> NovikovSeries::valuation() const {
  if (t_.empty()) return std::nullopt;
  return t_.front().exp;
}

NovikovSeries NovikovSeries::operator+(const NovikovSeries& o) const {
  check_compatible(o);
  NovikovSeries r(b_, cut_, poly_ && o.poly_);
  std::vector<NovTerm> raw(t_);
  raw.insert(raw.end(), o.t_.begin(), o.t_.end());
  r.normalize(std::move(raw), true);
  return r;
}

NovikovSeries NovikovSeries::operator-() const {
  NovikovSeries r(*this);
  for (auto& t : r.t_) t.coef = -t.coef;
  return r;
}

NovikovSeries NovikovSeries::operator-(const NovikovSeries& o) const { return *this + (-o); }

NovikovSeries NovikovSeries::operator*(const NovikovSeries& o) const {
  check_compatible(o);
  NovikovSeries r(b_, cut_, poly_ && o.poly_);
  std::vector<NovTerm> raw;
  raw.reserve(t_.size() * o.t_.size());
  for (const auto& x : t_)
    for (const auto& y : o.t_) raw.push_back({x.coef * y.coef, x.exp + y.exp});
  r.normalize(std::move(raw), true);
  return r;
}

NovikovSeries NovikovSeries::operator*(const Q& s) const {
  NovikovSeries r(*this);
  if (s == 0) {
    r.t_.clear();
    return r;
  }
  for (auto& t : r.t_) t.coef *= s;
  return r;
}

NovikovSeries NovikovSeries::shift(const Exponent& e) const {
  NovikovSeries r(b_, cut_, poly_);
  std::vector<NovTerm> raw(t_);
  for (auto& t : raw) t.exp = t.exp + e;
  r.normalize(std::move(raw), true);
  return r;
}

bool NovikovSeries::operator==(const NovikovSeries& o) const {
  if (t_.size() != o.t_.size()) return false;
  for (std::size_t i = 0; i < t_.size(); ++i)
    if (t_[i].coef != o.t_[i].coef || t_[i].exp != o.t_[i].exp) return false;
  return true;
}

std::string NovikovSeries::str() const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (i) os << " + ";
    os << q_str(t_[i].coef);
    if (!t_[i].exp.is_zero()) os << "*T^(" << t_[i].exp.str() << ")";
  }
  return os.str();
}

json NovikovSeries::to_json() const {
  json a = json::array();
  for (const auto& t : t_) a.push_back({q_str(t.coef), t.exp.to_json()});
  return a;
}

NovikovSeries NovikovSeries::from_json(BasisPtr b, const Exponent& cutoff, const json& j, bool polynomial) {
  NovikovSeries s(b, cutoff, polynomial);
  std::vector<NovTerm> raw;
  for (const auto& e : j) raw.push_back({parse_q(e.at(0).get<std::string>()), Exponent::from_json(b, e.at(1))});
  s.normalize(std::move(raw), false);
  return s;
}

NovikovSeries nov_ring(RingOp kind, const NovikovSeries& a, const NovikovSeries& b) {
  return kind == RingOp::Add ? a + b : a * b;
}

std::optional<Exponent> nov_val(const NovikovSeries& a) { return a.valuation(); }

// ------------------------------------------------------------ FamilySeries

FamilySeries::FamilySeries(BasisPtr b, Exponent cutoff, Q lo, Q hi)
    : b_(std::move(b)), cut_(std::move(cutoff)), lo_(std::move(lo)), hi_(std::move(hi)) {
  if (!(lo_ < 0 && 0 < hi_)) throw DomainError("family window must satisfy b < 0 < c");
}

FamilySeries FamilySeries::monomial(const NovikovSeries& a, const Exponent& r, Q lo, Q hi) {
  FamilySeries f(a.basis(), a.cutoff(), lo, hi);
  f.normalize({{a, r}});
  return f;
}

// Monomials of a family coefficient are kept whenever they fall below the cutoff
// somewhere on the window; the exponent at z = T^nu is linear in nu.
bool FamilySeries::relevant(const Exponent& e, const Exponent& r) const {
  return compare(e + r * lo_, cut_) < 0 || compare(e + r * hi_, cut_) < 0;
}

void FamilySeries::normalize(std::vector<FamTerm> raw) {
  std::sort(raw.begin(), raw.end(), [](const FamTerm& x, const FamTerm& y) { return x.r.lex_less(y.r); });
  t_.clear();
  for (std::size_t i = 0; i < raw.size();) {
    std::size_t j = i;
    std::vector<NovTerm> mono;
    bool poly = true;
    for (; j < raw.size() && raw[j].r == raw[i].r; ++j) {
      poly = poly && raw[j].a.polynomial();
      for (const auto& m : raw[j].a.terms())
        if (relevant(m.exp, raw[i].r)) mono.push_back(m);
    }
    NovikovSeries a(b_, cut_, poly);
    a.normalize(std::move(mono), false);
    if (!a.is_zero()) t_.push_back({std::move(a), raw[i].r});
    i = j;
  }
}

FamilySeries FamilySeries::operator+(const FamilySeries& o) const {
  if (!same_basis(b_, o.b_) || cut_ != o.cut_) throw DomainError("family series mismatch");
  FamilySeries r(b_, cut_, std::max(lo_, o.lo_), std::min(hi_, o.hi_));
  std::vector<FamTerm> raw(t_);
  raw.insert(raw.end(), o.t_.begin(), o.t_.end());
  r.normalize(std::move(raw));
  return r;
}

FamilySeries FamilySeries::operator-() const {
  FamilySeries r(*this);
  for (auto& t : r.t_) t.a = -t.a;
  return r;
}

FamilySeries FamilySeries::operator-(const FamilySeries& o) const { return *this + (-o); }

FamilySeries FamilySeries::operator*(const FamilySeries& o) const {
  if (!same_basis(b_, o.b_) || cut_ != o.cut_) throw DomainError("family series mismatch");
  FamilySeries r(b_, cut_, std::max(lo_, o.lo_), std::min(hi_, o.hi_));
  std::vector<FamTerm> raw;
  for (const auto& x : t_)
    for (const auto& y : o.t_) {
      std::vector<NovTerm> mono;
      for (const auto& m : x.a.terms())
        for (const auto& n : y.a.terms()) mono.push_back({m.coef * n.coef, m.exp + n.exp});
      NovikovSeries a(b_, cut_, x.a.polynomial() && y.a.polynomial());
      a.t_ = std::move(mono);
      raw.push_back({std::move(a), x.r + y.r});
    }
  r.normalize(std::move(raw));
  return r;
}

bool FamilySeries::operator==(const FamilySeries& o) const {
  if (t_.size() != o.t_.size()) return false;
  for (std::size_t i = 0; i < t_.size(); ++i)
    if (t_[i].r != o.t_[i].r || !(t_[i].a == o.t_[i].a)) return false;
  return true;
}

json FamilySeries::to_json() const {
  json a = json::array();
  for (const auto& t : t_) a.push_back({{"z", t.r.to_json()}, {"a", t.a.to_json()}});
  return {{"window", {q_str(lo_), q_str(hi_)}}, {"terms", a}};
}

NovikovSeries ev_at(const FamilySeries& f, const Q& a) {
  if (a < f.lo() || a > f.hi())
    throw DomainError("evaluation point " + q_str(a) + " outside window [" + q_str(f.lo()) + ", " +
                      q_str(f.hi()) + "]");
  NovikovSeries acc(f.basis(), f.cutoff(), true);
  for (const auto& t : f.terms()) acc = acc + t.a.shift(t.r * a);
  return acc;
}

namespace {

// Rational t with u = t*w as formal vectors, if one exists (w nonzero).
std::optional<Q> ratio(const Exponent& u, const Exponent& w) {
  std::optional<Q> t;
  for (std::size_t i = 0; i < w.coords().size(); ++i) {
    if (w[i] == 0) {
      if (u[i] != 0) return std::nullopt;
      continue;
    }
    Q k = u[i] / w[i];
    if (t && *t != k) return std::nullopt;
    t = k;
  }
  return t;
}

}  // namespace

Q window_nonvanishing(const FamilySeries& f) {
  NovikovSeries at1 = ev_at(f, 0);
  if (at1.is_zero()) {
    if (!at1.polynomial()) throw PrecisionError("f(1) vanishes modulo the cutoff; no delta certifiable");
    throw DomainError("window_nonvanishing requires f(1) != 0");
  }
  const Exponent v0 = *at1.valuation();
  // Split into the dominant part (coefficient exponent equal to val f(1)) and the rest.
  struct Mono {
    Exponent e, r;
  };
  std::vector<Mono> dom, rest;
  for (const auto& t : f.terms())
    for (const auto& m : t.a.terms()) (m.exp == v0 ? dom : rest).push_back({m.exp, t.r});
  Q delta = std::min(Q(-f.lo()), f.hi());
  for (const auto& d : dom)
    for (const auto& o : rest) {
      if (d.r == o.r) continue;
      auto t = ratio(o.e - v0, d.r - o.r);
      if (t && *t != 0) delta = std::min(delta, Q(abs(*t)));
    }
  // Dominant terms must stay below the cutoff for |t| < delta, since evaluation truncates there.
  Q gap = (f.cutoff() - v0).interval(ExponentBasis::kMaxLevel).lo;
  if (gap <= 0) throw PrecisionError("truncation too coarse to certify a nonvanishing window");
  for (const auto& d : dom) {
    Interval rv = d.r.interval(ExponentBasis::kMaxLevel);
    Q mag = std::max(Q(abs(rv.lo)), Q(abs(rv.hi)));
    if (mag > 0) delta = std::min(delta, Q(gap / mag));
  }
  return delta;
}

}  // namespace ff
