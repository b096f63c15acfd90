#include "fluxfam/torus.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace ff {

// --------------------------------------------------------------- bigon

namespace {

Exponent exp_field(const BasisPtr& b, const json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("bigon config: missing ") + key);
  return Exponent::from_json(b, j.at(key));
}

QVec qvec_json(const json& j) {
  QVec v;
  for (const auto& x : j) v.push_back(x.is_string() ? parse_q(x.get<std::string>()) : Q(x.get<long>()));
  return v;
}

json qvec_to_json(const QVec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(q_str(x));
  return a;
}

bool integral(const QVec& v) {
  return std::all_of(v.begin(), v.end(), [](const Q& x) { return x.get_den() == 1; });
}

// Rational q with x = q * a when x is proportional to the nonzero a.
std::optional<Q> ratio(const Exponent& x, const Exponent& a) {
  std::optional<Q> q;
  for (std::size_t i = 0; i < a.coords().size(); ++i) {
    if (a[i] == 0) {
      if (x[i] != 0) return std::nullopt;
      continue;
    }
    Q r = x[i] / a[i];
    if (q && *q != r) return std::nullopt;
    q = r;
  }
  return q;
}

}  // namespace

Exponent BigonConfig::alpha_of(const QVec& c) const {
  Exponent s(basis);
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0) s = s + alpha.at(i) * c[i];
  return s;
}

void BigonConfig::check() const {
  if (!basis) throw DomainError("bigon config: no basis");
  if (c1.size() != alpha.size() || c2.size() != alpha.size())
    throw DomainError("bigon config: flux classes must have one entry per flux form row");
  if (!integral(c1) || !integral(c2)) throw DomainError("bigon config: flux classes must be integral");
  if (a1.sign() <= 0 || a2.sign() <= 0) throw DomainError("bigon config: strip areas must be positive");
  if (a1 + a2 != area) throw DomainError("bigon config: strip areas must add up to the total area");
}

BigonConfig BigonConfig::from_json(const json& j) {
  BigonConfig c;
  c.basis = ExponentBasis::from_json(j.at("basis"));
  c.a1 = exp_field(c.basis, j, "a1");
  c.a2 = exp_field(c.basis, j, "a2");
  c.area = j.contains("area") ? exp_field(c.basis, j, "area") : c.a1 + c.a2;
  c.c1 = qvec_json(j.at("c1"));
  c.c2 = qvec_json(j.at("c2"));
  for (const auto& r : j.at("alpha")) c.alpha.push_back(Exponent::from_json(c.basis, r));
  if (j.contains("step")) c.step = j["step"].is_string() ? parse_q(j["step"].get<std::string>()) : Q(j["step"].get<long>());
  c.emax = j.contains("emax") ? exp_field(c.basis, j, "emax") : c.area * 8;
  c.check();
  return c;
}

json BigonConfig::to_json() const {
  json al = json::array();
  for (const auto& a : alpha) al.push_back(a.to_json());
  return {{"basis", basis->to_json()}, {"a1", a1.to_json()},         {"a2", a2.to_json()},
          {"area", area.to_json()},    {"c1", qvec_to_json(c1)},     {"c2", qvec_to_json(c2)},
          {"alpha", al},               {"step", q_str(step)},        {"emax", emax.to_json()}};
}

// Morse model: L and L' each carry a minimum e and maximum m; L -> L' has the
// two corners x (even) and y (odd). The Morse differential e -> m picks up the
// flux difference of the strips, and mu^2(m, x), mu^2(x, m') move the second
// strip's contribution across the circle.
CategoryPtr bigon_pair(const BigonConfig& cfg) {
  cfg.check();
  AinfCategory c;
  c.basis = cfg.basis;
  c.objects = {"L", "Lp"};
  c.flux_rank = cfg.alpha.size();
  c.flux_form = cfg.alpha;
  c.emax = cfg.emax;
  const QVec zero(c.flux_rank, Q(0));
  const QVec dc = qvec_sub(cfg.c2, cfg.c1);
  auto gen = [&](const std::string& n, int s, int t, int d, bool unit, bool morse, QVec base) {
    Generator g;
    g.name = n;
    g.source = s;
    g.target = t;
    g.degree = d;
    g.unit = unit;
    g.morse = morse;
    g.base = std::move(base);
    c.gens.push_back(g);
    return static_cast<int>(c.gens.size()) - 1;
  };
  const int eL = gen("e_L", 0, 0, 0, true, false, zero);
  const int m = gen("m", 0, 0, 1, false, true, zero);
  const int eP = gen("e_Lp", 1, 1, 0, true, false, zero);
  const int mp = gen("mp", 1, 1, 1, false, true, zero);
  const int x = gen("x", 0, 1, 0, false, false, zero);
  const int y = gen("y", 0, 1, 1, false, false, cfg.c1);
  auto term = [&](std::vector<int> in, int out, int coef, const Exponent& e, std::vector<QVec> arcs, bool morse) {
    DiscTerm t;
    t.inputs = std::move(in);
    t.output = out;
    t.coef = coef;
    t.energy = e;
    t.arcs = std::move(arcs);
    t.morse = morse;
    t.has_flux = true;
    c.terms.push_back(std::move(t));
  };
  const Exponent z(cfg.basis);
  term({x}, y, 1, cfg.a1, {qvec_scale(cfg.c1, -1), cfg.c1}, false);
  term({x}, y, -1, cfg.a2, {qvec_scale(cfg.c2, -1), cfg.c2}, false);
  if (!is_zero(dc)) {
    for (int e : {eL, eP}) {
      const int out = e == eL ? m : mp;
      term({e}, out, 1, z, {qvec_scale(dc, -1), dc}, true);
      term({e}, out, -1, z, {zero, zero}, true);
    }
    // Gauge: these carry only the base-path classes.
    c.finalize(false);
    term({m, x}, y, 1, cfg.a2, coboundary_arcs(c, {m, x}, y), false);
    term({x, mp}, y, -1, cfg.a2, coboundary_arcs(c, {x, mp}, y), false);
  }
  c.finalize(true);
  return std::make_shared<const AinfCategory>(std::move(c));
}

bool in_window(const BigonConfig& cfg, const Q& f) {
  for (const auto* s : {&cfg.c1, &cfg.c2}) {
    const Exponent a = (s == &cfg.c1 ? cfg.a1 : cfg.a2) + cfg.alpha_of(*s) * f;
    if (a.sign() <= 0 || compare(a, cfg.area) >= 0) return false;
  }
  return true;
}

int geometric_rank_oracle(const BigonConfig& cfg, long k) {
  const Exponent gap = (cfg.a1 - cfg.a2) + cfg.alpha_of(qvec_sub(cfg.c1, cfg.c2)) * (cfg.step * k);
  if (gap.is_zero()) return 2;
  auto q = ratio(gap, cfg.area);
  return q && q->get_den() == 1 ? 2 : 0;
}

std::optional<long> flow_period(const BigonConfig& cfg) {
  const Exponent drift = cfg.alpha_of(qvec_sub(cfg.c1, cfg.c2)) * cfg.step;
  if (drift.is_zero()) return 1;
  auto q = ratio(drift, cfg.area);
  if (!q) return std::nullopt;
  return q->get_den().get_si();
}

BigonConfig bigon_basic_config() {
  BigonConfig c;
  c.basis = ExponentBasis::make({{"one", Role::Energy, 1, 0, ""}});
  c.a1 = Exponent(c.basis, {Q(1, 4)});
  c.a2 = Exponent(c.basis, {Q(3, 4)});
  c.area = Exponent(c.basis, {1});
  c.c1 = {0};
  c.c2 = {-1};
  c.alpha = {Exponent(c.basis, {1})};
  c.emax = Exponent(c.basis, {8});
  return c;
}

BigonConfig bigon_period3_config() {
  BigonConfig c;
  c.basis = ExponentBasis::make({{"one", Role::Energy, 1, 0, ""}});
  c.a1 = Exponent(c.basis, {Q(1, 2)});
  c.a2 = Exponent(c.basis, {Q(1, 2)});
  c.area = Exponent(c.basis, {1});
  c.c1 = {1};
  c.c2 = {0};
  c.alpha = {Exponent(c.basis, {1})};
  c.step = Q(1, 3);
  c.emax = Exponent(c.basis, {8});
  return c;
}

BigonConfig bigon_irrational_config() {
  BigonConfig c;
  c.basis = ExponentBasis::make({{"E", Role::Energy, 1, 0, ""}, {"theta", Role::Flux, qfrac(1414, 1000), Q(1, 100), "sqrt:2"}});
  c.a1 = Exponent(c.basis, {1, 0});
  c.a2 = Exponent(c.basis, {1, 0});
  c.area = Exponent(c.basis, {2, 0});
  c.c1 = {1};
  c.c2 = {0};
  c.alpha = {Exponent(c.basis, {0, 1})};
  c.emax = Exponent(c.basis, {16, 0});
  return c;
}

// ------------------------------------------------------- lines on the torus

namespace {

Q frac_part(const Q& q) { return q - Q(floor_q(q)); }

void check_slopes(const LineConfig& cfg) {
  if (cfg.slopes.size() < 2) throw DomainError("need at least two slopes");
  for (const auto& s : cfg.slopes) {
    if (s.q < 0 || (s.q == 0 && s.p != 1)) throw DomainError("slope must be written (p:q) with q >= 0, vertical as (1:0)");
    if (std::gcd(s.p, s.q) != 1) throw DomainError("slope (p:q) must be primitive");
  }
  for (std::size_t i = 0; i + 1 < cfg.slopes.size(); ++i) {
    const auto& a = cfg.slopes[i];
    const auto& b = cfg.slopes[i + 1];
    // a.p/a.q < b.p/b.q with q = 0 meaning +infinity.
    const bool inc = a.q == 0 ? false : b.q == 0 ? true : a.p * b.q < b.p * a.q;
    if (!inc)
      throw DomainError("slopes must be strictly increasing: (" + std::to_string(a.p) + ":" + std::to_string(a.q) +
                        ") is not below (" + std::to_string(b.p) + ":" + std::to_string(b.q) + ")");
  }
}

// Value of the defining form p X - q Y of line i.
Q form(const Slope& s, const Point2& x) { return Q(s.p) * x.x - Q(s.q) * x.y; }

// Intersection of p_i X - q_i Y = u and p_j X - q_j Y = v.
Point2 meet(const Slope& a, const Slope& b, const Q& u, const Q& v) {
  const Q det = Q(-a.p * b.q + a.q * b.p);
  return {(-Q(b.q) * u + Q(a.q) * v) / det, (-Q(b.p) * u + Q(a.p) * v) / det};
}

Q cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

Point2 reduce(const Point2& x) { return {frac_part(x.x), frac_part(x.y)}; }

}  // namespace

std::vector<Q> line_offsets(const LineConfig& cfg) {
  if (!cfg.offsets.empty()) {
    if (cfg.offsets.size() != cfg.slopes.size()) throw DomainError("one offset per slope required");
    return cfg.offsets;
  }
  static const long primes[] = {7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
  std::vector<Q> b;
  for (std::size_t i = 0; i < cfg.slopes.size(); ++i) b.push_back(qfrac(static_cast<long>(i + 1), primes[i % 10] * (1 + i / 10)));
  return b;
}

std::vector<Point2> line_intersections(const LineConfig& cfg, std::size_t i, std::size_t j) {
  const auto b = line_offsets(cfg);
  const Slope& a = cfg.slopes.at(i);
  const Slope& c = cfg.slopes.at(j);
  const long det = std::labs(a.q * c.p - a.p * c.q);
  std::vector<Point2> pts;
  auto seen = [&](const Point2& x) {
    return std::any_of(pts.begin(), pts.end(), [&](const Point2& y) { return y.x == x.x && y.y == x.y; });
  };
  for (long m = 0; m < det; ++m)
    for (long n = 0; n < det; ++n) {
      Point2 x = reduce(meet(a, c, b[i] + m, b[j] + n));
      if (!seen(x)) pts.push_back(x);
    }
  std::sort(pts.begin(), pts.end(), [](const Point2& u, const Point2& v) { return u.x != v.x ? u.x < v.x : u.y < v.y; });
  return pts;
}

CategoryPtr torus_lines(const LineConfig& cfg) {
  check_slopes(cfg);
  const auto off = line_offsets(cfg);
  const std::size_t n = cfg.slopes.size();
  AinfCategory c;
  c.basis = ExponentBasis::make({{"one", Role::Energy, 1, 0, ""}});
  for (const auto& s : cfg.slopes) c.objects.push_back("L(" + std::to_string(s.p) + ":" + std::to_string(s.q) + ")");
  c.flux_rank = 2;
  for (const auto& a : cfg.alpha) c.flux_form.push_back(Exponent(c.basis, {a}));
  if (c.flux_form.size() != 2) throw DomainError("line flux form needs two entries");
  c.emax = Exponent(c.basis, {cfg.emax});

  std::vector<std::vector<std::vector<Point2>>> pts(n, std::vector<std::vector<Point2>>(n));
  std::vector<std::vector<std::vector<int>>> ids(n, std::vector<std::vector<int>>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      pts[i][j] = line_intersections(cfg, i, j);
      for (std::size_t t = 0; t < pts[i][j].size(); ++t) {
        const auto& x = pts[i][j][t];
        for (std::size_t k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          if (frac_part(form(cfg.slopes[k], x) - off[k]) == 0)
            throw DomainError("offsets are not generic: three lines meet at a point");
        }
        Generator g;
        g.name = "x" + std::to_string(i) + std::to_string(j) + "_" + std::to_string(t);
        g.source = static_cast<int>(i);
        g.target = static_cast<int>(j);
        c.gens.push_back(g);
        ids[i][j].push_back(static_cast<int>(c.gens.size()) - 1);
      }
    }

  auto find = [&](std::size_t i, std::size_t j, const Point2& x) {
    const auto& v = pts[i][j];
    for (std::size_t t = 0; t < v.size(); ++t)
      if (v[t].x == x.x && v[t].y == x.y) return ids[i][j][t];
    throw DomainError("triangle vertex is not an intersection point");
  };

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const Slope &si = cfg.slopes[i], &sj = cfg.slopes[j], &sk = cfg.slopes[k];
        for (std::size_t t = 0; t < pts[i][j].size(); ++t) {
          const Point2& x = pts[i][j][t];
          const Q ui = form(si, x), uj = form(sj, x);
          // Lifts of L_k are p_k X - q_k Y = off_k + n; the area grows
          // quadratically in the distance of n from the level through x.
          const Q n0 = form(sk, x) - off[k];
          const mpz_class centre = floor_q(n0);
          for (int dir : {0, 1}) {
            for (mpz_class step = 0;; ++step) {
              const mpz_class lv = dir == 0 ? mpz_class(centre - step) : mpz_class(centre + 1 + step);
              const Q level = off[k] + Q(lv);
              const Point2 yl = meet(sj, sk, uj, level);
              const Point2 zl = meet(si, sk, ui, level);
              const Q cr = cross(x, yl, zl);
              Q area = cr / 2;
              if (area < 0) area = -area;
              if (area >= cfg.emax) break;
              if (cr >= 0) continue;  // wrong orientation
              const Point2 yr = reduce(yl), zr = reduce(zl);
              DiscTerm d;
              d.inputs = {ids[i][j][t], find(j, k, yr)};
              d.output = find(i, k, zr);
              d.coef = 1;
              d.energy = Exponent(c.basis, {area});
              // Lattice boundary classes are not compatible with strict units
              // under a marked point, so the line category carries no flux.
              d.arcs.assign(3, c.zero_flux());
              d.has_flux = true;
              c.terms.push_back(std::move(d));
            }
          }
        }
      }
  c.finalize(true);
  return std::make_shared<const AinfCategory>(std::move(c));
}

}  // namespace ff
