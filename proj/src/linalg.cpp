#include "fluxfam/linalg.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

namespace ff {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulm(u64 a, u64 b, u64 P) { return static_cast<u64>(static_cast<u128>(a) * b % P); }

u64 powm(u64 a, u64 e, u64 P) {
  u64 r = 1;
  for (; e; e >>= 1, a = mulm(a, a, P))
    if (e & 1) r = mulm(r, a, P);
  return r;
}

u64 invm(u64 a, u64 P) { return powm(a, P - 2, P); }

u64 mod_z(const mpz_class& z, u64 P) {
  mpz_class r = z % mpz_class(std::to_string(P));
  if (r < 0) r += mpz_class(std::to_string(P));
  return std::stoull(r.get_str());
}

// Rows of degree 1-g, columns of degree g.
template <class R, class T, class F>
std::vector<std::vector<T>> block(const FreeComplex<R>& C, int g, const T& zero, F conv,
                                  std::vector<int>* rows_out = nullptr, std::vector<int>* cols_out = nullptr) {
  auto rows = C.of_degree(1 - g), cols = C.of_degree(g);
  std::vector<int> rpos(C.size(), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) rpos[rows[i]] = static_cast<int>(i);
  std::vector<std::vector<T>> M(rows.size(), std::vector<T>(cols.size(), zero));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (const auto& [i, v] : C.col[cols[j]]) M[rpos[i]][j] = conv(v);
  if (rows_out) *rows_out = rows;
  if (cols_out) *cols_out = cols;
  return M;
}

Ranks from_dranks(std::array<int, 2> dims, std::array<int, 2> dr) {
  return {dims[0] - dr[0] - dr[1], dims[1] - dr[1] - dr[0]};
}

}  // namespace

std::string rstr(const Q& x) { return q_str(x); }
std::string rstr(const NovikovSeries& x) { return x.str(); }
std::string rstr(const FamilySeries& x) { return x.to_json().dump(); }
std::string rstr(const TateSeries& x) { return x.to_json().dump(); }
std::string rstr(const PadicNumber& x) { return x.str(); }

u64 mod_q(const Q& q, u64 P) { return mulm(mod_z(q.get_num(), P), invm(mod_z(q.get_den(), P), P), P); }

Elimination eliminate_mod(std::vector<std::vector<u64>> M, u64 P) {
  Elimination e;
  const std::size_t n = M.size(), m = n ? M[0].size() : 0;
  std::vector<int> row_id(n);
  std::iota(row_id.begin(), row_id.end(), 0);
  std::size_t r = 0;
  for (std::size_t c = 0; c < m && r < n; ++c) {
    std::size_t piv = r;
    while (piv < n && M[piv][c] == 0) ++piv;
    if (piv == n) continue;
    std::swap(M[piv], M[r]);
    std::swap(row_id[piv], row_id[r]);
    u64 inv = invm(M[r][c], P);
    for (std::size_t i = r + 1; i < n; ++i) {
      if (!M[i][c]) continue;
      u64 f = mulm(M[i][c], inv, P);
      for (std::size_t j = c; j < m; ++j) M[i][j] = (M[i][j] + P - mulm(f, M[r][j], P)) % P;
    }
    e.rows.push_back(row_id[r]);
    e.cols.push_back(static_cast<int>(c));
    ++r;
  }
  e.rank = static_cast<int>(r);
  return e;
}

Elimination eliminate_q(std::vector<QVec> M) {
  Elimination e;
  const std::size_t n = M.size(), m = n ? M[0].size() : 0;
  std::vector<int> row_id(n);
  std::iota(row_id.begin(), row_id.end(), 0);
  std::size_t r = 0;
  for (std::size_t c = 0; c < m && r < n; ++c) {
    std::size_t piv = r;
    while (piv < n && M[piv][c] == 0) ++piv;
    if (piv == n) continue;
    std::swap(M[piv], M[r]);
    std::swap(row_id[piv], row_id[r]);
    for (std::size_t i = r + 1; i < n; ++i) {
      if (M[i][c] == 0) continue;
      Q f = M[i][c] / M[r][c];
      for (std::size_t j = c; j < m; ++j) M[i][j] -= f * M[r][j];
    }
    e.rows.push_back(row_id[r]);
    e.cols.push_back(static_cast<int>(c));
    ++r;
  }
  e.rank = static_cast<int>(r);
  return e;
}

Elimination eliminate_padic(std::vector<std::vector<PadicNumber>> M) {
  Elimination e;
  const std::size_t n = M.size(), m = n ? M[0].size() : 0;
  std::vector<bool> rdone(n, false), cdone(m, false);
  while (true) {
    int bi = -1, bj = -1, bv = PadicNumber::kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (rdone[i]) continue;
      for (std::size_t j = 0; j < m; ++j)
        if (!cdone[j] && !M[i][j].is_zero() && M[i][j].valuation() < bv) {
          bv = M[i][j].valuation();
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
        }
    }
    if (bi < 0) break;
    rdone[bi] = cdone[bj] = true;
    e.rows.push_back(bi);
    e.cols.push_back(bj);
    const PadicNumber inv = M[bi][bj].inv();
    for (std::size_t i = 0; i < n; ++i) {
      if (rdone[i] || M[i][bj].is_exact_zero()) continue;
      PadicNumber f = M[i][bj] * inv;
      for (std::size_t j = 0; j < m; ++j)
        if (!cdone[j] && !M[bi][j].is_exact_zero()) M[i][j] = M[i][j] - f * M[bi][j];
      M[i][bj] = PadicNumber::exact_zero(M[bi][bj].prime());
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!rdone[i])
      for (std::size_t j = 0; j < m; ++j)
        if (!cdone[j]) e.floor = std::min(e.floor, M[i][j].abs_prec());
  e.rank = static_cast<int>(e.rows.size());
  return e;
}

// ------------------------------------------------------------- Novikov ranks

NovikovPoint::NovikovPoint(const BasisPtr& b, u64 L, u64 seed) : L_(L) {
  std::mt19937_64 eng(seed);
  for (std::size_t i = 0; i < b->size(); ++i) {
    u64 y = 2 + eng() % (kModPrime - 3);
    y_.push_back(y);
    yinv_.push_back(invm(y, kModPrime));
  }
}

u64 NovikovPoint::operator()(const NovikovSeries& s) const {
  u64 acc = 0;
  for (const auto& t : s.terms()) {
    u64 v = mod_q(t.coef);
    for (std::size_t i = 0; i < y_.size(); ++i) {
      const Q& c = t.exp[i];
      if (c == 0) continue;
      mpz_class k = c.get_num() * static_cast<unsigned long>(L_) / c.get_den();
      bool neg = k < 0;
      if (neg) k = -k;
      v = mulm(v, powm(neg ? yinv_[i] : y_[i], mod_z(k, kModPrime - 1), kModPrime), kModPrime);
    }
    acc = (acc + v) % kModPrime;
  }
  return acc;
}

u64 NovikovPoint::common_denominator(const std::vector<const NovikovSeries*>& xs) {
  mpz_class L = 1;
  for (const auto* s : xs)
    for (const auto& t : s->terms())
      for (const auto& c : t.exp.coords()) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), c.get_den_mpz_t());
  if (!L.fits_ulong_p()) throw PrecisionError("exponent denominators too large for modular rank");
  return L.get_ui();
}

namespace {

// Rank of a Novikov matrix block; the maximum over two seeded points.
Elimination novikov_elim(const FreeComplex<NovikovSeries>& C, int g, std::vector<int>* rows = nullptr,
                         std::vector<int>* cols = nullptr) {
  std::vector<const NovikovSeries*> xs;
  BasisPtr b;
  for (const auto& c : C.col)
    for (const auto& [i, v] : c) {
      xs.push_back(&v);
      b = v.basis();
    }
  if (!b) {
    block(C, g, u64(0), [](const NovikovSeries&) { return u64(0); }, rows, cols);
    return {};
  }
  u64 L = NovikovPoint::common_denominator(xs);
  Elimination best;
  for (u64 seed : {1ULL, 2ULL}) {
    NovikovPoint pt(b, L, seed);
    auto e = eliminate_mod(block(C, g, u64(0), pt, rows, cols));
    if (e.rank > best.rank || seed == 1) best = e;
  }
  return best;
}

}  // namespace

std::array<int, 2> differential_ranks(const FreeComplex<Q>& C) {
  std::array<int, 2> dr{};
  for (int g = 0; g < 2; ++g) {
    auto M = block(C, g, Q(0), [](const Q& q) { return q; });
    dr[g] = eliminate_q(std::vector<QVec>(M.begin(), M.end())).rank;
  }
  return dr;
}

std::array<int, 2> differential_ranks(const FreeComplex<NovikovSeries>& C) {
  return {novikov_elim(C, 0).rank, novikov_elim(C, 1).rank};
}

std::array<int, 2> differential_ranks(const FreeComplex<PadicNumber>& C) {
  long p = 0;
  for (const auto& c : C.col)
    for (const auto& [i, v] : c) p = v.prime();
  std::array<int, 2> dr{};
  if (!p) return dr;
  for (int g = 0; g < 2; ++g) {
    auto e = eliminate_padic(block(C, g, PadicNumber::exact_zero(p), [](const PadicNumber& x) { return x; }));
    if (e.floor < 1)
      throw PrecisionError("rank not certifiable: remaining entries known only modulo p^" + std::to_string(e.floor));
    dr[g] = e.rank;
  }
  return dr;
}

Ranks cohomology_rank(const FreeComplex<Q>& C) {
  std::array<int, 2> dr{};
  for (int g = 0; g < 2; ++g) {
    auto M = block(C, g, Q(0), [](const Q& q) { return q; });
    dr[g] = eliminate_q(std::vector<QVec>(M.begin(), M.end())).rank;
  }
  return from_dranks(C.dims(), dr);
}

Ranks cohomology_rank(const FreeComplex<NovikovSeries>& C) {
  std::array<int, 2> dr{};
  for (int g = 0; g < 2; ++g) dr[g] = novikov_elim(C, g).rank;
  return from_dranks(C.dims(), dr);
}

PadicCohomology cohomology_padic(const FreeComplex<PadicNumber>& C, int min_floor) {
  long p = 0;
  for (const auto& c : C.col)
    for (const auto& [i, v] : c) p = v.prime();
  PadicCohomology out;
  std::array<int, 2> dr{};
  for (int g = 0; g < 2; ++g) {
    if (!p) continue;
    auto e = eliminate_padic(block(C, g, PadicNumber::exact_zero(p), [](const PadicNumber& x) { return x; }));
    dr[g] = e.rank;
    out.floor = std::min(out.floor, e.floor);
  }
  if (out.floor < min_floor)
    throw PrecisionError("rank not certifiable: remaining entries known only modulo p^" + std::to_string(out.floor));
  out.ranks = from_dranks(C.dims(), dr);
  return out;
}

Ranks cohomology_rank(const FreeComplex<PadicNumber>& C) { return cohomology_padic(C).ranks; }

// ---------------------------------------------------------------- Tate ranks

TateSeries remove_content(const TateSeries& f) {
  int v = PadicNumber::kInf;
  const int nv = f.nvars(), D = f.degree();
  auto each = [&](auto fn) {
    for (int d = 0; d <= D; ++d)
      if (nv == 1)
        fn(d, 0);
      else
        for (int j = 0; j <= d; ++j) fn(d - j, j);
  };
  each([&](int i, int j) {
    auto c = f.coeff(i, j);
    if (!c.is_zero()) v = std::min(v, c.valuation());
  });
  if (v == PadicNumber::kInf || v == 0) return f;
  TateSeries r = f.with_prec(f.prec() - v);
  const u64 pv = ppow(f.prime(), v);
  each([&](int i, int j) { r.set_raw(i, j, f.raw(i, j) / pv); });
  if (f.tail_val() < PadicNumber::kInf) r.set_tail_val(f.tail_val() - v);
  return r;
}

namespace {

PadicNumber tate_at(const TateSeries& s, const PadicNumber& t) { return s.eval(t); }

}  // namespace

TateGeneric generic_rank_tate(const FreeComplex<TateSeries>& C, u64 seed) {
  const TateSeries* any = nullptr;
  for (const auto& c : C.col)
    for (const auto& [i, v] : c) any = &v;
  TateGeneric out;
  auto dims = C.dims();
  if (!any) {
    out.cohomology = {dims[0], dims[1]};
    out.bound = 0;
    return out;
  }
  const long p = any->prime();
  const int nv = any->nvars();
  const TateSeries zero(p, nv, any->degree(), any->prec(), any->radius());
  const TateSeries one =
      TateSeries::constant(p, nv, any->degree(), any->prec(), PadicNumber::from_int(p, 1, any->prec())).restrict_radius(any->radius());
  std::mt19937_64 eng(seed);
  TateSeries minor = one;
  for (int g = 0; g < 2; ++g) {
    std::vector<int> rows, cols;
    auto M = block(C, g, zero, [](const TateSeries& x) { return x; }, &rows, &cols);
    Elimination best;
    for (int trial = 0; trial < 3; ++trial) {
      // Random points of the disc p^radius Z_p.
      const Q scale = Q(mpz_class(ppow(p, any->radius())));
      PadicNumber t1 = PadicNumber::from_q(p, scale * static_cast<long>(eng() % 1000003), any->prec());
      PadicNumber t2 = PadicNumber::from_q(p, scale * static_cast<long>(eng() % 1000003), any->prec());
      std::vector<std::vector<PadicNumber>> E(M.size(), std::vector<PadicNumber>(cols.size(), PadicNumber::exact_zero(p)));
      for (std::size_t i = 0; i < M.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
          if (!M[i][j].is_zero()) E[i][j] = nv == 1 ? tate_at(M[i][j], t1) : M[i][j].eval(t1, t2);
      auto e = eliminate_padic(E);
      if (trial == 0 || e.rank > best.rank) best = e;
    }
    out.drank[g] = best.rank;
    if (!best.rank) continue;
    std::vector<std::vector<TateSeries>> S(best.rank, std::vector<TateSeries>(best.rank, zero));
    for (int a = 0; a < best.rank; ++a)
      for (int b = 0; b < best.rank; ++b) S[a][b] = M[best.rows[a]][best.cols[b]];
    minor = minor * berkowitz_det(S, zero, one);
  }
  if (minor.is_zero()) throw PrecisionError("all candidate minors vanish at working precision");
  out.minor = remove_content(minor);
  out.cohomology = {dims[0] - out.drank[0] - out.drank[1], dims[1] - out.drank[0] - out.drank[1]};
  if (nv == 1) out.bound = strassman_bound(out.minor);
  return out;
}

json RankReport::to_json() const {
  json s = json::array();
  for (const auto& x : samples) s.push_back({{"point", x.point}, {"ranks", x.ranks}});
  return {{"generic_rank", generic.drank},
          {"generic_cohomology", generic.cohomology},
          {"strassman_bound", generic.bound ? json(*generic.bound) : json(nullptr)},
          {"critical_minor", generic.minor.size() ? generic.minor.to_json() : json(nullptr)},
          {"samples", s},
          {"exceptional", exceptional}};
}

RankReport exceptional_report(const FreeComplex<TateSeries>& C, const std::vector<Q>& samples) {
  RankReport rep;
  rep.generic = generic_rank_tate(C);
  long p = 0;
  int prec = 0;
  for (const auto& c : C.col)
    for (const auto& [i, v] : c) {
      p = v.prime();
      prec = v.prec();
    }
  for (const auto& k : samples) {
    RankSample s;
    s.point = q_str(k);
    if (!p) {
      auto d = C.dims();
      s.ranks = {d[0], d[1]};
    } else {
      if (!p_integral(k, p)) throw DomainError("sample " + q_str(k) + " outside the disc");
      PadicNumber t = PadicNumber::from_q(p, k, prec);
      s.ranks = cohomology_padic(C.map<PadicNumber>([&](const TateSeries& x) { return x.eval(t); })).ranks;
    }
    if (total(s.ranks) > total(rep.generic.cohomology)) rep.exceptional.push_back(s.point);
    rep.samples.push_back(s);
  }
  return rep;
}

// ------------------------------------------------------- Novikov windows

json WindowReport::to_json() const {
  json s = json::array();
  for (const auto& [t, r] : samples) s.push_back({{"t", q_str(t)}, {"ranks", r}});
  return {{"at_one", at_one}, {"delta", q_str(delta)}, {"samples", s}, {"pass", pass}};
}

WindowReport rank_window_novikov(const FreeComplex<FamilySeries>& C, const std::vector<Q>& samples) {
  WindowReport rep;
  const FamilySeries* any = nullptr;
  for (const auto& c : C.col)
    for (const auto& [i, v] : c) any = &v;
  if (!any) {
    auto d = C.dims();
    rep.at_one = {d[0], d[1]};
    rep.delta = 1;
    for (const auto& t : samples)
      if (abs(t) < rep.delta) rep.samples.emplace_back(t, rep.at_one);
    return rep;
  }
  rep.delta = std::min(Q(-any->lo()), Q(any->hi()));
  auto at = [&](const Q& t) { return C.map<NovikovSeries>([&](const FamilySeries& x) { return ev_at(x, t); }); };
  auto C1 = at(0);
  rep.at_one = cohomology_rank(C1);
  const FamilySeries zero(any->basis(), any->cutoff(), any->lo(), any->hi());
  const FamilySeries one = FamilySeries::monomial(NovikovSeries::constant(1, any->cutoff()), Exponent(any->basis()),
                                                  any->lo(), any->hi());
  for (int g = 0; g < 2; ++g) {
    std::vector<int> rows, cols;
    auto e = novikov_elim(C1, g, &rows, &cols);
    if (!e.rank) continue;
    auto M = block(C, g, zero, [](const FamilySeries& x) { return x; });
    std::vector<std::vector<FamilySeries>> S(e.rank, std::vector<FamilySeries>(e.rank, zero));
    for (int a = 0; a < e.rank; ++a)
      for (int b = 0; b < e.rank; ++b) S[a][b] = M[e.rows[a]][e.cols[b]];
    FamilySeries det = berkowitz_det(S, zero, one);
    try {
      rep.delta = std::min(rep.delta, window_nonvanishing(det));
    } catch (const DomainError& err) {
      throw PrecisionError(std::string("no certifiable window: ") + err.what());
    }
  }
  for (const auto& t : samples) {
    if (!(abs(t) < rep.delta)) continue;
    Ranks r = cohomology_rank(at(t));
    rep.samples.emplace_back(t, r);
    if (total(r) > total(rep.at_one)) rep.pass = false;
  }
  return rep;
}

std::string ranks_table(const std::vector<std::pair<std::string, Ranks>>& rows) {
  std::size_t w = 5;
  for (const auto& [k, r] : rows) w = std::max(w, k.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(w)) << "point" << "  H0  H1  total\n";
  for (const auto& [k, r] : rows)
    os << std::left << std::setw(static_cast<int>(w)) << k << "  " << std::setw(2) << r[0] << "  " << std::setw(2)
       << r[1] << "  " << total(r) << "\n";
  return os.str();
}

}  // namespace ff
