#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <random>

#include "fluxfam/ainf.hpp"
#include "fluxfam/linalg.hpp"
#include "fluxfam/padics.hpp"
#include "fluxfam/exponents.hpp"

namespace fft {

using namespace ff;

// Small deterministic generator for property tests.
struct Gen {
  std::mt19937_64 eng;
  explicit Gen(std::uint64_t seed) : eng(seed) {}
  long range(long lo, long hi) { return lo + static_cast<long>(eng() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool coin() { return eng() & 1; }
  Q rational(long num_bound, long den_bound) {
    long d = range(1, den_bound);
    return qfrac(range(-num_bound, num_bound), d);
  }
};

inline Symbol exact_sym(const std::string& name, Role role, const Q& v) { return {name, role, v, Q(0), ""}; }

inline Symbol sqrt_sym(const std::string& name, Role role, long q) {
  // Coarse enclosure refined on demand.
  double s = std::sqrt(static_cast<double>(q));
  Q mid = qfrac(static_cast<long>(s * 1000), 1000);
  return {name, role, mid, Q(1, 100), "sqrt:" + std::to_string(q)};
}

// Basis {one (exact 1, energy)} used for purely rational exponents.
inline BasisPtr unit_basis() { return ExponentBasis::make({exact_sym("one", Role::Energy, 1)}); }

inline Exponent ex(const BasisPtr& b, std::initializer_list<Q> c) { return Exponent(b, QVec(c)); }

// Seeded upper-triangular categories on two or three objects. Energies are
// differences of a per-generator action, so every relation balances; a Koszul
// square x -> y, q -> q' makes mu^1 and mu^2 interact. Arcs come from random
// base classes.
inline CategoryPtr seeded_category(std::uint64_t seed) {
  Gen g(seed * 7919 + 17);
  std::vector<Symbol> syms{exact_sym("one", Role::Energy, 1)};
  const int variant = static_cast<int>(g.range(0, 2));
  if (variant == 1) syms.push_back(sqrt_sym("r2", Role::Energy, 2));
  if (variant == 2) syms.push_back(sqrt_sym("a", Role::Flux, 3));
  auto basis = ExponentBasis::make(syms);
  const std::size_t nb = basis->size();

  AinfCategory c;
  c.basis = basis;
  c.flux_rank = static_cast<std::size_t>(g.range(1, 2));
  for (std::size_t i = 0; i < c.flux_rank; ++i) {
    QVec v(nb, Q(0));
    v[0] = qfrac(g.range(1, 6), g.range(1, 3) == 3 ? 4 : g.range(1, 3));
    if (variant == 2) v[1] = qfrac(g.range(-2, 2), 2);
    c.flux_form.push_back(Exponent(basis, v));
  }
  QVec em(nb, Q(0));
  em[0] = 40;
  c.emax = Exponent(basis, em);

  const bool three = g.range(0, 3) != 0;
  c.objects = three ? std::vector<std::string>{"X0", "X1", "X2"} : std::vector<std::string>{"X0", "X1"};
  std::map<std::string, QVec> action;
  auto add = [&](const std::string& name, int s, int t, int deg, Q lo, Q hi) {
    Generator G;
    G.name = name;
    G.source = s;
    G.target = t;
    G.degree = ((deg % 2) + 2) % 2;
    G.base.assign(c.flux_rank, Q(0));
    for (auto& x : G.base) x = g.range(-2, 2);
    c.gens.push_back(G);
    QVec a(nb, Q(0));
    a[0] = lo + (hi - lo) * qfrac(g.range(0, 11), 12);
    if (variant == 1 && name != "y" && lo >= 1) a[1] = qfrac(g.range(0, 2), 2);
    action[name] = a;
    return static_cast<int>(c.gens.size()) - 1;
  };
  auto term = [&](std::vector<int> in, int out, Q coef) {
    DiscTerm t;
    t.inputs = std::move(in);
    t.output = out;
    t.coef = coef;
    QVec e(nb, Q(0));
    for (int i : t.inputs) e = qvec_add(e, action[c.gens[i].name]);
    e = qvec_sub(e, action[c.gens[out].name]);
    t.energy = Exponent(basis, e);
    t.arcs = coboundary_arcs(c, t.inputs, out);
    t.has_flux = true;
    c.terms.push_back(t);
    return c.terms.size() - 1;
  };
  auto coef = [&]() {
    static const long vals[] = {1, 2, 3, 4, 6};
    Q v = qfrac(vals[g.range(0, 4)], vals[g.range(0, 4)]);
    return g.coin() ? v : Q(-v);
  };

  const int dx = static_cast<int>(g.range(0, 1));
  // Koszul pair in hom(X0, X1): actions of x above y so mu^1 has positive energy.
  int x = add("x", 0, 1, dx, Q(3, 2), Q(2));
  int y = add("y", 0, 1, dx + 1, Q(1), Q(3, 2));
  const Q kappa = coef();
  term({x}, y, kappa);
  int a = -1;
  if (g.coin()) a = add("a", 0, 1, static_cast<int>(g.range(0, 1)), Q(1), Q(2));
  std::size_t square = 0;
  Q l1 = 0, l2 = 0;
  if (three) {
    int b = add("b", 1, 2, static_cast<int>(g.range(0, 1)), Q(1), Q(2));
    const int db = c.gens[b].degree;
    int q = add("q", 0, 2, dx + db, Q(1, 2), Q(1));
    int qp = add("qp", 0, 2, dx + db + 1, Q(0), Q(1, 2));
    l1 = coef();
    l2 = coef();
    term({x, b}, q, dx % 2 ? -l1 : l1);
    term({y, b}, qp, (dx + 1) % 2 ? -l2 : l2);
    square = term({q}, qp, l2 * kappa / l1);
    if (a >= 0) {
      int pab = add("p", 0, 2, c.gens[a].degree + db, Q(0), Q(1));
      const Q l3 = coef();
      term({a, b}, pab, c.gens[a].degree % 2 ? -l3 : l3);
    }
    if (g.coin()) add("b2", 1, 2, static_cast<int>(g.range(0, 1)), Q(1), Q(2));
  }
  c.finalize(true);
  if (three && !validate_ainf(c).pass) {
    c.terms[square].coef = -c.terms[square].coef;
    c.finalize(false);
  }
  return std::make_shared<AinfCategory>(std::move(c));
}

// Integer polynomial coefficients, lowest degree first.
using Poly = std::vector<long>;

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

inline Poly poly_add(Poly a, const Poly& b, long s = 1) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
  return a;
}

inline Q poly_at(const Poly& a, const Q& x) {
  Q v = 0;
  for (std::size_t i = a.size(); i-- > 0;) v = v * x + a[i];
  return v;
}

// A complex of polynomial matrices: d0 on X0 -> X1 and d1 on Y1 -> Y0 with
// planted integer roots on the diagonal, mixed by unimodular integer changes
// of basis within each degree. Entries have degree <= 4.
struct PolyComplex {
  int n0 = 0, n1 = 0;                   // dims of degree 0 and 1
  std::vector<std::vector<Poly>> d01;   // n1 x n0, degree 0 -> 1
  std::vector<std::vector<Poly>> d10;   // n0 x n1, degree 1 -> 0
  std::vector<long> roots;              // planted
};

inline std::vector<std::vector<long>> unimodular(Gen& g, int n) {
  std::vector<std::vector<long>> U(n, std::vector<long>(n, 0));
  for (int i = 0; i < n; ++i) U[i][i] = 1;
  for (int step = 0; step < 2 * n; ++step) {
    int i = static_cast<int>(g.range(0, n - 1)), j = static_cast<int>(g.range(0, n - 1));
    if (i == j) continue;
    long c = g.range(-1, 1);
    for (int k = 0; k < n; ++k) U[i][k] += c * U[j][k];
  }
  return U;
}

inline std::vector<std::vector<long>> unimodular_inverse(const std::vector<std::vector<long>>& U) {
  const int n = static_cast<int>(U.size());
  std::vector<std::vector<Q>> A(n, std::vector<Q>(2 * n, Q(0)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) A[i][j] = U[i][j];
    A[i][n + i] = 1;
  }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    while (A[piv][c] == 0) ++piv;
    std::swap(A[piv], A[c]);
    Q inv = 1 / A[c][c];
    for (auto& x : A[c]) x *= inv;
    for (int r = 0; r < n; ++r)
      if (r != c && A[r][c] != 0) {
        Q f = A[r][c];
        for (int k = 0; k < 2 * n; ++k) A[r][k] -= f * A[c][k];
      }
  }
  std::vector<std::vector<long>> V(n, std::vector<long>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) V[i][j] = A[i][n + j].get_num().get_si();
  return V;
}

inline PolyComplex seeded_poly_complex(std::uint64_t seed) {
  Gen g(seed * 104729 + 3);
  PolyComplex P;
  // Sizes of the four blocks; total size <= 6.
  const int x0 = static_cast<int>(g.range(1, 2)), x1 = static_cast<int>(g.range(1, 2));
  const int y0 = static_cast<int>(g.range(0, 1)), y1 = static_cast<int>(g.range(0, 1));
  P.n0 = x0 + y0;
  P.n1 = x1 + y1;
  P.d01.assign(P.n1, std::vector<Poly>(P.n0, Poly{0}));
  P.d10.assign(P.n0, std::vector<Poly>(P.n1, Poly{0}));
  auto diag_entry = [&]() {
    Poly f{g.coin() ? 1L : -1L};
    const int nroots = static_cast<int>(g.range(0, 4));
    for (int r = 0; r < nroots; ++r) {
      long root = g.range(-12, 12);
      P.roots.push_back(root);
      f = poly_mul(f, Poly{-root, 1});
    }
    if (nroots == 0 && g.coin()) f = Poly{static_cast<long>(g.range(1, 3)), 0, 1};  // no integer roots
    return f;
  };
  for (int i = 0; i < std::min(x0, x1); ++i) P.d01[i][i] = diag_entry();
  for (int i = 0; i < std::min(y0, y1); ++i) P.d10[x0 + i][x1 + i] = diag_entry();
  // Change of basis B_g in each degree: d01 -> B1 d01 B0^{-1}, d10 -> B0 d10 B1^{-1}.
  auto B0 = unimodular(g, P.n0), B1 = unimodular(g, P.n1);
  auto B0i = unimodular_inverse(B0), B1i = unimodular_inverse(B1);
  auto conj = [](const std::vector<std::vector<long>>& L, const std::vector<std::vector<Poly>>& M,
                 const std::vector<std::vector<long>>& R) {
    const std::size_t m = L.size(), n = R.size();
    std::vector<std::vector<Poly>> out(m, std::vector<Poly>(n, Poly{0}));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t a = 0; a < M.size(); ++a)
          for (std::size_t b = 0; b < M[a].size(); ++b)
            if (L[i][a] && R[b][j]) out[i][j] = poly_add(out[i][j], M[a][b], L[i][a] * R[b][j]);
    return out;
  };
  P.d01 = conj(B1, P.d01, B0i);
  P.d10 = conj(B0, P.d10, B1i);
  return P;
}

// Integer residue mod p^prec as a Tate coefficient.
inline TateSeries to_tate(const Poly& f, long p, int D, int prec) {
  TateSeries s(p, 1, D, prec);
  const mpz_class mod = mpz_class(ppow(p, prec));
  for (std::size_t i = 0; i < f.size(); ++i) {
    mpz_class r = mpz_class(f[i]) % mod;
    if (r < 0) r += mod;
    s.set_raw(static_cast<int>(i), 0, r.get_ui());
  }
  return s;
}

template <class R, class F>
FreeComplex<R> build_complex(const PolyComplex& P, F conv) {
  FreeComplex<R> C;
  for (int i = 0; i < P.n0; ++i) C.add_basis(0, "a" + std::to_string(i));
  for (int i = 0; i < P.n1; ++i) C.add_basis(1, "b" + std::to_string(i));
  for (int i = 0; i < P.n1; ++i)
    for (int j = 0; j < P.n0; ++j)
      if (P.d01[i][j] != Poly(P.d01[i][j].size(), 0)) C.add(P.n0 + i, j, conv(P.d01[i][j]));
  for (int i = 0; i < P.n0; ++i)
    for (int j = 0; j < P.n1; ++j)
      if (P.d10[i][j] != Poly(P.d10[i][j].size(), 0)) C.add(i, P.n0 + j, conv(P.d10[i][j]));
  return C;
}

// Dense rank over Q by plain Gauss-Jordan; independent of the library.
inline int q_rank(std::vector<std::vector<Q>> A) {
  int r = 0;
  const int m = static_cast<int>(A.size()), n = m ? static_cast<int>(A[0].size()) : 0;
  for (int c = 0; c < n && r < m; ++c) {
    int piv = -1;
    for (int i = r; i < m; ++i)
      if (A[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(A[piv], A[r]);
    for (int i = 0; i < m; ++i)
      if (i != r && A[i][c] != 0) {
        Q f = A[i][c] / A[r][c];
        for (int k = c; k < n; ++k) A[i][k] -= f * A[r][k];
      }
    ++r;
  }
  return r;
}

// Total cohomology dimension of the polynomial complex at t = x, over Q.
inline int poly_complex_rank_at(const PolyComplex& P, const Q& x) {
  std::vector<std::vector<Q>> a(P.n1, std::vector<Q>(P.n0)), b(P.n0, std::vector<Q>(P.n1));
  for (int i = 0; i < P.n1; ++i)
    for (int j = 0; j < P.n0; ++j) a[i][j] = poly_at(P.d01[i][j], x);
  for (int i = 0; i < P.n0; ++i)
    for (int j = 0; j < P.n1; ++j) b[i][j] = poly_at(P.d10[i][j], x);
  const int r0 = P.n0 && P.n1 ? q_rank(a) : 0, r1 = P.n0 && P.n1 ? q_rank(b) : 0;
  return P.n0 + P.n1 - 2 * r0 - 2 * r1;
}

// Family complexes over the Novikov family ring, acyclic at z = 1: two square
// blocks whose diagonal entries T^a z^r - T^b z^s have a != b.
inline FreeComplex<FamilySeries> seeded_family_complex(std::uint64_t seed, const Q& lo = -1, const Q& hi = 1) {
  Gen g(seed * 15485863 + 11);
  auto b = unit_basis();
  const Exponent cut = ex(b, {10});
  const int nx = static_cast<int>(g.range(1, 2)), ny = static_cast<int>(g.range(0, 2));
  const int n = nx + ny;
  auto mono = [&](const Q& c, const Q& a, const Q& r) {
    return FamilySeries::monomial(NovikovSeries::monomial(c, ex(b, {a}), cut), ex(b, {r}), lo, hi);
  };
  const FamilySeries zero(b, cut, lo, hi);
  auto entry = [&]() {
    Q a = qfrac(g.range(0, 8), 4), b2 = a;
    while (b2 == a) b2 = qfrac(g.range(0, 8), 4);
    return mono(1, a, qfrac(g.range(-4, 4), 2)) - mono(1, b2, qfrac(g.range(-4, 4), 2));
  };
  // Degree-0 basis: X0 (nx) then Y0 (ny); degree-1 basis: X1 (nx) then Y1 (ny).
  std::vector<std::vector<FamilySeries>> d01(n, std::vector<FamilySeries>(n, zero)), d10 = d01;
  for (int i = 0; i < nx; ++i) d01[i][i] = entry();
  for (int i = 0; i < ny; ++i) d10[nx + i][nx + i] = entry();
  auto B0 = unimodular(g, n), B1 = unimodular(g, n);
  auto B0i = unimodular_inverse(B0), B1i = unimodular_inverse(B1);
  auto conj = [&](const std::vector<std::vector<long>>& L, const std::vector<std::vector<FamilySeries>>& M,
                  const std::vector<std::vector<long>>& R) {
    std::vector<std::vector<FamilySeries>> out(n, std::vector<FamilySeries>(n, zero));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c)
            if (L[i][a] && R[c][j] && !M[a][c].is_zero()) {
              FamilySeries term = M[a][c];
              const long s = L[i][a] * R[c][j];
              for (long k = 0; k < std::abs(s); ++k) out[i][j] = s > 0 ? out[i][j] + term : out[i][j] - term;
            }
    return out;
  };
  d01 = conj(B1, d01, B0i);
  d10 = conj(B0, d10, B1i);
  FreeComplex<FamilySeries> C;
  for (int i = 0; i < n; ++i) C.add_basis(0, "a" + std::to_string(i));
  for (int i = 0; i < n; ++i) C.add_basis(1, "b" + std::to_string(i));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!d01[i][j].is_zero()) C.add(n + i, j, d01[i][j]);
      if (!d10[i][j].is_zero()) C.add(i, n + j, d10[i][j]);
    }
  return C;
}

}  // namespace fft
