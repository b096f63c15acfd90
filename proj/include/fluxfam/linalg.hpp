#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fluxfam/exponents.hpp"
#include "fluxfam/padics.hpp"

namespace ff {

// Uniform zero test and printing for the coefficient rings in use.
inline bool rzero(const Q& x) { return x == 0; }
inline bool rzero(const NovikovSeries& x) { return x.is_zero(); }
inline bool rzero(const FamilySeries& x) { return x.is_zero(); }
inline bool rzero(const TateSeries& x) { return x.is_zero(); }
inline bool rzero(const PadicNumber& x) { return x.is_zero(); }
std::string rstr(const Q& x);
std::string rstr(const NovikovSeries& x);
std::string rstr(const FamilySeries& x);
std::string rstr(const TateSeries& x);
std::string rstr(const PadicNumber& x);

// Z/2-graded free complex; col[j] holds the nonzero entries of d(e_j).
template <class R>
struct FreeComplex {
  std::vector<int> degree;
  std::vector<std::string> label;
  std::vector<std::map<int, R>> col;

  std::size_t size() const { return degree.size(); }
  int add_basis(int deg, std::string name) {
    degree.push_back(((deg % 2) + 2) % 2);
    label.push_back(std::move(name));
    col.emplace_back();
    return static_cast<int>(degree.size()) - 1;
  }
  void add(int row, int c, const R& v) {
    if (degree[row] == degree[c]) throw DomainError("differential entry " + label[c] + " -> " + label[row] + " is even");
    auto& m = col[c];
    auto it = m.find(row);
    if (it == m.end())
      m.emplace(row, v);
    else
      it->second = it->second + v;
  }
  template <class S, class F>
  FreeComplex<S> map(F f) const {
    FreeComplex<S> out;
    out.degree = degree;
    out.label = label;
    out.col.resize(col.size());
    for (std::size_t j = 0; j < col.size(); ++j)
      for (const auto& [i, v] : col[j]) out.col[j].emplace(i, f(v));
    return out;
  }
  // Indices of basis elements of degree g.
  std::vector<int> of_degree(int g) const {
    std::vector<int> v;
    for (std::size_t i = 0; i < degree.size(); ++i)
      if (degree[i] == g) v.push_back(static_cast<int>(i));
    return v;
  }
  std::array<int, 2> dims() const {
    std::array<int, 2> d{0, 0};
    for (int g : degree) ++d[g];
    return d;
  }
};

// Residual entries of d∘d that are nonzero, as (row, col).
template <class R>
std::vector<std::pair<int, int>> d_squared_residue(const FreeComplex<R>& C) {
  std::vector<std::pair<int, int>> bad;
  for (std::size_t j = 0; j < C.size(); ++j) {
    std::map<int, R> acc;
    for (const auto& [k, a] : C.col[j])
      for (const auto& [i, b] : C.col[k]) {
        auto it = acc.find(i);
        if (it == acc.end())
          acc.emplace(i, b * a);
        else
          it->second = it->second + b * a;
      }
    for (const auto& [i, v] : acc)
      if (!rzero(v)) bad.emplace_back(i, static_cast<int>(j));
  }
  return bad;
}

// ---------------------------------------------------------------- elimination

struct Elimination {
  int rank = 0;
  std::vector<int> rows, cols;  // pivot positions of a maximal nonsingular minor
  int floor = PadicNumber::kInf;  // p-adic only: precision of rejected remainders
};

constexpr std::uint64_t kModPrime = 2305843009213693951ULL;  // 2^61 - 1

std::uint64_t mod_q(const Q& q, std::uint64_t P = kModPrime);
Elimination eliminate_mod(std::vector<std::vector<std::uint64_t>> M, std::uint64_t P = kModPrime);
Elimination eliminate_q(std::vector<QVec> M);
// Pivots on minimal valuation.
Elimination eliminate_padic(std::vector<std::vector<PadicNumber>> M);

// Rank-relevant evaluation of truncated Novikov entries: T^g -> prod y_i^{L g_i}
// at a seeded random point modulo a 61-bit prime.
class NovikovPoint {
 public:
  NovikovPoint(const BasisPtr& b, std::uint64_t L, std::uint64_t seed);
  std::uint64_t operator()(const NovikovSeries& s) const;
  static std::uint64_t common_denominator(const std::vector<const NovikovSeries*>& xs);

 private:
  std::uint64_t L_;
  std::vector<std::uint64_t> y_, yinv_;
};

// Cohomology ranks per degree.
using Ranks = std::array<int, 2>;

struct PadicCohomology {
  Ranks ranks{0, 0};
  int floor = PadicNumber::kInf;
};

Ranks cohomology_rank(const FreeComplex<Q>& C);
Ranks cohomology_rank(const FreeComplex<NovikovSeries>& C);
PadicCohomology cohomology_padic(const FreeComplex<PadicNumber>& C, int min_floor = 1);
Ranks cohomology_rank(const FreeComplex<PadicNumber>& C);
inline int total(const Ranks& r) { return r[0] + r[1]; }

// Rank of d restricted to each degree (columns of degree g).
std::array<int, 2> differential_ranks(const FreeComplex<Q>& C);
std::array<int, 2> differential_ranks(const FreeComplex<NovikovSeries>& C);
std::array<int, 2> differential_ranks(const FreeComplex<PadicNumber>& C);

// Rank of H(S) -> H(C) for the subcomplex S spanned by the basis elements
// flagged in `sub`.
template <class R>
Ranks persistent_rank(const FreeComplex<R>& C, const std::vector<bool>& sub) {
  FreeComplex<R> S, top;
  std::vector<int> pos(C.size(), -1);
  for (std::size_t i = 0; i < C.size(); ++i)
    if (sub[i]) pos[i] = S.add_basis(C.degree[i], C.label[i]);
  top.degree = C.degree;
  top.label = C.label;
  top.col.resize(C.size());
  for (std::size_t j = 0; j < C.size(); ++j)
    for (const auto& [i, v] : C.col[j]) {
      if (sub[j]) {
        if (!sub[i]) throw DomainError("basis subset is not a subcomplex");
        S.col[pos[j]].emplace(pos[i], v);
      }
      if (!sub[i]) top.col[j].emplace(i, v);
    }
  const auto ds = differential_ranks(S), dc = differential_ranks(C), dt = differential_ranks(top);
  const auto dims = S.dims();
  Ranks r{};
  for (int g = 0; g < 2; ++g) r[g] = dims[g] - ds[g] - dc[1 - g] + dt[1 - g];
  return r;
}

// Division-free determinant (Berkowitz).
template <class R>
R berkowitz_det(const std::vector<std::vector<R>>& A, const R& zero, const R& one) {
  const std::size_t n = A.size();
  std::vector<R> p{one};
  for (std::size_t k = 0; k < n; ++k) {
    // First column of the Toeplitz factor: 1, -a, -R S, -R M S, ...
    std::vector<R> c{one, zero - A[k][k]};
    std::vector<R> v(k, zero);  // v = M^j S
    for (std::size_t i = 0; i < k; ++i) v[i] = A[i][k];
    for (std::size_t j = 0; j < k; ++j) {
      R s = zero;
      for (std::size_t i = 0; i < k; ++i) s = s + A[k][i] * v[i];
      c.push_back(zero - s);
      std::vector<R> w(k, zero);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t l = 0; l < k; ++l) w[i] = w[i] + A[i][l] * v[l];
      v = std::move(w);
    }
    std::vector<R> q(k + 2, zero);
    for (std::size_t i = 0; i < k + 2; ++i)
      for (std::size_t l = 0; l <= i && l < p.size(); ++l) q[i] = q[i] + c[i - l] * p[l];
    p = std::move(q);
  }
  return n % 2 ? zero - p[n] : p[n];
}

// ------------------------------------------------------------ Tate families

struct TateGeneric {
  std::array<int, 2> drank{0, 0};  // generic rank of d on degree 0 and 1
  Ranks cohomology{0, 0};
  TateSeries minor;  // product of certifying minors, content removed
  std::optional<int> bound;  // Strassman bound of the minor
};

TateGeneric generic_rank_tate(const FreeComplex<TateSeries>& C, std::uint64_t seed = 1);

struct RankSample {
  std::string point;
  Ranks ranks{0, 0};
};

struct RankReport {
  TateGeneric generic;
  std::vector<RankSample> samples;
  std::vector<std::string> exceptional;
  json to_json() const;
};

RankReport exceptional_report(const FreeComplex<TateSeries>& C, const std::vector<Q>& samples);
// Removes the largest power of p dividing every coefficient.
TateSeries remove_content(const TateSeries& f);

struct WindowReport {
  Ranks at_one{0, 0};
  Q delta;
  std::vector<std::pair<Q, Ranks>> samples;  // only samples with |t| < delta
  bool pass = true;
  json to_json() const;
};

WindowReport rank_window_novikov(const FreeComplex<FamilySeries>& C, const std::vector<Q>& samples);

std::string ranks_table(const std::vector<std::pair<std::string, Ranks>>& rows);

}  // namespace ff
