#pragma once

#include <climits>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fluxfam/exponents.hpp"

namespace ff {

// Element of Q_p known to a finite relative precision: p^val * (unit mod p^rel).
// rel == 0 means "zero to absolute precision val"; an exact zero has val == kInf.
class PadicNumber {
 public:
  static constexpr int kInf = INT_MAX / 4;

  PadicNumber() = default;
  static PadicNumber exact_zero(long p);
  static PadicNumber zero_to(long p, int abs_prec);
  static PadicNumber from_q(long p, const Q& q, int rel_prec);
  static PadicNumber from_int(long p, long long n, int rel_prec) { return from_q(p, Q(static_cast<long>(n)), rel_prec); }
  // p^val * unit with the given relative precision.
  static PadicNumber make(long p, int val, std::uint64_t unit, int rel_prec);

  long prime() const { return p_; }
  int valuation() const { return val_; }
  std::uint64_t unit() const { return u_; }
  int rel_prec() const { return rel_; }
  int abs_prec() const { return exact_zero_ ? kInf : val_ + rel_; }
  bool is_exact_zero() const { return exact_zero_; }
  // Exact zero, or indistinguishable from zero at its own precision.
  bool is_zero() const { return exact_zero_ || rel_ == 0; }
  bool zero_mod(int abs) const { return is_zero() ? abs_prec() >= abs || exact_zero_ : val_ >= abs; }

  PadicNumber operator+(const PadicNumber& o) const;
  PadicNumber operator-(const PadicNumber& o) const;
  PadicNumber operator-() const;
  PadicNumber operator*(const PadicNumber& o) const;
  PadicNumber operator/(const PadicNumber& o) const;
  PadicNumber inv() const;
  PadicNumber cap(int abs) const;  // forget digits at or beyond p^abs

  // Residue mod p^k of an integral number known to absolute precision >= k.
  std::uint64_t residue(int k) const;
  bool equal_mod(const PadicNumber& o, int abs) const { return (*this - o).zero_mod(abs); }

  std::string str() const;
  json to_json() const;
  static PadicNumber from_json(long p, const json& j);

 private:
  long p_ = 0;
  int val_ = 0;
  std::uint64_t u_ = 0;
  int rel_ = 0;
  bool exact_zero_ = false;
};

enum class PadicOp { Add, Mul, Inv };
PadicNumber qp_ring(PadicOp kind, const PadicNumber& a, const PadicNumber* b = nullptr);

// Largest k with p^k < 2^62; the working precision bound for this prime.
int max_digits(long p);
std::uint64_t ppow(long p, int k);
// Integral number with the given residue mod p^abs.
PadicNumber from_residue(long p, std::uint64_t r, int abs);

// Truncated power series with integral coefficients over Z_p in one or two
// variables (total degree <= D), regarded over Q_p<t/p^n> for radius n.
class TateSeries {
 public:
  TateSeries() = default;
  TateSeries(long p, int nvars, int D, int prec, int radius = 0);
  static TateSeries constant(long p, int nvars, int D, int prec, const PadicNumber& c);

  long prime() const { return p_; }
  int nvars() const { return nv_; }
  int degree() const { return D_; }
  int prec() const { return prec_; }
  int radius() const { return n_; }
  int tail_val() const { return tail_; }
  void set_tail_val(int t) { tail_ = t; }

  std::size_t size() const { return c_.size(); }
  std::size_t idx(int i, int j = 0) const;
  std::uint64_t raw(int i, int j = 0) const { return c_[idx(i, j)]; }
  void set_raw(int i, int j, std::uint64_t r);
  PadicNumber coeff(int i, int j = 0) const;

  TateSeries operator+(const TateSeries& o) const;
  TateSeries operator-(const TateSeries& o) const;
  TateSeries operator-() const;
  TateSeries operator*(const TateSeries& o) const;
  TateSeries scale(const PadicNumber& c) const;
  bool is_zero() const;
  bool operator==(const TateSeries& o) const;

  PadicNumber eval(const PadicNumber& t0) const;
  PadicNumber eval(const PadicNumber& t1, const PadicNumber& t2) const;
  // Restriction t -> p^n s (coefficient rescaling c_i -> c_i p^{n i}).
  TateSeries restrict_radius(int n) const;
  // Two-variable series to one variable along t1 = t2 = t.
  TateSeries codiagonal() const;
  // One-variable series regarded as a series in t1 (var 0) or t2 (var 1).
  TateSeries project(int var) const;
  TateSeries with_prec(int prec) const;

  json to_json() const;

 private:
  void check_compatible(const TateSeries& o) const;
  long p_ = 0;
  int nv_ = 1, D_ = 0, prec_ = 0, n_ = 0, tail_ = PadicNumber::kInf;
  std::uint64_t mod_ = 1;
  std::vector<std::uint64_t> c_;
};

enum class TateOp { Add, Mul };
TateSeries tate_ops(TateOp kind, const TateSeries& f, const TateSeries& g);
PadicNumber tate_eval(const TateSeries& f, const PadicNumber& t0);

// Precision floor N' = N - floor((D-1)/(p-1)) of the binomial exponential.
int binom_prec(long p, int N, int D);
// Degree-D truncation of v^t = sum C(t,i)(v-1)^i, v = 1 mod p.
TateSeries binom_exp_series(const PadicNumber& v, int D, int nvars = 1, int var = 0);
// Canonical f-th power of v in 1 + pZ_p for f in Z_(p).
PadicNumber binom_exp_at(const PadicNumber& v, const Q& f);

// Largest index of a coefficient of maximal absolute value; nullopt = unbounded.
std::optional<int> strassman_bound(const TateSeries& F);

enum class EmbedMode { Monotone, Generic };

class Embedding {
 public:
  EmbedMode mode() const { return mode_; }
  long prime() const { return p_; }
  int precision() const { return N_; }
  std::uint64_t seed() const { return seed_; }
  const BasisPtr& basis() const { return b_; }
  const PadicNumber& image(std::size_t i) const { return img_.at(i); }

  PadicNumber embed_monomial(const Exponent& g) const;
  PadicNumber embed_novikov(const NovikovSeries& a) const;
  TateSeries family_weight(const Exponent& g, int D, int nvars = 1, int var = 0) const;

  json to_json() const;

 private:
  friend Embedding build_embedding(const BasisPtr&, EmbedMode, long, int, std::uint64_t);
  EmbedMode mode_ = EmbedMode::Monotone;
  long p_ = 0;
  int N_ = 0;
  std::uint64_t seed_ = 0;
  BasisPtr b_;
  std::vector<PadicNumber> img_;
};

Embedding build_embedding(const BasisPtr& basis, EmbedMode mode, long p, int N, std::uint64_t seed);
Embedding embedding_from_json(const BasisPtr& basis, const json& j);
PadicNumber embed_novikov(const Embedding& e, const NovikovSeries& a);
TateSeries embed_family_weight(const Embedding& e, const Exponent& g, int D, int nvars = 1, int var = 0);

}  // namespace ff
