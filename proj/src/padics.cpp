#include "fluxfam/padics.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "fluxfam/monoid.hpp"

namespace ff {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>((static_cast<u128>(a) * b) % m); }

u64 invmod(u64 a, u64 m) {
  // Extended Euclid on signed 128-bit values.
  __int128 t = 0, nt = 1, r = m, nr = a % m;
  while (nr != 0) {
    __int128 q = r / nr;
    std::tie(t, nt) = std::make_pair(nt, t - q * nt);
    std::tie(r, nr) = std::make_pair(nr, r - q * nr);
  }
  if (r != 1) throw DomainError("non-invertible residue");
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

void check_prime(long p) {
  if (!is_prime(p)) throw DomainError("p = " + std::to_string(p) + " is not prime");
  if (p == 2) throw DomainError("p = 2 is not supported; an odd prime is required");
}

}  // namespace

int max_digits(long p) {
  int k = 0;
  u128 x = 1;
  while (x * static_cast<u128>(p) < (static_cast<u128>(1) << 62)) {
    x *= p;
    ++k;
  }
  return k;
}

u64 ppow(long p, int k) {
  if (k < 0) throw DomainError("negative exponent in ppow");
  if (k > max_digits(p)) throw PrecisionError("p^" + std::to_string(k) + " exceeds the word-size working precision");
  u64 x = 1;
  for (int i = 0; i < k; ++i) x *= static_cast<u64>(p);
  return x;
}

// ------------------------------------------------------------ PadicNumber

PadicNumber PadicNumber::exact_zero(long p) {
  PadicNumber z;
  z.p_ = p;
  z.val_ = kInf;
  z.exact_zero_ = true;
  return z;
}

PadicNumber PadicNumber::zero_to(long p, int abs_prec) {
  if (abs_prec >= kInf) return exact_zero(p);
  PadicNumber z;
  z.p_ = p;
  z.val_ = abs_prec;
  z.rel_ = 0;
  return z;
}

PadicNumber PadicNumber::make(long p, int val, u64 unit, int rel_prec) {
  if (rel_prec <= 0) return zero_to(p, val);
  PadicNumber x;
  x.p_ = p;
  x.val_ = val;
  x.rel_ = rel_prec;
  x.u_ = unit % ppow(p, rel_prec);
  if (x.u_ % static_cast<u64>(p) == 0) throw DomainError("mantissa is not a unit");
  return x;
}

PadicNumber PadicNumber::from_q(long p, const Q& q, int rel_prec) {
  if (q == 0) return exact_zero(p);
  mpz_class num = q.get_num(), den = q.get_den();
  int v = 0;
  while (mpz_divisible_ui_p(num.get_mpz_t(), p)) {
    num /= p;
    ++v;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), p)) {
    den /= p;
    --v;
  }
  mpz_class mod = ppow(p, rel_prec);
  mpz_class dinv;
  mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t());
  mpz_class u = num * dinv;
  u %= mod;
  if (u < 0) u += mod;
  return make(p, v, u.get_ui(), rel_prec);
}

PadicNumber PadicNumber::operator+(const PadicNumber& o) const {
  if (exact_zero_) return o;
  if (o.exact_zero_) return *this;
  if (p_ != o.p_) throw DomainError("prime mismatch");
  const int abs = std::min(abs_prec(), o.abs_prec());
  const int m = std::min(val_, o.val_);
  if (m >= abs) return zero_to(p_, abs);
  const int k = abs - m;
  const u64 mod = ppow(p_, k);
  auto part = [&](const PadicNumber& x) -> u64 {
    if (x.rel_ == 0 || x.val_ - m >= k) return 0;
    return mulmod(x.u_ % mod, ppow(p_, x.val_ - m), mod);
  };
  u64 s = (part(*this) + part(o)) % mod;
  if (s == 0) return zero_to(p_, abs);
  int k2 = 0;
  while (s % static_cast<u64>(p_) == 0) {
    s /= p_;
    ++k2;
  }
  return make(p_, m + k2, s, abs - m - k2);
}

PadicNumber PadicNumber::operator-() const {
  if (is_zero()) return *this;
  PadicNumber r(*this);
  r.u_ = ppow(p_, rel_) - u_;
  return r;
}

PadicNumber PadicNumber::operator-(const PadicNumber& o) const { return *this + (-o); }

PadicNumber PadicNumber::operator*(const PadicNumber& o) const {
  if (p_ != o.p_) throw DomainError("prime mismatch");
  if (exact_zero_ || o.exact_zero_) return exact_zero(p_);
  const int v = val_ + o.val_;
  const int rel = std::min(rel_, o.rel_);
  if (rel == 0) return zero_to(p_, v + rel);
  return make(p_, v, mulmod(u_, o.u_, ppow(p_, rel)), rel);
}

PadicNumber PadicNumber::inv() const {
  if (is_zero()) throw DomainError("p-adic division by zero");
  return make(p_, -val_, invmod(u_, ppow(p_, rel_)), rel_);
}

PadicNumber PadicNumber::operator/(const PadicNumber& o) const { return *this * o.inv(); }

PadicNumber PadicNumber::cap(int abs) const {
  if (exact_zero_) return *this;
  if (val_ >= abs) return zero_to(p_, std::min(abs, abs_prec()));
  int rel = std::min(rel_, abs - val_);
  return make(p_, val_, u_, rel);
}

u64 PadicNumber::residue(int k) const {
  if (exact_zero_) return 0;
  if (val_ < 0) throw DomainError("residue of a non-integral p-adic number");
  if (abs_prec() < k) throw PrecisionError("residue requested beyond known precision");
  if (rel_ == 0 || val_ >= k) return 0;
  u64 mod = ppow(p_, k);
  return mulmod(u_ % mod, ppow(p_, val_), mod);
}

std::string PadicNumber::str() const {
  if (exact_zero_) return "0";
  std::ostringstream os;
  if (rel_ == 0) {
    os << "O(" << p_ << "^" << val_ << ")";
    return os.str();
  }
  os << u_;
  if (val_ != 0) os << "*" << p_ << "^" << val_;
  os << " + O(" << p_ << "^" << abs_prec() << ")";
  return os.str();
}

json PadicNumber::to_json() const {
  if (exact_zero_) return {{"valuation", "inf"}, {"mantissa", ""}, {"precision", 0}};
  std::string digits;
  u64 u = u_;
  for (int i = 0; i < rel_; ++i) {
    digits.push_back(static_cast<char>('0' + u % p_));
    u /= p_;
  }
  std::reverse(digits.begin(), digits.end());
  return {{"valuation", val_}, {"mantissa", digits}, {"precision", rel_}};
}

PadicNumber PadicNumber::from_json(long p, const json& j) {
  if (j.at("valuation").is_string()) return exact_zero(p);
  int v = j.at("valuation").get<int>();
  int rel = j.at("precision").get<int>();
  std::string d = j.at("mantissa").get<std::string>();
  u64 u = 0;
  for (char ch : d) u = u * p + static_cast<u64>(ch - '0');
  return make(p, v, u, rel);
}

PadicNumber qp_ring(PadicOp kind, const PadicNumber& a, const PadicNumber* b) {
  switch (kind) {
    case PadicOp::Add:
      if (!b) throw DomainError("add needs two operands");
      return a + *b;
    case PadicOp::Mul:
      if (!b) throw DomainError("mul needs two operands");
      return a * *b;
    case PadicOp::Inv:
      return a.inv();
  }
  throw DomainError("unknown op");
}

// ------------------------------------------------------------- TateSeries

TateSeries::TateSeries(long p, int nvars, int D, int prec, int radius)
    : p_(p), nv_(nvars), D_(D), prec_(prec), n_(radius) {
  if (nvars != 1 && nvars != 2) throw DomainError("Tate series support one or two variables");
  if (D < 0 || prec < 1) throw DomainError("bad Tate series shape");
  mod_ = ppow(p, prec);
  std::size_t sz = nvars == 1 ? D + 1 : static_cast<std::size_t>(D + 1) * (D + 2) / 2;
  c_.assign(sz, 0);
}

TateSeries TateSeries::constant(long p, int nvars, int D, int prec, const PadicNumber& c) {
  TateSeries s(p, nvars, D, prec);
  s.c_[0] = c.residue(prec);
  return s;
}

std::size_t TateSeries::idx(int i, int j) const {
  if (nv_ == 1) return static_cast<std::size_t>(i);
  int d = i + j;
  return static_cast<std::size_t>(d) * (d + 1) / 2 + j;
}

void TateSeries::set_raw(int i, int j, u64 r) { c_[idx(i, j)] = r % mod_; }

PadicNumber from_residue(long p, u64 r, int abs) {
  if (r == 0) return PadicNumber::zero_to(p, abs);
  int v = 0;
  while (r % static_cast<u64>(p) == 0) {
    r /= p;
    ++v;
  }
  return PadicNumber::make(p, v, r, abs - v);
}

PadicNumber TateSeries::coeff(int i, int j) const { return from_residue(p_, c_[idx(i, j)], prec_); }

void TateSeries::check_compatible(const TateSeries& o) const {
  if (p_ != o.p_) throw DomainError("Tate series prime mismatch");
  if (nv_ != o.nv_) throw DomainError("Tate series variable count mismatch");
  if (D_ != o.D_) throw DomainError("Tate series degree cutoff mismatch");
  if (n_ != o.n_) throw DomainError("Tate series radius mismatch");
}

TateSeries TateSeries::with_prec(int prec) const {
  if (prec > prec_) throw PrecisionError("cannot raise Tate series precision");
  TateSeries r(p_, nv_, D_, prec, n_);
  r.tail_ = tail_;
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] % r.mod_;
  return r;
}

TateSeries TateSeries::operator+(const TateSeries& o) const {
  check_compatible(o);
  int prec = std::min(prec_, o.prec_);
  TateSeries r(p_, nv_, D_, prec, n_);
  r.tail_ = std::min(tail_, o.tail_);
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = (c_[i] % r.mod_ + o.c_[i] % r.mod_) % r.mod_;
  return r;
}

TateSeries TateSeries::operator-() const {
  TateSeries r(*this);
  for (auto& x : r.c_) x = x == 0 ? 0 : mod_ - x;
  return r;
}

TateSeries TateSeries::operator-(const TateSeries& o) const { return *this + (-o); }

namespace {

int val_or(u64 r, long p, int fallback) {
  if (r == 0) return fallback;
  int v = 0;
  while (r % static_cast<u64>(p) == 0) {
    r /= p;
    ++v;
  }
  return v;
}

}  // namespace

TateSeries TateSeries::operator*(const TateSeries& o) const {
  check_compatible(o);
  int prec = std::min(prec_, o.prec_);
  TateSeries r(p_, nv_, D_, prec, n_);
  const u64 m = r.mod_;
  // Minimal valuation per total degree, for the bound on dropped products.
  std::vector<int> va(D_ + 1, prec), vb(D_ + 1, prec);
  if (nv_ == 1) {
    for (int i = 0; i <= D_; ++i) {
      va[i] = val_or(c_[i] % m, p_, prec);
      vb[i] = val_or(o.c_[i] % m, p_, prec);
    }
    for (int i = 0; i <= D_; ++i) {
      u64 a = c_[i] % m;
      if (!a) continue;
      for (int j = 0; i + j <= D_; ++j) {
        u64 b = o.c_[j] % m;
        if (b) r.c_[i + j] = (r.c_[i + j] + mulmod(a, b, m)) % m;
      }
    }
  } else {
    for (int d = 0; d <= D_; ++d)
      for (int j = 0; j <= d; ++j) {
        va[d] = std::min(va[d], val_or(c_[idx(d - j, j)] % m, p_, prec));
        vb[d] = std::min(vb[d], val_or(o.c_[idx(d - j, j)] % m, p_, prec));
      }
    for (int d1 = 0; d1 <= D_; ++d1)
      for (int j1 = 0; j1 <= d1; ++j1) {
        u64 a = c_[idx(d1 - j1, j1)] % m;
        if (!a) continue;
        for (int d2 = 0; d1 + d2 <= D_; ++d2)
          for (int j2 = 0; j2 <= d2; ++j2) {
            u64 b = o.c_[idx(d2 - j2, j2)] % m;
            if (!b) continue;
            std::size_t k = idx(d1 - j1 + d2 - j2, j1 + j2);
            r.c_[k] = (r.c_[k] + mulmod(a, b, m)) % m;
          }
      }
  }
  int tail = std::min(tail_, o.tail_);
  for (int d1 = 0; d1 <= D_; ++d1)
    for (int d2 = D_ + 1 - d1; d2 <= D_; ++d2) tail = std::min(tail, va[d1] + vb[d2]);
  r.tail_ = tail;
  return r;
}

TateSeries TateSeries::scale(const PadicNumber& c) const {
  return *this * TateSeries::constant(p_, nv_, D_, prec_, c).restrict_radius(n_);
}

bool TateSeries::is_zero() const {
  for (auto x : c_)
    if (x) return false;
  return true;
}

bool TateSeries::operator==(const TateSeries& o) const { return (*this - o).is_zero(); }

PadicNumber TateSeries::eval(const PadicNumber& t0) const {
  if (nv_ != 1) throw DomainError("one-variable evaluation of a two-variable series");
  if (!t0.is_exact_zero() && t0.valuation() < n_)
    throw DomainError("evaluation point outside the radius p^" + std::to_string(n_) + " Z_p");
  int abs = std::min(prec_, tail_);
  u64 s = 0;
  if (!t0.is_exact_zero()) {
    abs = std::min(abs, t0.abs_prec() - n_);
    PadicNumber sc = t0 * PadicNumber::make(p_, -n_, 1, max_digits(p_));
    s = sc.residue(abs);
  }
  if (abs <= 0) return PadicNumber::zero_to(p_, std::max(abs, 0));
  const u64 m = ppow(p_, abs);
  u64 acc = 0;
  for (int i = D_; i >= 0; --i) acc = (mulmod(acc, s, m) + c_[i] % m) % m;
  return from_residue(p_, acc, abs);
}

PadicNumber TateSeries::eval(const PadicNumber& t1, const PadicNumber& t2) const {
  if (nv_ != 2) throw DomainError("two-variable evaluation of a one-variable series");
  int abs = std::min(prec_, tail_);
  u64 s[2] = {0, 0};
  const PadicNumber* ts[2] = {&t1, &t2};
  for (int v = 0; v < 2; ++v) {
    if (ts[v]->is_exact_zero()) continue;
    if (ts[v]->valuation() < n_) throw DomainError("evaluation point outside the radius");
    abs = std::min(abs, ts[v]->abs_prec() - n_);
  }
  if (abs <= 0) return PadicNumber::zero_to(p_, std::max(abs, 0));
  for (int v = 0; v < 2; ++v)
    if (!ts[v]->is_exact_zero())
      s[v] = (*ts[v] * PadicNumber::make(p_, -n_, 1, max_digits(p_))).residue(abs);
  const u64 m = ppow(p_, abs);
  std::vector<u64> pw1(D_ + 1, 1), pw2(D_ + 1, 1);
  for (int i = 1; i <= D_; ++i) {
    pw1[i] = mulmod(pw1[i - 1], s[0], m);
    pw2[i] = mulmod(pw2[i - 1], s[1], m);
  }
  pw1[0] %= m;
  pw2[0] %= m;
  u64 acc = 0;
  for (int d = 0; d <= D_; ++d)
    for (int j = 0; j <= d; ++j) {
      u64 c = c_[idx(d - j, j)] % m;
      if (c) acc = (acc + mulmod(mulmod(c, pw1[d - j], m), pw2[j], m)) % m;
    }
  return from_residue(p_, acc, abs);
}

TateSeries TateSeries::restrict_radius(int n) const {
  if (n < n_) throw DomainError("radius restriction can only shrink the disc");
  TateSeries r(*this);
  r.n_ = n;
  int dn = n - n_;
  if (dn == 0) return r;
  for (int d = 0; d <= D_; ++d) {
    u64 f = d * dn > prec_ ? 0 : (d * dn == prec_ ? 0 : ppow(p_, d * dn));
    if (nv_ == 1) r.c_[d] = mulmod(r.c_[d], f, mod_);
    else
      for (int j = 0; j <= d; ++j) r.c_[idx(d - j, j)] = mulmod(r.c_[idx(d - j, j)], f, mod_);
  }
  if (r.tail_ < PadicNumber::kInf) r.tail_ += (D_ + 1) * dn;
  return r;
}

TateSeries TateSeries::codiagonal() const {
  if (nv_ != 2) throw DomainError("codiagonal needs a two-variable series");
  TateSeries r(p_, 1, D_, prec_, n_);
  r.tail_ = tail_;
  for (int d = 0; d <= D_; ++d)
    for (int j = 0; j <= d; ++j) r.c_[d] = (r.c_[d] + c_[idx(d - j, j)]) % mod_;
  return r;
}

TateSeries TateSeries::project(int var) const {
  if (nv_ != 1) throw DomainError("projection needs a one-variable series");
  TateSeries r(p_, 2, D_, prec_, n_);
  r.tail_ = tail_;
  for (int i = 0; i <= D_; ++i) r.c_[var == 0 ? r.idx(i, 0) : r.idx(0, i)] = c_[i];
  return r;
}

json TateSeries::to_json() const {
  json cs = json::array();
  for (int d = 0; d <= D_; ++d) {
    if (nv_ == 1) cs.push_back(coeff(d).to_json());
    else
      for (int j = 0; j <= d; ++j) cs.push_back({{"i", d - j}, {"j", j}, {"c", coeff(d - j, j).to_json()}});
  }
  return {{"p", p_}, {"vars", nv_}, {"D", D_}, {"precision", prec_}, {"radius", n_}, {"coefficients", cs}};
}

TateSeries tate_ops(TateOp kind, const TateSeries& f, const TateSeries& g) {
  return kind == TateOp::Add ? f + g : f * g;
}

PadicNumber tate_eval(const TateSeries& f, const PadicNumber& t0) { return f.eval(t0); }

// --------------------------------------------------- binomial exponential

int binom_prec(long p, int N, int D) { return N - (D > 0 ? (D - 1) / static_cast<int>(p - 1) : 0); }

namespace {

void check_one_mod_p(const PadicNumber& v) {
  check_prime(v.prime());
  if (v.is_zero() || v.valuation() != 0 || !(v - PadicNumber::from_int(v.prime(), 1, v.rel_prec())).zero_mod(1))
    throw DomainError("binomial exponential needs v = 1 mod p");
}

}  // namespace

TateSeries binom_exp_series(const PadicNumber& v, int D, int nvars, int var) {
  check_one_mod_p(v);
  const long p = v.prime();
  const int N = v.abs_prec();
  if (static_cast<long>(D) * (p - 2) < static_cast<long>(N) * (p - 1))
    throw PrecisionError("degree cutoff D=" + std::to_string(D) + " below N(p-1)/(p-2) for N=" + std::to_string(N));
  const int Np = binom_prec(p, N, D);
  if (Np < 1) throw PrecisionError("no precision left after factorial losses");
  const int W = std::min(max_digits(p), N + 4);
  const PadicNumber one = PadicNumber::from_int(p, 1, W);
  const PadicNumber x = v - one;
  // log v = sum (-1)^{k+1} x^k / k, stopping once every remaining term is below p^(N+1).
  PadicNumber L = PadicNumber::exact_zero(p), xk = one;
  for (int k = 1;; ++k) {
    xk = xk * x;
    int logk = 0;
    for (long q = p; q <= k; q *= p) ++logk;
    if (k - logk > N + 1) break;
    PadicNumber term = xk * PadicNumber::from_q(p, Q(k % 2 ? 1 : -1, k), W);
    L = L + term;
  }
  TateSeries s(p, 1, D, Np);
  PadicNumber Lj = one;
  mpz_class fact = 1;
  for (int j = 0; j <= D; ++j) {
    if (j > 0) {
      Lj = Lj * L;
      fact *= j;
    }
    PadicNumber c = Lj * PadicNumber::from_q(p, Q(1, fact), W);
    if (!c.is_exact_zero() && c.abs_prec() < Np)
      throw PrecisionError("coefficient " + std::to_string(j) + " of v^t lost precision");
    s.set_raw(j, 0, c.cap(Np).residue(Np));
  }
  s.set_tail_val(D + 1 - D / static_cast<int>(p - 1));
  if (nvars == 2) return s.project(var);
  return s;
}

PadicNumber binom_exp_at(const PadicNumber& v, const Q& f) {
  check_one_mod_p(v);
  const long p = v.prime();
  if (!p_integral(f, p)) throw DomainError("exponent " + q_str(f) + " has denominator divisible by p");
  const int N = v.abs_prec();
  const PadicNumber x = v - PadicNumber::from_int(p, 1, N);
  PadicNumber acc = PadicNumber::from_int(p, 1, N), xi = PadicNumber::from_int(p, 1, N);
  Q c = 1;
  for (int i = 1; i <= N; ++i) {
    c = c * (f - (i - 1)) / i;
    xi = xi * x;
    if (c == 0) break;
    acc = acc + PadicNumber::from_q(p, c, N) * xi;
  }
  return acc.cap(N);
}

std::optional<int> strassman_bound(const TateSeries& F) {
  if (F.nvars() != 1) throw DomainError("Strassman bound needs a one-variable series");
  int best = PadicNumber::kInf, idx = -1;
  for (int i = 0; i <= F.degree(); ++i) {
    u64 r = F.raw(i);
    if (!r) continue;
    int v = val_or(r, F.prime(), F.prec());
    if (v <= best) {
      best = v;
      idx = i;
    }
  }
  if (idx < 0) throw PrecisionError("series indistinguishable from zero at working precision");
  if (F.tail_val() <= best) return std::nullopt;
  return idx;
}

// -------------------------------------------------------------- Embedding

Embedding build_embedding(const BasisPtr& basis, EmbedMode mode, long p, int N, std::uint64_t seed) {
  check_prime(p);
  if (N < 1 || N + 4 > max_digits(p)) throw DomainError("precision N out of range for p");
  if (mode == EmbedMode::Generic) {
    auto g = genericity_test(*basis);
    if (!g.pass) throw DomainError("generic embedding requested but the genericity test fails");
  }
  Embedding e;
  e.mode_ = mode;
  e.p_ = p;
  e.N_ = N;
  e.seed_ = seed;
  e.b_ = basis;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(N),
                    static_cast<std::uint32_t>(mode == EmbedMode::Generic)};
  std::mt19937_64 rng(seq);
  const u64 mod = ppow(p, N);
  const PadicNumber one = PadicNumber::from_int(p, 1, N);
  const PadicNumber pp = PadicNumber::from_int(p, p, N);
  e.img_.resize(basis->size());
  for (std::size_t i = 0; i < basis->size(); ++i) {
    if (basis->dependent(i)) continue;
    u64 mu = rng() % mod;
    bool energy = basis->symbol(i).role == Role::Energy;
    if (mode == EmbedMode::Generic && energy) {
      while (mu % static_cast<u64>(p) == 0) mu = rng() % mod;
      e.img_[i] = (pp * PadicNumber::make(p, 0, mu, N)).cap(N + 1);
    } else {
      PadicNumber m = from_residue(p, mu, N);
      e.img_[i] = (one + pp * m).cap(N);
    }
  }
  for (std::size_t i = 0; i < basis->size(); ++i) {
    if (!basis->dependent(i)) continue;
    QVec c(basis->size(), Q(0));
    c[i] = 1;
    e.img_[i] = e.embed_monomial(Exponent(basis, c));
  }
  return e;
}

PadicNumber Embedding::embed_monomial(const Exponent& g) const {
  if (!same_basis(g.basis(), b_)) throw DomainError("embedding basis mismatch");
  PadicNumber acc = PadicNumber::from_int(p_, 1, N_);
  for (std::size_t i = 0; i < b_->size(); ++i) {
    const Q& c = g[i];
    if (c == 0) continue;
    if (!p_integral(c, p_)) throw DomainError("exponent coordinate " + q_str(c) + " has denominator divisible by p");
    bool energy = b_->symbol(i).role == Role::Energy;
    if (mode_ == EmbedMode::Generic && energy) {
      if (c < 0 || c.get_den() != 1)
        throw DomainError("generic embedding needs nonnegative integral energy coordinates");
      unsigned long n = c.get_num().get_ui();
      PadicNumber base = img_[i], r = PadicNumber::from_int(p_, 1, N_);
      while (n) {
        if (n & 1) r = r * base;
        base = base * base;
        n >>= 1;
      }
      acc = acc * r;
    } else {
      acc = acc * binom_exp_at(img_[i], c);
    }
  }
  return acc;
}

PadicNumber Embedding::embed_novikov(const NovikovSeries& a) const {
  PadicNumber acc = PadicNumber::exact_zero(p_);
  int floor_prec = PadicNumber::kInf;
  if (mode_ == EmbedMode::Generic && !a.polynomial()) {
    // Discarded terms have energy >= E_max, hence p-adic valuation >= E_max / max symbol value.
    Q maxv = 0;
    for (std::size_t i = 0; i < b_->size(); ++i)
      if (b_->symbol(i).role == Role::Energy) maxv = std::max(maxv, Q(b_->enclosure(i, 0).hi));
    Q lo = a.cutoff().interval(ExponentBasis::kMaxLevel).lo;
    floor_prec = maxv > 0 ? static_cast<int>(ceil_q(lo / maxv).get_si()) : 0;
  }
  for (const auto& t : a.terms()) {
    if (mode_ == EmbedMode::Generic && !t.exp.nonneg_energy())
      throw DomainError("negative energy coordinate in generic mode");
    acc = acc + PadicNumber::from_q(p_, t.coef, N_) * embed_monomial(t.exp);
  }
  if (floor_prec < PadicNumber::kInf) acc = acc.cap(std::min(floor_prec, acc.abs_prec()));
  return acc;
}

TateSeries Embedding::family_weight(const Exponent& g, int D, int nvars, int var) const {
  if (mode_ == EmbedMode::Generic && g.has_role(Role::Energy))
    throw DomainError("family weight needs a flux-only exponent in generic mode");
  return binom_exp_series(embed_monomial(g), D, nvars, var);
}

json Embedding::to_json() const {
  return {{"mode", mode_ == EmbedMode::Monotone ? "monotone" : "generic"},
          {"p", p_},
          {"N", N_},
          {"seed", seed_}};
}

Embedding embedding_from_json(const BasisPtr& basis, const json& j) {
  std::string m = j.at("mode").get<std::string>();
  if (m != "monotone" && m != "generic") throw DomainError("embedding mode must be monotone|generic");
  return build_embedding(basis, m == "monotone" ? EmbedMode::Monotone : EmbedMode::Generic, j.at("p").get<long>(),
                         j.at("N").get<int>(), j.at("seed").get<std::uint64_t>());
}

PadicNumber embed_novikov(const Embedding& e, const NovikovSeries& a) { return e.embed_novikov(a); }

TateSeries embed_family_weight(const Embedding& e, const Exponent& g, int D, int nvars, int var) {
  return e.family_weight(g, D, nvars, var);
}

}  // namespace ff
