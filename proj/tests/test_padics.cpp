#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fluxfam/padics.hpp"
#include "support.hpp"

using namespace fft;

namespace {

PadicNumber pz(long p, long long n, int N = 10) { return PadicNumber::from_int(p, n, N); }

// Random element of 1 + pZ_p with relative precision N.
PadicNumber one_mod_p(Gen& g, long p, int N) {
  std::uint64_t mod = ppow(p, N - 1);
  Q mu(static_cast<long>(g.eng() % mod));
  return PadicNumber::from_q(p, 1 + p * mu, N);
}

// Naive power by repeated multiplication.
PadicNumber naive_pow(const PadicNumber& v, int n) {
  PadicNumber r = PadicNumber::from_int(v.prime(), 1, v.rel_prec());
  for (int i = 0; i < n; ++i) r = r * v;
  return r;
}

}  // namespace

TEST_CASE("valuations and inverses") {
  auto five = pz(5, 5);
  auto sq = qp_ring(PadicOp::Mul, five, &five);
  CHECK(sq.valuation() == 2);
  auto v = pz(7, 8);
  auto one = v.inv() * v;
  CHECK(one.equal_mod(pz(7, 1), 10));
  auto s = pz(5, 1, 4) + pz(5, 4, 4);
  CHECK(s.valuation() == 1);
  CHECK(s.residue(4) == 5);
  CHECK_THROWS_AS(PadicNumber::exact_zero(5).inv(), DomainError);
  CHECK_THROWS_AS(pz(5, 1) + pz(7, 1), DomainError);
}

TEST_CASE("precision propagates through cancellation") {
  auto a = PadicNumber::from_q(3, Q(10), 5);   // 1 + 3^2, known mod 3^5
  auto b = PadicNumber::from_q(3, Q(1), 5);
  auto d = a - b;
  CHECK(d.valuation() == 2);
  CHECK(d.abs_prec() == 5);
  CHECK(d.rel_prec() == 3);
}

TEST_CASE("json form of p-adic numbers") {
  auto x = PadicNumber::from_q(5, Q(3 * 25 + 2 * 125), 4);
  auto j = x.to_json();
  CHECK(j["valuation"] == 2);
  CHECK(j["mantissa"] == "0023");
  CHECK(PadicNumber::from_json(5, j).equal_mod(x, 6));
}

TEST_CASE("binomial exponential basics") {
  auto c = binom_exp_series(pz(5, 1, 8), 11);
  CHECK(c.raw(0) == 1);
  for (int i = 1; i <= 11; ++i) CHECK(c.raw(i) == 0);

  auto v = pz(5, 6, 8);
  auto F = binom_exp_series(v, 11);
  int Np = binom_prec(5, 8, 11);
  CHECK(Np == 6);
  CHECK(F.eval(pz(5, 3, 8)).equal_mod(v * v * v, Np));
  CHECK(F.eval(PadicNumber::exact_zero(5)).equal_mod(pz(5, 1), Np));
  auto h = F.eval(PadicNumber::from_q(5, Q(1, 2), 8));
  CHECK((h * h).equal_mod(v, Np));
  CHECK_THROWS_AS(binom_exp_series(pz(5, 2, 8), 11), DomainError);
  CHECK_THROWS_AS(binom_exp_series(v, 5), PrecisionError);
}

TEST_CASE("canonical rational powers") {
  auto v = pz(5, 31, 10);
  CHECK(binom_exp_at(v, 0).equal_mod(pz(5, 1), 10));
  for (int n = 1; n <= 6; ++n) CHECK(binom_exp_at(v, n).equal_mod(naive_pow(v, n), 10));
  auto r = binom_exp_at(v, Q(1, 3));
  CHECK((r * r * r).equal_mod(v, 10));
  CHECK_THROWS_AS(binom_exp_at(v, Q(1, 5)), DomainError);
}

TEST_CASE("tate evaluation at constants and radius") {
  auto c = TateSeries::constant(5, 1, 6, 6, pz(5, 17, 6));
  CHECK(c.eval(pz(5, 3, 6)).equal_mod(pz(5, 17), 6));
  auto r = c.restrict_radius(1);
  CHECK_THROWS_AS(r.eval(pz(5, 3, 6)), DomainError);
  CHECK(r.eval(pz(5, 10, 6)).equal_mod(pz(5, 17), 5));
}

TEST_CASE("two-variable product matches the binomial expansion") {
  long p = 5;
  int N = 8, D = 11;
  auto v = pz(p, 11, N);
  auto F = binom_exp_series(v, D);
  auto prod = binom_exp_series(v, D, 2, 0) * binom_exp_series(v, D, 2, 1);
  std::uint64_t mod = ppow(p, F.prec());
  // Oracle: coefficient of t1^i t2^j is c_{i+j} * C(i+j, i).
  for (int d = 0; d <= D; ++d)
    for (int j = 0; j <= d; ++j) {
      mpz_class binom;
      mpz_bin_uiui(binom.get_mpz_t(), d, j);
      mpz_class want = (mpz_class(std::to_string(F.raw(d))) * binom) % mpz_class(std::to_string(mod));
      CHECK(mpz_class(std::to_string(prod.raw(d - j, j))) == want);
    }
}

TEST_CASE("exponential laws on seeded units") {
  for (long p : {3L, 5L, 7L}) {
    Gen g(100 + p);
    const int N = 12, D = 24;
    for (int it = 0; it < 40; ++it) {
      auto v = one_mod_p(g, p, N), w = one_mod_p(g, p, N);
      auto Fv = binom_exp_series(v, D), Fw = binom_exp_series(v * w, D);
      // (v w)^t = v^t w^t
      CHECK(Fw == Fv * binom_exp_series(w, D));
      // v^{t1+t2} along the diagonal is (v^2)^t
      auto two = (binom_exp_series(v, D, 2, 0) * binom_exp_series(v, D, 2, 1)).codiagonal();
      CHECK(two == binom_exp_series(v * v, D));
    }
  }
}

TEST_CASE("strassman bounds") {
  long p = 5;
  TateSeries f(p, 1, 4, 6);
  f.set_raw(0, 0, 1);
  f.set_raw(1, 0, 1);
  CHECK(strassman_bound(f) == 1);

  auto F = binom_exp_series(pz(p, 1 + p, 8), 11) - TateSeries::constant(p, 1, 11, 6, pz(p, 1, 8));
  CHECK(strassman_bound(F) == 1);

  // t (t - 1) * 3
  TateSeries q(p, 1, 4, 6);
  q.set_raw(1, 0, ppow(p, 6) - 3);
  q.set_raw(2, 0, 3);
  CHECK(strassman_bound(q) == 2);

  CHECK_THROWS_AS(strassman_bound(TateSeries(p, 1, 4, 6)), PrecisionError);

  // Maximal coefficient level with a truncated tail: no certificate.
  TateSeries w(p, 1, 2, 6);
  w.set_raw(0, 0, 5);
  w.set_tail_val(1);
  CHECK_FALSE(strassman_bound(w).has_value());
}

TEST_CASE("strassman soundness on planted roots") {
  Gen g(77);
  for (int it = 0; it < 50; ++it) {
    long p = it % 2 ? 5 : 7;
    int prec = 8, nroots = static_cast<int>(g.range(1, 4));
    std::uint64_t mod = ppow(p, prec);
    // prod (t - r_i) times a unit, roots in Z.
    std::vector<std::uint64_t> c{static_cast<std::uint64_t>(g.range(1, p - 1))};
    for (int r = 0; r < nroots; ++r) {
      std::uint64_t root = static_cast<std::uint64_t>(g.range(0, 200));
      std::vector<std::uint64_t> nc(c.size() + 1, 0);
      for (std::size_t i = 0; i < c.size(); ++i) {
        nc[i + 1] = (nc[i + 1] + c[i]) % mod;
        nc[i] = (nc[i] + mod - (c[i] * (root % mod)) % mod) % mod;
      }
      c = nc;
    }
    TateSeries f(p, 1, static_cast<int>(c.size()) - 1, prec);
    for (std::size_t i = 0; i < c.size(); ++i) f.set_raw(static_cast<int>(i), 0, c[i]);
    auto b = strassman_bound(f);
    REQUIRE(b.has_value());
    CHECK(*b >= nroots);
  }
}

TEST_CASE("evaluation commutes with products") {
  Gen g(9);
  for (int it = 0; it < 100; ++it) {
    long p = 7;
    int D = 6, prec = 10;
    TateSeries a(p, 1, D, prec), b(p, 1, D, prec);
    for (int i = 0; i <= 3; ++i) {
      a.set_raw(i, 0, g.eng() % ppow(p, prec));
      b.set_raw(i, 0, g.eng() % ppow(p, prec));
    }
    auto t0 = PadicNumber::from_int(p, g.range(-30, 30), prec);
    CHECK((a * b).eval(t0).equal_mod(a.eval(t0) * b.eval(t0), prec));
  }
}

TEST_CASE("embeddings") {
  auto b = ExponentBasis::make({exact_sym("E1", Role::Energy, 1), sqrt_sym("E2", Role::Energy, 2),
                                sqrt_sym("a", Role::Flux, 3)});
  auto mono = build_embedding(b, EmbedMode::Monotone, 5, 10, 42);
  for (std::size_t i = 0; i < b->size(); ++i) CHECK((mono.image(i) - pz(5, 1)).zero_mod(1));
  auto again = build_embedding(b, EmbedMode::Monotone, 5, 10, 42);
  for (std::size_t i = 0; i < b->size(); ++i) CHECK(again.image(i).equal_mod(mono.image(i), 10));

  auto gen = build_embedding(b, EmbedMode::Generic, 5, 10, 42);
  CHECK(gen.image(0).valuation() == 1);
  CHECK(gen.image(1).valuation() == 1);
  CHECK(gen.image(2).valuation() == 0);

  auto cut = ex(b, {20, 0, 0});
  auto one = NovikovSeries::constant(1, cut);
  CHECK(mono.embed_novikov(one).equal_mod(pz(5, 1), 10));
  auto t1 = NovikovSeries::monomial(1, ex(b, {1, 0, 0}), cut), t2 = NovikovSeries::monomial(1, ex(b, {0, 1, 0}), cut);
  CHECK(mono.embed_novikov(t1 * t2).equal_mod(mono.embed_novikov(t1) * mono.embed_novikov(t2), 10));
  CHECK(gen.embed_novikov(t1 * t2).valuation() == 2);

  auto g = ex(b, {0, 0, 2});
  CHECK(mono.family_weight(Exponent(b), 14).raw(0) == 1);
  auto W = mono.family_weight(g, 14);
  CHECK(W.eval(pz(5, 1)).equal_mod(mono.embed_monomial(g), W.prec()));
  auto inv = W * mono.family_weight(-g, 14);
  CHECK(inv == TateSeries::constant(5, 1, 14, inv.prec(), pz(5, 1)));
  CHECK_THROWS_AS(gen.family_weight(ex(b, {1, 0, 0}), 14), DomainError);
  CHECK_THROWS_AS(gen.embed_novikov(NovikovSeries::monomial(1, ex(b, {-1, 0, 0}), cut)), DomainError);
  CHECK_THROWS_AS(mono.embed_monomial(ex(b, {Q(1, 5), 0, 0})), DomainError);
}

TEST_CASE("generic embedding refuses a dependent flux") {
  auto b = ExponentBasis::make({exact_sym("E1", Role::Energy, 1), exact_sym("E2", Role::Energy, 2),
                                exact_sym("a", Role::Flux, -1)},
                               {{"a", QVec{1, -1, 0}}});
  CHECK_THROWS_AS(build_embedding(b, EmbedMode::Generic, 5, 10, 1), DomainError);
  CHECK_NOTHROW(build_embedding(b, EmbedMode::Monotone, 5, 10, 1));
}

TEST_CASE("embedding is additive and multiplicative on seeded series") {
  auto b = ExponentBasis::make({exact_sym("E1", Role::Energy, 1), sqrt_sym("E2", Role::Energy, 2)});
  auto cut = ex(b, {30, 0});
  auto e = build_embedding(b, EmbedMode::Monotone, 7, 10, 3);
  Gen g(31);
  auto rnd = [&] {
    NovikovSeries s(b, cut, true);
    for (int i = 0; i < 3; ++i)
      s = s + NovikovSeries::monomial(g.rational(4, 1), ex(b, {qfrac(g.range(0, 4), 2), Q(g.range(0, 2))}), cut);
    return s;
  };
  for (int it = 0; it < 100; ++it) {
    auto x = rnd(), y = rnd();
    CHECK(e.embed_novikov(x + y).equal_mod(e.embed_novikov(x) + e.embed_novikov(y), 10));
    CHECK(e.embed_novikov(x * y).equal_mod(e.embed_novikov(x) * e.embed_novikov(y), 10));
  }
}
