#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <tuple>

#include "fluxfam/bimod.hpp"
#include "fluxfam/torus.hpp"
#include "lattice_oracle.hpp"
#include "support.hpp"

using namespace fft;

namespace {

LineConfig lines(std::vector<Slope> s, Q emax) {
  LineConfig cfg;
  cfg.slopes = std::move(s);
  cfg.emax = emax;
  return cfg;
}

int fiber_rank_novikov(const CategoryPtr& c, const Q& f) {
  return total(cohomology_rank(fiber_complex(novikov_point(c, f), 0, 1)));
}

}  // namespace

TEST_CASE("bigon examples") {
  SUBCASE("equal areas and fluxes cancel") {
    auto cfg = bigon_basic_config();
    cfg.a1 = cfg.a2 = Exponent(cfg.basis, {Q(1, 2)});
    cfg.c1 = cfg.c2 = {Q(0)};
    auto c = bigon_pair(cfg);
    CHECK(validate_ainf(*c).pass);
    CHECK(fiber_rank_novikov(c, 0) == 2);
  }
  SUBCASE("basic areas jump at one half") {
    auto c = bigon_pair(bigon_basic_config());
    CHECK(validate_ainf(*c).pass);
    CHECK(fiber_rank_novikov(c, Q(1, 2)) == 2);
    for (Q f : {Q(0), Q(1, 4), Q(-1, 3), Q(3, 4)}) CHECK(fiber_rank_novikov(c, f) == 0);
  }
}

TEST_CASE("geometric oracle") {
  auto p3 = bigon_period3_config();
  for (long k = -6; k <= 6; ++k) CHECK(geometric_rank_oracle(p3, k) == (k % 3 == 0 ? 2 : 0));
  auto irr = bigon_irrational_config();
  for (long k = -6; k <= 6; ++k) CHECK(geometric_rank_oracle(irr, k) == (k == 0 ? 2 : 0));
  auto sym = bigon_basic_config();
  sym.a1 = sym.a2 = Exponent(sym.basis, {Q(1, 2)});
  CHECK(geometric_rank_oracle(sym, 0) == 2);
  CHECK(flow_period(p3) == 3);
  CHECK_FALSE(flow_period(irr).has_value());
  CHECK(flow_period(bigon_basic_config()) == 1);
}

TEST_CASE("oracle agrees with the family inside the window") {
  for (auto cfg : {bigon_basic_config(), bigon_period3_config(), bigon_irrational_config()}) {
    auto c = bigon_pair(cfg);
    int inside = 0;
    for (long k = -12; k <= 12; ++k) {
      const Q f = cfg.step * k;
      if (!in_window(cfg, f)) continue;
      ++inside;
      CHECK(fiber_rank_novikov(c, f) == geometric_rank_oracle(cfg, k));
    }
    CHECK(inside > 0);
  }
  // Half-integer steps reach the jump of the basic configuration.
  auto cfg = bigon_basic_config();
  cfg.step = Q(1, 2);
  auto c = bigon_pair(cfg);
  CHECK(geometric_rank_oracle(cfg, 1) == 2);
  CHECK(fiber_rank_novikov(c, Q(1, 2)) == 2);
}

TEST_CASE("deformed Yoneda module follows the energy identity") {
  for (auto cfg : {bigon_basic_config(), bigon_period3_config(), bigon_irrational_config()}) {
    auto c = bigon_pair(cfg);
    const int Lp = c->object("Lp");
    const int x = c->gen("x"), y = c->gen("y");
    for (Q f : {Q(0), Q(1, 8), Q(-1, 5), Q(1, 3)}) {
      auto tab = deformed_yoneda(c, Lp, f);
      auto expect = NovikovSeries::monomial(1, cfg.a1 + cfg.alpha_of(cfg.c1) * f, c->emax) -
                    NovikovSeries::monomial(1, cfg.a2 + cfg.alpha_of(cfg.c2) * f, c->emax);
      CHECK(tab.at({{x}, y}) == expect);
    }
  }
}

TEST_CASE("two lines meet in |ps - qr| points") {
  auto c = torus_lines(lines({{0, 1}, {1, 1}}, 2));
  CHECK(c->hom(0, 1).size() == 1);
  auto c2 = torus_lines(lines({{0, 1}, {1, 2}, {3, 1}}, 2));
  CHECK(c2->hom(0, 1).size() == 1);
  CHECK(c2->hom(0, 2).size() == 3);
  CHECK(c2->hom(1, 2).size() == 5);
}

TEST_CASE("line category matches the lattice oracle") {
  const std::vector<std::vector<Slope>> configs{
      {{0, 1}, {1, 1}, {1, 0}}, {{0, 1}, {1, 2}, {1, 1}, {1, 0}}, {{-1, 1}, {0, 1}, {1, 1}, {2, 1}}};
  for (const auto& s : configs)
    for (Q em : {Q(2), Q(5)}) {
      auto cfg = lines(s, em);
      auto c = torus_lines(cfg);
      CHECK(validate_ainf(*c).pass);
      auto lib = library_triangles(c);
      CHECK(lib == lattice_oracle(cfg, c));
      CHECK_FALSE(lib.empty());
    }
}

TEST_CASE("cutoff below the smallest triangle leaves mu2 empty") {
  auto cfg = lines({{0, 1}, {1, 1}, {1, 0}}, Q(1, 1000));
  auto c = torus_lines(cfg);
  CHECK(library_triangles(c).empty());
  CHECK(validate_ainf(*c).pass);
}

TEST_CASE("slope configurations outside the single-degree regime are rejected") {
  CHECK_THROWS_AS(torus_lines(lines({{1, 1}, {0, 1}}, 2)), DomainError);
  CHECK_THROWS_AS(torus_lines(lines({{0, 1}, {2, 2}}, 2)), DomainError);
  CHECK_THROWS_AS(torus_lines(lines({{0, 1}, {0, 1}}, 2)), DomainError);
  CHECK_THROWS_AS(torus_lines(lines({{1, 0}, {0, 1}}, 2)), DomainError);
  CHECK_THROWS_AS(torus_lines(lines({{0, 1}}, 2)), DomainError);
}

TEST_CASE("bigon config round trip") {
  for (auto cfg : {bigon_basic_config(), bigon_period3_config(), bigon_irrational_config()}) {
    auto back = BigonConfig::from_json(cfg.to_json());
    CHECK(back.to_json() == cfg.to_json());
    CHECK(category_digest(*bigon_pair(back)) == category_digest(*bigon_pair(cfg)));
  }
}
