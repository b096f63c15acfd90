#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fluxfam/scan.hpp"
#include "support.hpp"

using namespace fft;

TEST_CASE("symmetric residues") {
  CHECK(symmetric_residue(0, 3) == 0);
  CHECK(symmetric_residue(2, 3) == -1);
  CHECK(symmetric_residue(-2, 3) == 1);
  CHECK(symmetric_residue(4, 3) == 1);
  CHECK(symmetric_residue(2, 4) == 2);
  CHECK(symmetric_residue(-2, 4) == 2);
  CHECK(symmetric_residue(7, 1) == 0);
}

TEST_CASE("rank verdicts") {
  std::vector<long> ks{-2, -1, 0, 1, 2, 3};
  CHECK(rank_verdict(ks, {1, 1, 1, 1, 1, 1}) == "constant");
  CHECK(rank_verdict(ks, {2, 0, 2, 0, 2, 0}) == "periodic, period 2");
  CHECK(rank_verdict(ks, {0, 0, 2, 0, 0, 0}) == "constant 0 with exceptional set {0}");
  CHECK(rank_verdict(ks, {0, 2, 2, 0, 0, 0}) == "constant 0 with exceptional set {-1, 0}");
}

TEST_CASE("rotation by a third is periodic") {
  auto req = bigon_scan_request(bigon_period3_config());
  auto res = dml_scan(req);
  const std::vector<int> expect{2, 0, 0, 2, 0, 0, 2, 0, 0, 2, 0, 0, 2};
  CHECK(res.ranks == expect);
  CHECK(res.verdict == "periodic, period 3");
  for (std::size_t i = 0; i < res.ks.size(); ++i) CHECK(res.oracle[i] == res.ranks[i]);
}

TEST_CASE("irrational rotation is eventually constant") {
  auto req = bigon_scan_request(bigon_irrational_config());
  auto res = dml_scan(req);
  CHECK(res.verdict == "constant 0 with exceptional set {0}");
  CHECK(res.exceptional == std::vector<long>{0});
  for (std::size_t i = 0; i < res.ks.size(); ++i) CHECK(res.oracle[i] == res.ranks[i]);
  REQUIRE(res.novikov[6].has_value());
  CHECK(*res.novikov[6] == 2);
}

TEST_CASE("zero flux gives constant ranks") {
  auto cfg = bigon_basic_config();
  cfg.c1 = cfg.c2 = {Q(0)};
  auto res = dml_scan(bigon_scan_request(cfg));
  CHECK(res.verdict == "constant");
  CHECK(res.exceptional.empty());
  CHECK(res.consistent);
}

TEST_CASE("basic configuration with half steps") {
  auto cfg = bigon_basic_config();
  cfg.step = Q(1, 2);
  auto req = bigon_scan_request(cfg);
  req.k_lo = -4;
  req.k_hi = 4;
  auto res = dml_scan(req);
  for (std::size_t i = 0; i < res.ks.size(); ++i) CHECK(res.oracle[i] == res.ranks[i]);
  CHECK(res.verdict == "periodic, period 2");
}

TEST_CASE("replay determinism and second prime") {
  auto req = bigon_scan_request(bigon_period3_config());
  auto a = dml_scan(req), b = dml_scan(req);
  CHECK(a.digest == b.digest);
  CHECK(a.to_json() == b.to_json());
  req.p2 = 7;
  auto c = dml_scan(req);
  REQUIRE(c.verdict_p2.has_value());
  CHECK(*c.verdict_p2 == c.verdict);
  CHECK(c.digest != a.digest);
  req.p2 = 0;
  req.seed = 2;
  CHECK(dml_scan(req).digest != a.digest);
}

TEST_CASE("per-class constancy off the exceptional set") {
  for (auto cfg : {bigon_basic_config(), bigon_period3_config(), bigon_irrational_config()}) {
    auto res = dml_scan(bigon_scan_request(cfg));
    std::set<long> exc(res.exceptional.begin(), res.exceptional.end());
    for (const auto& cl : res.classes) {
      std::set<int> seen;
      for (long k : cl.ks) {
        const std::size_t i = static_cast<std::size_t>(k - res.ks.front());
        if (!exc.count(k)) seen.insert(res.ranks[i]);
      }
      CHECK(seen.size() <= 1);
      if (cl.bound) CHECK(static_cast<int>(cl.exceptional.size()) <= *cl.bound);
    }
  }
}

TEST_CASE("scans over seeded categories") {
  for (std::uint64_t s = 1; s <= 5; ++s) {
    ScanRequest req;
    req.cat = seeded_category(s);
    req.source = {{"generator", "seeded"}, {"seed", s}};
    req.k_lo = -3;
    req.k_hi = 3;
    auto res = dml_scan(req);
    CHECK(res.radius.n.has_value());
    CHECK(res.verdict == "constant");
    CHECK(res.consistent);
  }
}

TEST_CASE("bad requests") {
  auto req = bigon_scan_request(bigon_basic_config());
  req.Lp = 5;
  CHECK_THROWS_AS(dml_scan(req), DomainError);
  req = bigon_scan_request(bigon_basic_config());
  req.period.reset();
  req.step = Q(1, 5);
  CHECK_THROWS_AS(dml_scan(req), DomainError);
  req = bigon_scan_request(bigon_basic_config());
  req.k_lo = 3;
  req.k_hi = 1;
  CHECK_THROWS_AS(dml_scan(req), DomainError);
}
