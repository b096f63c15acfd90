#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fluxfam/ainf.hpp"

namespace ff {

// Two circles on the torus cobounding two strips of areas a1, a2 whose
// boundary classes are c1, c2. Rotation by f units moves strip i's area to
// a_i + f alpha(c_i).
struct BigonConfig {
  BasisPtr basis;
  Exponent a1, a2, area;
  QVec c1, c2;
  std::vector<Exponent> alpha;
  Q step = 1;
  Exponent emax;

  static BigonConfig from_json(const json& j);
  json to_json() const;
  void check() const;
  Exponent alpha_of(const QVec& c) const;
};

CategoryPtr bigon_pair(const BigonConfig& cfg);

// True when both strips keep positive area below the total at f.
bool in_window(const BigonConfig& cfg, const Q& f);

int geometric_rank_oracle(const BigonConfig& cfg, long k);
// Smallest K >= 1 with K * step * alpha(c1 - c2) in area * Z; nullopt if none.
std::optional<long> flow_period(const BigonConfig& cfg);

// Built-in configurations.
BigonConfig bigon_basic_config();       // areas 1/4, 3/4, fluxes 0, -1
BigonConfig bigon_period3_config();    // rotation by a third of the area
BigonConfig bigon_irrational_config(); // flux sqrt 2 against integral areas

struct Slope {
  long p, q;  // value p/q; (1:0) is vertical
};

struct LineConfig {
  std::vector<Slope> slopes;
  Q emax = 2;
  std::vector<Q> offsets;  // empty: built-in generic offsets
  std::vector<Q> alpha{Q(1, 2), Q(1, 3)};
};

struct Point2 {
  Q x, y;
};

// Intersection points of lines i and j reduced to [0,1)^2.
std::vector<Point2> line_intersections(const LineConfig& cfg, std::size_t i, std::size_t j);
CategoryPtr torus_lines(const LineConfig& cfg);
std::vector<Q> line_offsets(const LineConfig& cfg);

}  // namespace ff
