#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fluxfam/bimod.hpp"
#include "fluxfam/torus.hpp"

namespace ff {

struct ScanRequest {
  CategoryPtr cat;
  json source;  // description of where the category came from
  int L = 0, Lp = 1;
  Q step = 1;                       // parameter f = k * step
  std::optional<long> period;       // k is reduced to a symmetric residue mod period
  std::optional<BigonConfig> bigon;  // enables the geometric oracle and window
  EmbedMode mode = EmbedMode::Monotone;
  long p = 5, p2 = 0;
  int N = 12, D = 24;
  long k_lo = -6, k_hi = 6;
  std::uint64_t seed = 1;
  int lmax = 2, max_n = 2;
};

ScanRequest bigon_scan_request(const BigonConfig& cfg);

struct ClassReport {
  std::string residue;  // f_i
  std::vector<long> ks;
  Ranks generic{0, 0};
  std::optional<int> bound;
  std::vector<std::string> exceptional;  // evaluated parameters with a rank jump
  json to_json() const;
};

struct ScanResult {
  std::vector<long> ks;
  std::vector<std::string> params;  // evaluated t per k
  std::vector<int> ranks;
  std::vector<std::optional<int>> oracle, novikov;
  std::string verdict;
  std::vector<long> exceptional;
  RadiusReport radius;
  int n_used = 0;
  std::vector<ClassReport> classes;
  std::optional<std::string> verdict_p2;
  bool consistent = true;  // oracle, Novikov, class and second-prime ranks all agree
  std::vector<std::string> notes;
  std::string digest;
  json to_json() const;
  std::string table() const;
};

ScanResult dml_scan(const ScanRequest& req);
std::string rank_verdict(const std::vector<long>& ks, const std::vector<int>& ranks);
// Symmetric representative of k modulo K in (-K/2, K/2].
long symmetric_residue(long k, long K);

}  // namespace ff
