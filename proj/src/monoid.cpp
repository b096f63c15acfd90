#include "fluxfam/monoid.hpp"

#include <functional>

namespace ff {

namespace {

std::vector<QVec> coord_rows(const std::vector<FormalReal>& v) {
  std::vector<QVec> rows;
  for (const auto& x : v) rows.push_back(x.coords());
  return rows;
}

// Largest integer k >= 0 with k * eta < num, where num, eta > 0.
mpz_class largest_below(const FormalReal& num, const FormalReal& eta) {
  Interval a = num.interval(ExponentBasis::kMaxLevel), b = eta.interval(ExponentBasis::kMaxLevel);
  mpz_class k = floor_q(a.lo / b.hi);
  if (k < 0) k = 0;
  while ((num - eta * Q(k + 1)).sign() > 0) ++k;
  while (k > 0 && (num - eta * Q(k)).sign() <= 0) --k;
  return k;
}

// One induction step: ys independent, x = sum c_i ys_i with some c_i > 0.
std::vector<FormalReal> absorb(const std::vector<FormalReal>& ys, const QVec& c) {
  const BasisPtr& B = ys[0].basis();
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < ys.size(); ++i) (c[i] > 0 ? pos : neg).push_back(i);
  FormalReal eta(B);
  for (auto j : neg) eta = eta + ys[j] * Q(-c[j]);

  std::vector<Q> lambda(pos.size(), Q(0));
  if (eta.is_zero()) {
    lambda[0] = 1;
  } else {
    // Smallest denominator d admitting k_h < d * iota_h with sum k_h = d.
    for (long d = 1;; ++d) {
      std::vector<mpz_class> k(pos.size());
      mpz_class total = 0;
      for (std::size_t h = 0; h < pos.size(); ++h) {
        k[h] = largest_below(ys[pos[h]] * (c[pos[h]] * d), eta);
        total += k[h];
      }
      if (total < d) continue;
      for (std::size_t h = pos.size(); h-- > 0 && total > d;) {
        mpz_class cut = std::min(k[h], mpz_class(total - d));
        k[h] -= cut;
        total -= cut;
      }
      for (std::size_t h = 0; h < pos.size(); ++h) lambda[h] = qfrac(k[h], d);
      break;
    }
  }

  mpz_class tau1 = 1, tau2 = 1;
  for (auto h : pos) tau1 *= c[h].get_num();
  for (const auto& l : lambda) tau2 *= l.get_den();
  for (auto j : neg) tau2 *= Q(-c[j]).get_den();

  std::vector<FormalReal> out(ys.size());
  for (std::size_t h = 0; h < pos.size(); ++h)
    out[pos[h]] = (ys[pos[h]] * c[pos[h]] - eta * lambda[h]) * Q(1, tau1);
  for (auto j : neg) out[j] = ys[j] * Q(1, tau1 * tau2);
  for (const auto& g : out)
    if (g.sign() <= 0) throw PrecisionError("non-positive generator " + g.str() + " produced");
  return out;
}

}  // namespace

bool rationally_independent(const std::vector<FormalReal>& gens) {
  if (gens.empty()) return true;
  return rank_q(coord_rows(gens)) == static_cast<int>(gens.size());
}

std::vector<FormalReal> extend_to_free(const std::vector<FormalReal>& xs) {
  for (const auto& x : xs)
    if (x.sign() <= 0) throw DomainError("monoid generator " + x.str() + " is not positive");
  std::vector<FormalReal> ys;
  for (const auto& x : xs) {
    if (!ys.empty() && !same_basis(x.basis(), ys[0].basis())) throw DomainError("generators on different bases");
    QVec c;
    if (ys.empty() || !solve_q(coord_rows(ys), x.coords(), c)) {
      ys.push_back(x);
      continue;
    }
    ys = absorb(ys, c);
  }
  return ys;
}

std::optional<MembershipCertificate> membership(const std::vector<FormalReal>& gens, const FormalReal& x,
                                                int bound) {
  if (gens.empty()) {
    if (x.is_zero()) return MembershipCertificate{};
    return std::nullopt;
  }
  if (rationally_independent(gens)) {
    QVec c;
    if (!solve_q(coord_rows(gens), x.coords(), c)) return std::nullopt;
    MembershipCertificate cert;
    for (const auto& q : c) {
      if (q < 0 || q.get_den() != 1) return std::nullopt;
      cert.coeffs.push_back(q.get_num());
    }
    return cert;
  }
  // Dependent generators: bounded enumeration.
  std::vector<mpz_class> k(gens.size(), 0);
  std::function<bool(std::size_t, FormalReal)> rec = [&](std::size_t i, FormalReal acc) -> bool {
    if (i == gens.size()) return acc == x;
    for (int n = 0; n <= bound; ++n) {
      k[i] = n;
      if (rec(i + 1, acc + gens[i] * Q(n))) return true;
    }
    return false;
  };
  if (rec(0, FormalReal(x.basis()))) return MembershipCertificate{k};
  return std::nullopt;
}

bool replay(const std::vector<FormalReal>& gens, const MembershipCertificate& c, const FormalReal& x) {
  if (c.coeffs.size() != gens.size()) return false;
  FormalReal acc(x.basis());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (c.coeffs[i] < 0) return false;
    acc = acc + gens[i] * Q(c.coeffs[i]);
  }
  return acc == x;
}

GenericityResult genericity_test(const std::vector<std::size_t>& flux, const std::vector<std::size_t>& energy,
                                 const std::vector<QVec>& relations, std::size_t dim) {
  // Columns: flux unit vectors, minus energy unit vectors, minus relations.
  const std::size_t nf = flux.size(), ne = energy.size(), nr = relations.size();
  const std::size_t ncols = nf + ne + nr;
  std::vector<QVec> rows(dim, QVec(ncols, Q(0)));
  for (std::size_t a = 0; a < nf; ++a) rows[flux[a]][a] = 1;
  for (std::size_t a = 0; a < ne; ++a) rows[energy[a]][nf + a] = -1;
  for (std::size_t a = 0; a < nr; ++a)
    for (std::size_t i = 0; i < dim; ++i) rows[i][nf + ne + a] = -relations[a][i];
  const int rank_r = rank_q(relations);
  for (const auto& v : nullspace_q(rows, ncols)) {
    QVec f(dim, Q(0));
    for (std::size_t a = 0; a < nf; ++a) f[flux[a]] = v[a];
    if (is_zero(f)) continue;
    auto with = relations;
    with.push_back(f);
    if (rank_q(with) > rank_r) return {false, f};
  }
  return {true, {}};
}

GenericityResult genericity_test(const ExponentBasis& b) {
  std::vector<std::size_t> flux, energy;
  for (std::size_t i = 0; i < b.size(); ++i) (b.symbol(i).role == Role::Flux ? flux : energy).push_back(i);
  std::vector<QVec> rels;
  for (const auto& r : b.relations()) {
    QVec v = qvec_scale(r.rhs, Q(-1));
    v[b.index(r.symbol)] += 1;
    rels.push_back(v);
  }
  return genericity_test(flux, energy, rels, b.size());
}

json monoid_report(const std::vector<FormalReal>& xs, const std::vector<FormalReal>& gens) {
  json g = json::array(), certs = json::array();
  for (const auto& y : gens) g.push_back({{"coords", y.to_json()}, {"value", y.str()}});
  for (const auto& x : xs) {
    auto c = membership(gens, x);
    json row = {{"input", x.str()}};
    if (c) {
      json k = json::array();
      for (const auto& n : c->coeffs) k.push_back(n.get_str());
      row["certificate"] = k;
    } else {
      row["certificate"] = nullptr;
    }
    certs.push_back(row);
  }
  return {{"generators", g}, {"independent", rationally_independent(gens)}, {"certificates", certs}};
}

}  // namespace ff
