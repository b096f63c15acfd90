#include "fluxfam/rational.hpp"

namespace ff {

Q parse_q(const std::string& s) {
  Q q;
  if (s.empty() || q.set_str(s, 10) != 0) throw DomainError("bad rational literal: '" + s + "'");
  if (q.get_den() == 0) throw DomainError("zero denominator: '" + s + "'");
  q.canonicalize();
  return q;
}

std::string q_str(const Q& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

mpz_class floor_q(const Q& q) {
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

mpz_class ceil_q(const Q& q) {
  mpz_class r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

int vp(const mpz_class& n, long p) {
  if (n == 0) throw DomainError("valuation of zero");
  mpz_class m = abs(n);
  int v = 0;
  while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(p))) {
    m /= p;
    ++v;
  }
  return v;
}

bool p_integral(const Q& q, long p) {
  return !mpz_divisible_ui_p(q.get_den_mpz_t(), static_cast<unsigned long>(p));
}

bool is_zero(const QVec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

QVec qvec_add(const QVec& a, const QVec& b) {
  QVec r(a);
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

QVec qvec_sub(const QVec& a, const QVec& b) {
  QVec r(a);
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return r;
}

QVec qvec_scale(const QVec& a, const Q& s) {
  QVec r(a);
  for (auto& x : r) x *= s;
  return r;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(std::vector<QVec>& m, std::size_t ncols) {
  std::vector<std::size_t> piv;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < m.size(); ++c) {
    std::size_t s = r;
    while (s < m.size() && m[s][c] == 0) ++s;
    if (s == m.size()) continue;
    std::swap(m[r], m[s]);
    Q inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      Q f = m[i][c];
      for (std::size_t j = c; j < ncols; ++j) m[i][j] -= f * m[r][j];
    }
    piv.push_back(c);
    ++r;
  }
  return piv;
}

}  // namespace

int rank_q(std::vector<QVec> rows) {
  if (rows.empty()) return 0;
  return static_cast<int>(rref(rows, rows[0].size()).size());
}

std::vector<QVec> nullspace_q(std::vector<QVec> rows, std::size_t ncols) {
  auto piv = rref(rows, ncols);
  std::vector<bool> is_piv(ncols, false);
  for (auto c : piv) is_piv[c] = true;
  std::vector<QVec> out;
  for (std::size_t f = 0; f < ncols; ++f) {
    if (is_piv[f]) continue;
    QVec v(ncols, Q(0));
    v[f] = 1;
    for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -rows[i][f];
    out.push_back(v);
  }
  return out;
}

bool solve_q(const std::vector<QVec>& cols, const QVec& b, QVec& x) {
  std::size_t n = cols.size(), m = b.size();
  std::vector<QVec> aug(m, QVec(n + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = cols[j][i];
    aug[i][n] = b[i];
  }
  auto piv = rref(aug, n + 1);
  if (!piv.empty() && piv.back() == n) return false;
  x.assign(n, Q(0));
  for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = aug[i][n];
  return true;
}

}  // namespace ff
