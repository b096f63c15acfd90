#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ff {

using Q = mpq_class;
using QVec = std::vector<Q>;

// Error taxonomy shared by every module. The CLI maps these to exit codes.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct PrecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// n/d in canonical form (the two-argument mpq constructor does not reduce).
inline Q qfrac(const mpz_class& n, const mpz_class& d) {
  Q q(n, d);
  q.canonicalize();
  return q;
}
Q parse_q(const std::string& s);
std::string q_str(const Q& q);

mpz_class floor_q(const Q& q);
mpz_class ceil_q(const Q& q);

// p-adic valuation of a nonzero integer.
int vp(const mpz_class& n, long p);
// True iff the denominator of q is prime to p.
bool p_integral(const Q& q, long p);

bool is_zero(const QVec& v);
QVec qvec_add(const QVec& a, const QVec& b);
QVec qvec_sub(const QVec& a, const QVec& b);
QVec qvec_scale(const QVec& a, const Q& s);

// Exact rank and nullspace over Q (row reduction).
int rank_q(std::vector<QVec> rows);
// Basis of {x : M x = 0} where M is given by rows of length ncols.
std::vector<QVec> nullspace_q(std::vector<QVec> rows, std::size_t ncols);
// Solve M x = b for x (M given by columns); empty optional if inconsistent.
bool solve_q(const std::vector<QVec>& cols, const QVec& b, QVec& x);

}  // namespace ff
