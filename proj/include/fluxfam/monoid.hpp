#pragma once

#include <optional>
#include <vector>

#include "fluxfam/exponents.hpp"

namespace ff {

// A real number given by rational coordinates over a basis of positive reals.
using FormalReal = Exponent;

// x = sum coeffs[i] * gens[i], coeffs nonnegative integers.
struct MembershipCertificate {
  std::vector<mpz_class> coeffs;
};

// Replaces a list of positive reals by positive, rationally independent
// generators of a monoid (in the same rational span) containing all of them.
std::vector<FormalReal> extend_to_free(const std::vector<FormalReal>& xs);

bool rationally_independent(const std::vector<FormalReal>& gens);

// Exact solve for independent generators; bounded enumeration otherwise.
std::optional<MembershipCertificate> membership(const std::vector<FormalReal>& gens, const FormalReal& x,
                                                int bound = 16);
bool replay(const std::vector<FormalReal>& gens, const MembershipCertificate& c, const FormalReal& x);

struct GenericityResult {
  bool pass = true;
  QVec witness;  // nonzero flux-span vector equal to an energy-span vector modulo relations
};

// relations: vectors r with sum r_i * value_i = 0.
GenericityResult genericity_test(const std::vector<std::size_t>& flux, const std::vector<std::size_t>& energy,
                                 const std::vector<QVec>& relations, std::size_t dim);
GenericityResult genericity_test(const ExponentBasis& b);

json monoid_report(const std::vector<FormalReal>& xs, const std::vector<FormalReal>& gens);

}  // namespace ff
