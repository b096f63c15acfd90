#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fluxfam/exponents.hpp"

namespace ff {

struct Generator {
  std::string name;
  int source = 0, target = 0;
  int degree = 0;  // mod 2
  bool unit = false;
  bool morse = false;
  QVec base;  // flux class of the chosen base path, length b
};

// One structure-constant term coef * T^energy of mu^k(inputs) -> output, inputs
// in path order (inputs[0] starts at the source object). arcs[i] is the flux
// class of the boundary arc on the i-th object of the path; they sum to zero.
struct DiscTerm {
  std::vector<int> inputs;
  int output = 0;
  Q coef;
  Exponent energy;
  std::vector<QVec> arcs;
  bool morse = false;
  bool unit = false;
  bool has_flux = false;

  std::size_t arity() const { return inputs.size(); }
  // Boundary class from the marked input at position pos to the output.
  QVec flux(std::size_t pos) const;
};

class AinfCategory {
 public:
  BasisPtr basis;
  std::vector<std::string> objects;
  std::vector<Generator> gens;
  std::vector<DiscTerm> terms;  // includes generated unit terms
  std::size_t flux_rank = 0;
  std::vector<Exponent> flux_form;  // alpha(e_i)
  Exponent emax;
  int arity_cap = 4;

  // Adds unit generators/terms and builds indices; call after editing.
  void finalize(bool add_units = true);

  int object(const std::string& name) const;
  int gen(const std::string& name) const;
  int unit(int obj) const { return unit_.at(obj); }
  const std::vector<int>& hom(int s, int t) const;
  const std::vector<int>& terms_out(int g) const;
  const std::vector<int>& terms_in(const std::vector<int>& inputs) const;
  Exponent alpha(const QVec& v) const;
  QVec zero_flux() const { return QVec(flux_rank, Q(0)); }
  bool flux_free() const;
  Exponent cutoff() const { return emax; }

 private:
  std::vector<int> unit_;
  std::vector<std::vector<std::vector<int>>> hom_;
  std::vector<std::vector<int>> out_;
  std::map<std::vector<int>, std::vector<int>> in_;
};

using CategoryPtr = std::shared_ptr<const AinfCategory>;

// Arcs of a term whose flux classes come from base paths only.
std::vector<QVec> coboundary_arcs(const AinfCategory& c, const std::vector<int>& inputs, int output);

struct RelationFailure {
  std::vector<std::string> inputs;
  std::string output;
  std::string residue;
  std::optional<Exponent> valuation;
};

struct AinfReport {
  bool pass = true;
  std::size_t instances = 0;
  std::vector<RelationFailure> failures;
  json to_json() const;
};

AinfReport validate_ainf(const AinfCategory& c, const Exponent& emax, int arity_cap);
AinfReport validate_ainf(const AinfCategory& c);
// Minimal energy over non-unit, non-Morse terms; nullopt when there are none.
std::optional<Exponent> check_energy_positivity(const AinfCategory& c);
void check_degrees(const AinfCategory& c);
int bar_length_bound(const AinfCategory& c);

CategoryPtr load_category(const json& doc);
// Parses without running the validations.
AinfCategory parse_category(const json& doc);
json serialize(const AinfCategory& c);
// Hex SHA-256 of the canonical serialization.
std::string category_digest(const AinfCategory& c);
std::string sha256_hex(const std::string& s);

}  // namespace ff
