#pragma once

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fluxfam/rational.hpp"

namespace ff {

using json = nlohmann::json;

enum class Role { Energy, Flux };

struct Interval {
  Q lo, hi;
};

// A named real number. `refine` is empty for a fixed enclosure, or "sqrt:<q>"
// when the value is sqrt(q) and the enclosure can be tightened on demand.
struct Symbol {
  std::string name;
  Role role = Role::Energy;
  Q midpoint;
  Q radius;
  std::string refine;
};

// Declares `symbol = sum rhs[i] * x_i`, rhs supported on free symbols only.
struct Relation {
  std::string symbol;
  QVec rhs;
};

class ExponentBasis;
using BasisPtr = std::shared_ptr<const ExponentBasis>;

class ExponentBasis {
 public:
  static constexpr int kMaxLevel = 64;

  static BasisPtr make(std::vector<Symbol> symbols, std::vector<Relation> relations = {});
  static BasisPtr from_json(const json& j);
  json to_json() const;

  std::size_t size() const { return syms_.size(); }
  const Symbol& symbol(std::size_t i) const { return syms_.at(i); }
  std::size_t index(const std::string& name) const;
  bool has(const std::string& name) const;
  bool independence_declared() const { return rels_.empty(); }
  const std::vector<Relation>& relations() const { return rels_; }
  bool dependent(std::size_t i) const { return dep_[i] >= 0; }

  // Substitutes dependent symbols by their declared expressions.
  QVec normalize(QVec c) const;
  // Certified enclosure of symbol i after `level` radius halvings.
  const Interval& enclosure(std::size_t i, int level) const;
  bool exact(std::size_t i) const { return exact_[i]; }
  bool same(const ExponentBasis& o) const;

 private:
  std::vector<Symbol> syms_;
  std::vector<Relation> rels_;
  std::vector<int> dep_;
  std::vector<bool> exact_;
  std::vector<std::vector<Interval>> encl_;
};

bool same_basis(const BasisPtr& a, const BasisPtr& b);

// Formal element of the exponent group: rational coordinates over a basis.
class Exponent {
 public:
  Exponent() = default;
  explicit Exponent(BasisPtr b);
  Exponent(BasisPtr b, QVec coords);
  static Exponent of(BasisPtr b, const std::string& name, const Q& scale = 1);

  const BasisPtr& basis() const { return b_; }
  const QVec& coords() const { return c_; }
  const Q& operator[](std::size_t i) const { return c_[i]; }
  bool is_zero() const { return ff::is_zero(c_); }

  Exponent operator+(const Exponent& o) const;
  Exponent operator-(const Exponent& o) const;
  Exponent operator-() const;
  Exponent operator*(const Q& s) const;
  bool operator==(const Exponent& o) const { return c_ == o.c_; }
  bool operator!=(const Exponent& o) const { return !(*this == o); }
  // Lexicographic order on coordinates; used only for canonical storage.
  bool lex_less(const Exponent& o) const;

  Interval interval(int level = 0) const;
  // Certified sign of the real value; throws PrecisionError when undecidable.
  int sign() const;
  // Denominators prime to p (membership in G_(p)).
  bool in_Gp(long p) const;
  bool has_role(Role r) const;
  bool nonneg_energy() const;

  std::string str() const;
  json to_json() const;
  static Exponent from_json(BasisPtr b, const json& j);

 private:
  BasisPtr b_;
  QVec c_;
};

// Certified comparison of real values: -1, 0, +1.
int compare(const Exponent& a, const Exponent& b);

struct NovTerm {
  Q coef;
  Exponent exp;
};

// Truncated series sum a_k T^{g_k} with exponents in G. Terms are sorted by
// increasing real exponent; zero is the empty list.
class NovikovSeries {
 public:
  NovikovSeries() = default;
  NovikovSeries(BasisPtr b, Exponent cutoff, bool polynomial = true);
  static NovikovSeries monomial(const Q& c, const Exponent& e, const Exponent& cutoff,
                                bool polynomial = true);
  static NovikovSeries constant(const Q& c, const Exponent& cutoff);

  const BasisPtr& basis() const { return b_; }
  const Exponent& cutoff() const { return cut_; }
  bool polynomial() const { return poly_; }
  const std::vector<NovTerm>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  std::optional<Exponent> valuation() const;

  NovikovSeries operator+(const NovikovSeries& o) const;
  NovikovSeries operator-(const NovikovSeries& o) const;
  NovikovSeries operator-() const;
  NovikovSeries operator*(const NovikovSeries& o) const;
  NovikovSeries operator*(const Q& s) const;
  NovikovSeries shift(const Exponent& e) const;  // multiply by T^e
  bool operator==(const NovikovSeries& o) const;

  std::string str() const;
  json to_json() const;
  static NovikovSeries from_json(BasisPtr b, const Exponent& cutoff, const json& j, bool polynomial = true);

 private:
  friend class FamilySeries;
  void normalize(std::vector<NovTerm> raw, bool poly);
  void check_compatible(const NovikovSeries& o) const;
  BasisPtr b_;
  Exponent cut_;
  bool poly_ = true;
  std::vector<NovTerm> t_;
};

enum class RingOp { Add, Mul };
NovikovSeries nov_ring(RingOp kind, const NovikovSeries& a, const NovikovSeries& b);
std::optional<Exponent> nov_val(const NovikovSeries& a);

struct FamTerm {
  NovikovSeries a;
  Exponent r;
};

// Finite sums sum a_r z^r over a window (b, c) with b < 0 < c.
class FamilySeries {
 public:
  FamilySeries() = default;
  FamilySeries(BasisPtr b, Exponent cutoff, Q lo = -1, Q hi = 1);
  static FamilySeries monomial(const NovikovSeries& a, const Exponent& r, Q lo = -1, Q hi = 1);

  const BasisPtr& basis() const { return b_; }
  const Exponent& cutoff() const { return cut_; }
  const Q& lo() const { return lo_; }
  const Q& hi() const { return hi_; }
  const std::vector<FamTerm>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  FamilySeries operator+(const FamilySeries& o) const;
  FamilySeries operator-(const FamilySeries& o) const;
  FamilySeries operator-() const;
  FamilySeries operator*(const FamilySeries& o) const;
  bool operator==(const FamilySeries& o) const;

  json to_json() const;

 private:
  void normalize(std::vector<FamTerm> raw);
  bool relevant(const Exponent& e, const Exponent& r) const;
  BasisPtr b_;
  Exponent cut_;
  Q lo_ = -1, hi_ = 1;
  std::vector<FamTerm> t_;
};

NovikovSeries ev_at(const FamilySeries& f, const Q& a);
// A positive delta with f(T^t) != 0 whenever |t| < delta inside the window.
Q window_nonvanishing(const FamilySeries& f);

}  // namespace ff
