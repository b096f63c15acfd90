#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "fluxfam/ainf.hpp"
#include "fluxfam/linalg.hpp"
#include "fluxfam/padics.hpp"

namespace ff {

// Parameter attached to a marked boundary point: t1, t2, or t1 + t2.
enum Slot : int { kSlotA = 0, kSlotB = 1, kSlotH = 2 };

struct Mark {
  std::size_t pos;
  int slot;
};

// A category whose structure constants are decorated by a ring-valued energy
// factor and by flux weights attached to marked inputs.
template <class R>
class Family {
 public:
  using BaseFn = std::function<R(const DiscTerm&)>;
  using FluxFn = std::function<R(int, const QVec&)>;

  Family(CategoryPtr cat, BaseFn base, FluxFn flux, R zero, std::string tag, json provenance = json::object())
      : cat_(std::move(cat)), base_(std::move(base)), flux_(std::move(flux)), zero_(std::move(zero)),
        tag_(std::move(tag)), prov_(std::move(provenance)), base_cache_(cat_->terms.size()) {}

  const AinfCategory& cat() const { return *cat_; }
  const CategoryPtr& cat_ptr() const { return cat_; }
  const R& zero() const { return zero_; }
  const std::string& tag() const { return tag_; }
  const json& provenance() const { return prov_; }
  const BaseFn& base_fn() const { return base_; }
  const FluxFn& flux_fn() const { return flux_; }

  const R& base(int term) const {
    auto& c = base_cache_[term];
    if (!c) c = base_(cat_->terms[term]);
    return *c;
  }
  const R& flux(int slot, const QVec& d) const {
    auto key = std::make_pair(slot, d);
    auto it = flux_cache_.find(key);
    if (it == flux_cache_.end()) it = flux_cache_.emplace(key, flux_(slot, d)).first;
    return it->second;
  }
  R weight(int term, const std::vector<Mark>& marks) const {
    R w = base(term);
    const DiscTerm& t = cat_->terms[term];
    for (const auto& m : marks) {
      QVec d = t.flux(m.pos);
      if (!is_zero(d)) w = w * flux(m.slot, d);
    }
    return w;
  }

 private:
  CategoryPtr cat_;
  BaseFn base_;
  FluxFn flux_;
  R zero_;
  std::string tag_;
  json prov_;
  mutable std::vector<std::optional<R>> base_cache_;
  mutable std::map<std::pair<int, QVec>, R> flux_cache_;
};

template <class S, class R, class F>
Family<S> base_change(const Family<R>& fam, F f, S zero, std::string tag, json provenance) {
  auto base = fam.base_fn();
  auto flux = fam.flux_fn();
  return Family<S>(
      fam.cat_ptr(), [base, f](const DiscTerm& t) { return f(base(t)); },
      [flux, f](int s, const QVec& d) { return f(flux(s, d)); }, std::move(zero), std::move(tag),
      std::move(provenance));
}

// ------------------------------------------------------------ constructors

Family<NovikovSeries> diagonal_novikov(CategoryPtr cat);
Family<FamilySeries> family_novikov(CategoryPtr cat, Q lo = -1, Q hi = 1);
Family<NovikovSeries> novikov_point(CategoryPtr cat, const Q& f1, const Q& f2 = 0);
Family<NovikovSeries> specialize(const Family<FamilySeries>& fam, const Q& f);
Family<TateSeries> family_padic(CategoryPtr cat, const Embedding& e, int nvars, int D);
Family<PadicNumber> specialize(const Family<TateSeries>& fam, const PadicNumber& t1,
                               const std::optional<PadicNumber>& t2 = std::nullopt);
Family<PadicNumber> padic_point(CategoryPtr cat, const Embedding& e, const Q& t1, const Q& t2 = 0);
Family<PadicNumber> embed_family(const Family<NovikovSeries>& fam, const Embedding& e);

// Structure constants with one marked input: (inputs, mark position, output).
// Position -1 holds the undecorated constants.
template <class R>
using StructureTable = std::map<std::tuple<std::vector<int>, int, int>, R>;

template <class R>
StructureTable<R> structure_table(const Family<R>& fam, int slot = kSlotA) {
  StructureTable<R> tab;
  auto put = [&](std::tuple<std::vector<int>, int, int> key, const R& v) {
    auto it = tab.find(key);
    if (it == tab.end())
      tab.emplace(std::move(key), v);
    else
      it->second = it->second + v;
  };
  const auto& c = fam.cat();
  for (std::size_t i = 0; i < c.terms.size(); ++i) {
    const auto& t = c.terms[i];
    const int ti = static_cast<int>(i);
    put({t.inputs, -1, t.output}, fam.weight(ti, {}));
    for (std::size_t p = 0; p < t.arity(); ++p) put({t.inputs, static_cast<int>(p), t.output}, fam.weight(ti, {{p, slot}}));
  }
  return tab;
}

// Right Yoneda module of L' deformed by f: terms with output into L' carry the
// weight T^{f alpha(arc on L')}.
using ModuleTable = std::map<std::pair<std::vector<int>, int>, NovikovSeries>;
ModuleTable deformed_yoneda(CategoryPtr cat, int Lp, const Q& f);

// -------------------------------------------------------- relation residues

struct ResidueFailure {
  std::vector<std::string> inputs;
  std::vector<int> marks;
  std::string output;
  std::string residue;
};

struct ResidueReport {
  bool pass = true;
  std::size_t instances = 0;
  std::vector<ResidueFailure> failures;
  json to_json() const;
};

namespace detail {

using Key = std::tuple<std::vector<int>, std::vector<int>, int>;

template <class R>
void accumulate(std::map<Key, R>& acc, Key key, R v) {
  auto it = acc.find(key);
  if (it == acc.end())
    acc.emplace(std::move(key), std::move(v));
  else
    it->second = it->second + v;
}

template <class R>
ResidueReport finish(const AinfCategory& c, const std::map<Key, R>& acc, std::size_t n) {
  ResidueReport rep;
  rep.instances = n;
  for (const auto& [k, v] : acc) {
    if (rzero(v)) continue;
    rep.pass = false;
    ResidueFailure f;
    for (int g : std::get<0>(k)) f.inputs.push_back(c.gens[g].name);
    f.marks = std::get<1>(k);
    f.output = c.gens[std::get<2>(k)].name;
    f.residue = rstr(v);
    rep.failures.push_back(f);
  }
  return rep;
}

// Calls fn(word, s, outer, inner, sign) for every composite of two terms.
template <class F>
void composites(const AinfCategory& c, F fn) {
  for (std::size_t oi = 0; oi < c.terms.size(); ++oi) {
    const auto& o = c.terms[oi];
    int sign_exp = 0;
    for (std::size_t s = 0; s < o.arity(); ++s) {
      for (int ii : c.terms_out(o.inputs[s])) {
        const auto& in = c.terms[ii];
        std::vector<int> word(o.inputs.begin(), o.inputs.begin() + s);
        word.insert(word.end(), in.inputs.begin(), in.inputs.end());
        word.insert(word.end(), o.inputs.begin() + s + 1, o.inputs.end());
        fn(word, s, static_cast<int>(oi), ii, sign_exp % 2 ? -1 : 1);
      }
      sign_exp += c.gens[o.inputs[s]].degree - 1;
    }
  }
}

template <class R>
R signed_(const R& zero, const R& v, int sign) {
  return sign > 0 ? v : zero - v;
}

}  // namespace detail

// Bimodule equations of the family (one marked input, parameter slot A).
template <class R>
ResidueReport check_bimodule(const Family<R>& fam) {
  const auto& c = fam.cat();
  std::map<detail::Key, R> acc;
  std::size_t n = 0;
  detail::composites(c, [&](const std::vector<int>& word, std::size_t s, int oi, int ii, int sign) {
    const std::size_t ki = c.terms[ii].arity();
    for (std::size_t p = 0; p < word.size(); ++p) {
      R w = fam.zero();
      if (p >= s && p < s + ki)
        w = fam.weight(ii, {{p - s, kSlotA}}) * fam.weight(oi, {{s, kSlotA}});
      else
        w = fam.weight(ii, {}) * fam.weight(oi, {{p < s ? p : p - ki + 1, kSlotA}});
      detail::accumulate(acc, {word, {static_cast<int>(p)}, c.terms[oi].output}, detail::signed_(fam.zero(), w, sign));
      ++n;
    }
  });
  return detail::finish(c, acc, n);
}

// A pre-morphism from the two-sided convolution (first factor at slot A,
// second at slot B) to the family at slot H. Components are indexed by the
// term and the two marked positions.
template <class R>
struct PreMorphism {
  Family<R> fam;
  std::function<R(int, std::size_t, std::size_t)> component;
};

template <class R>
PreMorphism<R> grouplike_morphism(const Family<R>& fam) {
  return {fam, [fam](int t, std::size_t a, std::size_t b) { return fam.weight(t, {{a, kSlotA}, {b, kSlotB}}); }};
}

// Closedness residues of the pre-morphism over all composites whose marked
// points enclose at most lmax letters.
template <class R>
ResidueReport check_closed(const PreMorphism<R>& m, int lmax) {
  const auto& fam = m.fam;
  const auto& c = fam.cat();
  std::map<detail::Key, R> acc;
  std::size_t n = 0;
  detail::composites(c, [&](const std::vector<int>& word, std::size_t s, int oi, int ii, int sign) {
    const std::size_t ki = c.terms[ii].arity(), k = word.size();
    auto outer_pos = [&](std::size_t p) { return p < s ? p : p - ki + 1; };
    auto inside = [&](std::size_t p) { return p >= s && p < s + ki; };
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b) {
        if (static_cast<int>(b - a - 1) > lmax) continue;
        R w = fam.zero();
        if (inside(a) && inside(b))
          w = m.component(ii, a - s, b - s) * fam.weight(oi, {{s, kSlotH}});
        else if (inside(a))
          w = fam.weight(ii, {{a - s, kSlotA}}) * m.component(oi, s, outer_pos(b));
        else if (inside(b))
          w = fam.weight(ii, {{b - s, kSlotB}}) * m.component(oi, outer_pos(a), s);
        else
          w = fam.weight(ii, {}) * m.component(oi, outer_pos(a), outer_pos(b));
        detail::accumulate(acc, {word, {static_cast<int>(a), static_cast<int>(b)}, c.terms[oi].output},
                           detail::signed_(fam.zero(), w, sign));
        ++n;
      }
  });
  return detail::finish(c, acc, n);
}

// ------------------------------------------------------------------ fibers

// The free complex fam(X, Y) with differential weighted at the given slot.
template <class R>
FreeComplex<R> fiber_complex(const Family<R>& fam, int X, int Y, int slot = kSlotA) {
  const auto& c = fam.cat();
  FreeComplex<R> C;
  std::map<int, int> pos;
  for (int g : c.hom(X, Y)) pos[g] = C.add_basis(c.gens[g].degree, c.gens[g].name);
  for (int g : c.hom(X, Y))
    for (int t : c.terms_in({g})) C.add(pos.at(c.terms[t].output), pos.at(g), fam.weight(t, {{0, slot}}));
  return C;
}

// Words (m_a, b_1..b_r, m_b) of the reduced bar convolution fam ⊗ fam at (X, Y).
struct ConvWords {
  std::vector<std::vector<int>> words;
  std::map<std::vector<int>, int> index;
  std::vector<int> degree;
};

ConvWords conv_words(const AinfCategory& c, int X, int Y, int lmax);
std::string word_label(const AinfCategory& c, const std::vector<int>& w);

template <class R>
FreeComplex<R> conv_fiber(const Family<R>& fam, int X, int Y, int lmax, ConvWords* words_out = nullptr) {
  const auto& c = fam.cat();
  ConvWords W = conv_words(c, X, Y, lmax);
  FreeComplex<R> C;
  for (std::size_t i = 0; i < W.words.size(); ++i) C.add_basis(W.degree[i], word_label(c, W.words[i]));
  for (std::size_t wi = 0; wi < W.words.size(); ++wi) {
    const auto& w = W.words[wi];
    const std::size_t k = w.size();
    int sign_exp = 0;
    for (std::size_t s = 0; s < k; ++s) {
      for (std::size_t e = s + 1; e <= k; ++e) {
        if (s == 0 && e == k) continue;
        std::vector<int> blockv(w.begin() + s, w.begin() + e);
        for (int t : c.terms_in(blockv)) {
          const int o = c.terms[t].output;
          R v = fam.zero();
          if (s == 0)
            v = fam.weight(t, {{0, kSlotA}});
          else if (e == k)
            v = fam.weight(t, {{e - s - 1, kSlotB}});
          else {
            if (c.gens[o].unit) continue;
            v = fam.weight(t, {});
          }
          std::vector<int> nw(w.begin(), w.begin() + s);
          nw.push_back(o);
          nw.insert(nw.end(), w.begin() + e, w.end());
          C.add(W.index.at(nw), static_cast<int>(wi), detail::signed_(fam.zero(), v, sign_exp % 2 ? -1 : 1));
        }
      }
      sign_exp += c.gens[w[s]].degree - 1;
    }
  }
  if (words_out) *words_out = std::move(W);
  return C;
}

// Cohomology of the convolution at (X, Y) seen through words with at most
// lmax bar letters: the image of H(conv<=lmax) in H(conv<=lmax+1). The top
// layer of a length truncation carries cycles that only die one step up.
template <class R>
Ranks conv_rank(const Family<R>& fam, int X, int Y, int lmax) {
  ConvWords W;
  FreeComplex<R> C = conv_fiber(fam, X, Y, lmax + 1, &W);
  std::vector<bool> sub(W.words.size());
  for (std::size_t i = 0; i < W.words.size(); ++i) sub[i] = static_cast<int>(W.words[i].size()) - 2 <= lmax;
  return persistent_rank(C, sub);
}

// Cone of the pre-morphism at (X, Y): conv[1] ⊕ target.
template <class R>
FreeComplex<R> cone_fiber(const PreMorphism<R>& m, int X, int Y, int lmax) {
  const auto& fam = m.fam;
  const auto& c = fam.cat();
  ConvWords W;
  FreeComplex<R> B = conv_fiber(fam, X, Y, lmax, &W);
  FreeComplex<R> T = fiber_complex(fam, X, Y, kSlotH);
  FreeComplex<R> C;
  for (std::size_t i = 0; i < B.size(); ++i) C.add_basis(B.degree[i] + 1, "B:" + B.label[i]);
  const int off = static_cast<int>(B.size());
  for (std::size_t i = 0; i < T.size(); ++i) C.add_basis(T.degree[i], "M:" + T.label[i]);
  for (std::size_t j = 0; j < B.size(); ++j)
    for (const auto& [i, v] : B.col[j]) C.add(i, static_cast<int>(j), v);
  for (std::size_t j = 0; j < T.size(); ++j)
    for (const auto& [i, v] : T.col[j]) C.add(off + i, off + static_cast<int>(j), v);
  std::map<int, int> tpos;
  for (std::size_t i = 0; i < T.size(); ++i) tpos[c.hom(X, Y)[i]] = static_cast<int>(i);
  for (std::size_t wi = 0; wi < W.words.size(); ++wi) {
    const auto& w = W.words[wi];
    for (int t : c.terms_in(w)) {
      R v = m.component(t, 0, w.size() - 1);
      if (!rzero(v)) C.add(off + tpos.at(c.terms[t].output), static_cast<int>(wi), v);
    }
  }
  return C;
}

// Cohomology of the cone through words with at most lmax bar letters, as in
// conv_rank.
template <class R>
Ranks cone_rank(const PreMorphism<R>& m, int X, int Y, int lmax) {
  FreeComplex<R> C = cone_fiber(m, X, Y, lmax + 1);
  ConvWords W = conv_words(m.fam.cat(), X, Y, lmax + 1);
  std::vector<bool> sub(C.size(), true);
  for (std::size_t i = 0; i < W.words.size(); ++i) sub[i] = static_cast<int>(W.words[i].size()) - 2 <= lmax;
  return persistent_rank(C, sub);
}

// -------------------------------------------------------- group-like radius

struct RadiusReport {
  std::optional<int> n;
  std::string mode;  // "cone" when the comparison morphism is closed, else "rank"
  bool closed = false;
  int lmax = 0;
  std::optional<int> bound;  // largest Strassman bound of the target minors at n
  std::vector<json> trials;
  json to_json() const;
};

struct RadiusRequest {
  int D = 24;
  int lmax = 2;
  int max_n = 4;
  std::vector<std::pair<int, int>> pairs;  // empty: all object pairs
};

RadiusReport grouplike_radius(CategoryPtr cat, const Embedding& e, const RadiusRequest& req);

// Sample parameters in p^n Z used by the radius search.
std::vector<long> radius_grid(long p, int n);

}  // namespace ff
