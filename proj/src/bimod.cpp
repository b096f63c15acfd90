#include "fluxfam/bimod.hpp"

namespace ff {

namespace {

void require_fluxes(const AinfCategory& c, const char* what) {
  if (c.flux_rank == 0) return;
  for (const auto& t : c.terms)
    if (!t.has_flux) throw DomainError(std::string("missing ") + what + " flux data on a term into " + c.gens[t.output].name);
}

Q slot_value(int slot, const Q& f1, const Q& f2) { return slot == kSlotA ? f1 : slot == kSlotB ? f2 : Q(f1 + f2); }

}  // namespace

json ResidueReport::to_json() const {
  json f = json::array();
  for (const auto& x : failures)
    f.push_back({{"inputs", x.inputs}, {"marks", x.marks}, {"output", x.output}, {"residue", x.residue}});
  return {{"pass", pass}, {"instances", instances}, {"failures", f}};
}

Family<NovikovSeries> diagonal_novikov(CategoryPtr cat) {
  const Exponent cut = cat->emax;
  const NovikovSeries one = NovikovSeries::constant(1, cut);
  return Family<NovikovSeries>(
      cat, [cut](const DiscTerm& t) { return NovikovSeries::monomial(t.coef, t.energy, cut); },
      [one](int, const QVec&) { return one; }, NovikovSeries(cat->basis, cut), "novikov-point",
      {{"category", category_digest(*cat)}, {"point", "diagonal"}});
}

Family<FamilySeries> family_novikov(CategoryPtr cat, Q lo, Q hi) {
  require_fluxes(*cat, "boundary");
  const Exponent cut = cat->emax;
  const BasisPtr b = cat->basis;
  const NovikovSeries one = NovikovSeries::constant(1, cut);
  const AinfCategory* c = cat.get();
  return Family<FamilySeries>(
      cat,
      [cut, b, lo, hi](const DiscTerm& t) {
        return FamilySeries::monomial(NovikovSeries::monomial(t.coef, t.energy, cut), Exponent(b), lo, hi);
      },
      [c, one, lo, hi](int slot, const QVec& d) {
        Exponent a = c->alpha(d);
        return FamilySeries::monomial(one, slot == kSlotH ? a * 2 : a, lo, hi);
      },
      FamilySeries(b, cut, lo, hi), "novikov-family",
      {{"category", category_digest(*cat)}, {"window", {q_str(lo), q_str(hi)}}});
}

Family<NovikovSeries> novikov_point(CategoryPtr cat, const Q& f1, const Q& f2) {
  require_fluxes(*cat, "boundary");
  const Exponent cut = cat->emax;
  const AinfCategory* c = cat.get();
  return Family<NovikovSeries>(
      cat, [cut](const DiscTerm& t) { return NovikovSeries::monomial(t.coef, t.energy, cut); },
      [c, cut, f1, f2](int slot, const QVec& d) {
        return NovikovSeries::monomial(1, c->alpha(d) * slot_value(slot, f1, f2), cut);
      },
      NovikovSeries(cat->basis, cut), "novikov-point",
      {{"category", category_digest(*cat)}, {"point", {q_str(f1), q_str(f2)}}});
}

Family<NovikovSeries> specialize(const Family<FamilySeries>& fam, const Q& f) {
  const FamilySeries& z = fam.zero();
  if (f < z.lo() || f > z.hi()) throw DomainError("point " + q_str(f) + " outside the family window");
  json prov = fam.provenance();
  prov["point"] = q_str(f);
  return base_change<NovikovSeries>(
      fam, [f](const FamilySeries& x) { return ev_at(x, f); }, NovikovSeries(z.basis(), z.cutoff()), "novikov-point",
      prov);
}

Family<TateSeries> family_padic(CategoryPtr cat, const Embedding& e, int nvars, int D) {
  require_fluxes(*cat, "boundary");
  if (!same_basis(cat->basis, e.basis()) && !cat->basis->same(*e.basis()))
    throw DomainError("embedding and category use different exponent bases");
  if (nvars != 1 && nvars != 2) throw DomainError("families have one or two parameters");
  const long p = e.prime();
  const int prec = binom_prec(p, e.precision(), D);
  if (prec < 1) throw PrecisionError("degree " + std::to_string(D) + " leaves no p-adic precision");
  const AinfCategory* c = cat.get();
  return Family<TateSeries>(
      cat,
      [e, p, nvars, D, prec](const DiscTerm& t) {
        return TateSeries::constant(p, nvars, D, prec,
                                    PadicNumber::from_q(p, t.coef, e.precision()) * e.embed_monomial(t.energy));
      },
      [c, e, nvars, D](int slot, const QVec& d) {
        Exponent g = c->alpha(d);
        if (nvars == 1) {
          auto w = e.family_weight(g, D, 1, 0);
          return slot == kSlotH ? w * w : w;
        }
        if (slot == kSlotA) return e.family_weight(g, D, 2, 0);
        if (slot == kSlotB) return e.family_weight(g, D, 2, 1);
        return e.family_weight(g, D, 2, 0) * e.family_weight(g, D, 2, 1);
      },
      TateSeries(p, nvars, D, prec), "tate",
      {{"category", category_digest(*cat)}, {"embedding", e.to_json()}, {"D", D}, {"variables", nvars}});
}

Family<PadicNumber> specialize(const Family<TateSeries>& fam, const PadicNumber& t1,
                               const std::optional<PadicNumber>& t2) {
  const TateSeries& z = fam.zero();
  if (z.nvars() == 2 && !t2) throw DomainError("two-parameter family needs two evaluation points");
  json prov = fam.provenance();
  prov["point"] = t2 ? json{t1.str(), t2->str()} : json(t1.str());
  if (z.nvars() == 1)
    return base_change<PadicNumber>(
        fam, [t1](const TateSeries& x) { return x.eval(t1); }, PadicNumber::exact_zero(z.prime()), "padic-point", prov);
  PadicNumber s2 = *t2;
  return base_change<PadicNumber>(
      fam, [t1, s2](const TateSeries& x) { return x.eval(t1, s2); }, PadicNumber::exact_zero(z.prime()),
      "padic-point", prov);
}

Family<PadicNumber> padic_point(CategoryPtr cat, const Embedding& e, const Q& t1, const Q& t2) {
  require_fluxes(*cat, "boundary");
  const long p = e.prime();
  const AinfCategory* c = cat.get();
  return Family<PadicNumber>(
      cat,
      [e, p](const DiscTerm& t) { return PadicNumber::from_q(p, t.coef, e.precision()) * e.embed_monomial(t.energy); },
      [c, e, t1, t2](int slot, const QVec& d) {
        return binom_exp_at(e.embed_monomial(c->alpha(d)), slot_value(slot, t1, t2));
      },
      PadicNumber::exact_zero(p), "padic-point",
      {{"category", category_digest(*cat)}, {"embedding", e.to_json()}, {"point", {q_str(t1), q_str(t2)}}});
}

Family<PadicNumber> embed_family(const Family<NovikovSeries>& fam, const Embedding& e) {
  json prov = fam.provenance();
  prov["embedding"] = e.to_json();
  return base_change<PadicNumber>(
      fam, [e](const NovikovSeries& x) { return e.embed_novikov(x); }, PadicNumber::exact_zero(e.prime()),
      "padic-point", prov);
}

ModuleTable deformed_yoneda(CategoryPtr cat, int Lp, const Q& f) {
  const auto& c = *cat;
  if (Lp < 0 || Lp >= static_cast<int>(c.objects.size())) throw DomainError("unknown object index");
  ModuleTable tab;
  for (const auto& t : c.terms) {
    if (c.gens[t.output].target != Lp) continue;
    if (!t.has_flux && c.flux_rank > 0) throw DomainError("missing flux on the module boundary");
    auto v = NovikovSeries::monomial(t.coef, t.energy + c.alpha(t.arcs.back()) * f, c.emax);
    auto key = std::make_pair(t.inputs, t.output);
    auto it = tab.find(key);
    if (it == tab.end())
      tab.emplace(key, v);
    else
      it->second = it->second + v;
  }
  return tab;
}

ConvWords conv_words(const AinfCategory& c, int X, int Y, int lmax) {
  ConvWords W;
  const int nobj = static_cast<int>(c.objects.size());
  std::vector<int> cur;
  auto emit = [&](int deg) {
    W.index[cur] = static_cast<int>(W.words.size());
    W.words.push_back(cur);
    W.degree.push_back(((deg % 2) + 2) % 2);
  };
  std::function<void(int, int, int)> bars = [&](int Z, int r, int deg) {
    for (int g : c.hom(Z, Y)) {
      cur.push_back(g);
      emit(deg + c.gens[g].degree);
      cur.pop_back();
    }
    if (r == lmax) return;
    for (int Z2 = 0; Z2 < nobj; ++Z2)
      for (int g : c.hom(Z, Z2)) {
        if (c.gens[g].unit) continue;
        cur.push_back(g);
        bars(Z2, r + 1, deg + c.gens[g].degree - 1);
        cur.pop_back();
      }
  };
  for (int Z = 0; Z < nobj; ++Z)
    for (int g : c.hom(X, Z)) {
      cur = {g};
      bars(Z, 0, c.gens[g].degree);
    }
  return W;
}

std::string word_label(const AinfCategory& c, const std::vector<int>& w) {
  std::string s = c.gens[w.front()].name + " |";
  for (std::size_t i = 1; i + 1 < w.size(); ++i) s += " " + c.gens[w[i]].name;
  return s + " | " + c.gens[w.back()].name;
}

// --------------------------------------------------------- radius search

json RadiusReport::to_json() const {
  return {{"n", n ? json(*n) : json(nullptr)},
          {"mode", mode},
          {"closed", closed},
          {"lmax", lmax},
          {"strassman_bound", bound ? json(*bound) : json(nullptr)},
          {"trials", trials}};
}

std::vector<long> radius_grid(long p, int n) {
  long s = static_cast<long>(ppow(p, n));
  std::vector<long> g;
  for (long k : {0L, 1L, -1L, 2L, -2L, p, -p, p * p, -p * p}) g.push_back(k * s);
  return g;
}

RadiusReport grouplike_radius(CategoryPtr cat, const Embedding& e, const RadiusRequest& req) {
  RadiusReport rep;
  rep.lmax = req.lmax;
  const auto& c = *cat;
  const long p = e.prime();
  auto pairs = req.pairs;
  if (pairs.empty())
    for (int X = 0; X < static_cast<int>(c.objects.size()); ++X)
      for (int Y = 0; Y < static_cast<int>(c.objects.size()); ++Y)
        if (!c.hom(X, Y).empty()) pairs.emplace_back(X, Y);

  auto fam2 = family_padic(cat, e, 2, req.D);
  rep.closed = check_closed(grouplike_morphism(fam2), req.lmax).pass;
  rep.mode = rep.closed ? "cone" : "rank";
  auto fam1 = family_padic(cat, e, 1, req.D);

  for (int n = 0; n <= req.max_n; ++n) {
    json trial = {{"n", n}};
    bool ok = true;
    std::optional<int> bound = 0;
    const auto grid = radius_grid(p, n);
    for (const auto& [X, Y] : pairs) {
      for (long t1 : grid) {
        for (long t2 : grid) {
          auto pt = padic_point(cat, e, Q(t1), Q(t2));
          const bool good = rep.closed ? total(cone_rank(grouplike_morphism(pt), X, Y, req.lmax)) == 0
                                       : conv_rank(pt, X, Y, req.lmax) == cohomology_rank(fiber_complex(pt, X, Y, kSlotH));
          if (!good) {
            ok = false;
            trial["failed_at"] = {c.objects[X], c.objects[Y], t1, t2};
            break;
          }
        }
        if (!ok) break;
      }
      if (!ok) break;
      // Zero count of the target's critical minor on p^n Z_p, as evidence.
      auto restrict = [n](const TateSeries& x) { return x.restrict_radius(n); };
      auto g = generic_rank_tate(fiber_complex(fam1, X, Y, kSlotA).map<TateSeries>(restrict));
      if (!g.bound)
        bound.reset();
      else if (bound)
        bound = std::max(*bound, *g.bound);
    }
    trial["pass"] = ok;
    rep.trials.push_back(trial);
    if (ok) {
      rep.n = n;
      rep.bound = bound;
      break;
    }
  }
  return rep;
}

}  // namespace ff
