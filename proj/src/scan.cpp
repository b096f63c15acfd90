#include "fluxfam/scan.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace ff {

long symmetric_residue(long k, long K) {
  long r = ((k % K) + K) % K;
  return 2 * r > K ? r - K : r;
}

ScanRequest bigon_scan_request(const BigonConfig& cfg) {
  ScanRequest r;
  r.cat = bigon_pair(cfg);
  r.source = {{"generator", "bigon"}, {"config", cfg.to_json()}};
  r.step = cfg.step;
  r.period = flow_period(cfg);
  r.bigon = cfg;
  bool flux_only = true;
  for (const auto& a : cfg.alpha) flux_only = flux_only && a.has_role(Role::Flux) && !a.has_role(Role::Energy);
  r.mode = flux_only && !cfg.alpha.empty() ? EmbedMode::Generic : EmbedMode::Monotone;
  return r;
}

std::string rank_verdict(const std::vector<long>& ks, const std::vector<int>& ranks) {
  const std::size_t n = ranks.size();
  if (n == 0) return "empty";
  if (std::all_of(ranks.begin(), ranks.end(), [&](int r) { return r == ranks[0]; })) return "constant";
  for (std::size_t P = 1; 2 * P <= n; ++P) {
    bool ok = true;
    for (std::size_t i = 0; i + P < n && ok; ++i) ok = ranks[i] == ranks[i + P];
    if (ok) return "periodic, period " + std::to_string(P);
  }
  std::map<int, int> freq;
  for (int r : ranks) ++freq[r];
  int R = ranks[0], best = 0;
  for (const auto& [r, c] : freq)
    if (c > best) {
      best = c;
      R = r;
    }
  std::ostringstream s;
  s << "constant " << R << " with exceptional set {";
  bool first = true;
  for (std::size_t i = 0; i < n; ++i)
    if (ranks[i] != R) {
      s << (first ? "" : ", ") << ks[i];
      first = false;
    }
  s << "}";
  return s.str();
}

namespace {

// Integer representative in [0, p^n) of t in Z_(p).
mpz_class residue_mod(const Q& t, long p, int n) {
  mpz_class m = 1;
  for (int i = 0; i < n; ++i) m *= p;
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), t.get_den().get_mpz_t(), m.get_mpz_t()) == 0 && m != 1)
    throw DomainError("parameter " + q_str(t) + " is not p-integral");
  mpz_class r = m == 1 ? mpz_class(0) : mpz_class((t.get_num() * inv) % m);
  if (r < 0) r += m;
  return r;
}

// One-parameter family on the residue class f_i + p^n Z_p, in the variable s
// with t = f_i + p^n s. The shift by f_i is the deformed-Yoneda weight
// T^{f_i alpha(d)} pushed through the embedding.
Family<TateSeries> class_family(CategoryPtr cat, const Embedding& e, int D, const Q& fi, int n) {
  const long p = e.prime();
  const int prec = binom_prec(p, e.precision(), D);
  if (prec < 1) throw PrecisionError("degree " + std::to_string(D) + " leaves no p-adic precision");
  const Q pn = Q(mpz_class(ppow(p, n)));
  const AinfCategory* c = cat.get();
  return Family<TateSeries>(
      cat,
      [e, p, D, prec](const DiscTerm& t) {
        return TateSeries::constant(p, 1, D, prec, PadicNumber::from_q(p, t.coef, e.precision()) * e.embed_monomial(t.energy));
      },
      [c, e, p, D, prec, fi, pn](int slot, const QVec& d) {
        const Exponent g = c->alpha(d);
        auto shift = TateSeries::constant(p, 1, D, prec, e.embed_monomial(g * fi));
        auto w = shift * e.family_weight(g * pn, D, 1, 0);
        return slot == kSlotH ? w * w : w;
      },
      TateSeries(p, 1, D, prec), "tate-class", {{"class", q_str(fi)}, {"radius", n}});
}

struct PrimeRun {
  std::vector<int> ranks;
  std::vector<ClassReport> classes;
  std::vector<long> exceptional;
  RadiusReport radius;
  int n_used = 0;
  std::vector<std::string> notes;
  bool agree = true;
};

PrimeRun run_prime(const ScanRequest& req, long p, const std::vector<long>& ks, const std::vector<Q>& ts) {
  PrimeRun out;
  const auto& cat = req.cat;
  Embedding e = build_embedding(cat->basis, req.mode, p, req.N, req.seed);
  RadiusRequest rr;
  rr.D = req.D;
  rr.lmax = req.lmax;
  rr.max_n = req.max_n;
  rr.pairs = {{req.L, req.Lp}};
  out.radius = grouplike_radius(cat, e, rr);
  out.n_used = out.radius.n.value_or(0);
  if (!out.radius.n) out.notes.push_back("no group-like radius found up to " + std::to_string(req.max_n) + "; using a single class");
  const int n = out.n_used;
  const Q pn = Q(mpz_class(ppow(p, n)));

  // Group the parameters by residue class mod p^n.
  std::map<mpz_class, std::vector<std::size_t>> cls;
  for (std::size_t i = 0; i < ts.size(); ++i) cls[residue_mod(ts[i], p, n)].push_back(i);
  out.ranks.assign(ts.size(), -1);
  for (const auto& [r, idx] : cls) {
    const Q fi = Q(r);
    auto fam = class_family(cat, e, req.D, fi, n);
    auto C = fiber_complex(fam, req.L, req.Lp, kSlotA);
    std::vector<Q> samples;
    for (std::size_t i : idx) {
      Q s = (ts[i] - fi) / pn;
      samples.push_back(s);
    }
    auto rep = exceptional_report(C, samples);
    ClassReport cr;
    cr.residue = q_str(fi);
    cr.generic = rep.generic.cohomology;
    cr.bound = rep.generic.bound;
    std::set<std::string> exc;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const std::size_t i = idx[j];
      const int rank = total(rep.samples[j].ranks);
      out.ranks[i] = rank;
      cr.ks.push_back(ks[i]);
      if (rank != total(cr.generic)) {
        exc.insert(q_str(ts[i]));
        out.exceptional.push_back(ks[i]);
      }
      // Direct evaluation without the class shift must agree.
      auto pt = padic_point(cat, e, ts[i]);
      const int direct = total(cohomology_rank(fiber_complex(pt, req.L, req.Lp, kSlotA)));
      if (direct != rank) {
        out.agree = false;
        out.notes.push_back("class and direct ranks differ at k=" + std::to_string(ks[i]));
      }
    }
    cr.exceptional.assign(exc.begin(), exc.end());
    if (cr.bound && static_cast<int>(cr.exceptional.size()) > *cr.bound) {
      out.agree = false;
      out.notes.push_back("class " + cr.residue + " has more exceptional parameters than its Strassman bound");
    }
    out.classes.push_back(cr);
  }
  std::sort(out.exceptional.begin(), out.exceptional.end());
  return out;
}

}  // namespace

json ClassReport::to_json() const {
  return {{"residue", residue},
          {"ks", ks},
          {"generic_ranks", generic},
          {"strassman_bound", bound ? json(*bound) : json(nullptr)},
          {"exceptional_parameters", exceptional}};
}

json ScanResult::to_json() const {
  json o = json::array(), nv = json::array(), cl = json::array();
  for (const auto& x : oracle) o.push_back(x ? json(*x) : json(nullptr));
  for (const auto& x : novikov) nv.push_back(x ? json(*x) : json(nullptr));
  for (const auto& c : classes) cl.push_back(c.to_json());
  json j = {{"k", ks},
            {"parameters", params},
            {"ranks", ranks},
            {"oracle", o},
            {"novikov", nv},
            {"verdict", verdict},
            {"exceptional", exceptional},
            {"radius", radius.to_json()},
            {"radius_used", n_used},
            {"classes", cl},
            {"verdict_second_prime", verdict_p2 ? json(*verdict_p2) : json(nullptr)},
            {"consistent", consistent},
            {"notes", notes}};
  if (!digest.empty()) j["digest"] = digest;
  return j;
}

std::string ScanResult::table() const {
  std::ostringstream s;
  s << "     k  parameter   rank  oracle  novikov\n";
  for (std::size_t i = 0; i < ks.size(); ++i) {
    char line[128];
    std::snprintf(line, sizeof line, "%6ld  %-10s  %4d  %6s  %7s\n", ks[i], params[i].c_str(), ranks[i],
                  oracle[i] ? std::to_string(*oracle[i]).c_str() : "-",
                  novikov[i] ? std::to_string(*novikov[i]).c_str() : "-");
    s << line;
  }
  s << "verdict: " << verdict << "\n";
  if (verdict_p2) s << "second prime verdict: " << *verdict_p2 << "\n";
  s << "radius: " << (radius.n ? std::to_string(*radius.n) : std::string("none")) << " (" << radius.mode << " mode)\n";
  s << "digest: " << digest << "\n";
  return s.str();
}

ScanResult dml_scan(const ScanRequest& req) {
  if (!req.cat) throw DomainError("scan request has no category");
  const auto& c = *req.cat;
  const int nobj = static_cast<int>(c.objects.size());
  if (req.L < 0 || req.L >= nobj || req.Lp < 0 || req.Lp >= nobj) throw DomainError("scan objects out of range");
  if (req.k_lo > req.k_hi) throw DomainError("empty k range");
  if (req.mode == EmbedMode::Generic && !c.basis->independence_declared())
    throw DomainError("generic mode needs a basis with declared independence");

  ScanResult res;
  std::vector<Q> ts;
  for (long k = req.k_lo; k <= req.k_hi; ++k) {
    const long kr = req.period ? symmetric_residue(k, *req.period) : k;
    const Q t = req.step * kr;
    if (!p_integral(t, req.p) || (req.p2 && !p_integral(t, req.p2)))
      throw DomainError("parameter " + q_str(t) + " has a denominator divisible by the prime");
    res.ks.push_back(k);
    ts.push_back(t);
    res.params.push_back(q_str(t));
  }

  PrimeRun run = run_prime(req, req.p, res.ks, ts);
  res.ranks = run.ranks;
  res.classes = run.classes;
  res.exceptional = run.exceptional;
  res.radius = run.radius;
  res.n_used = run.n_used;
  res.notes = run.notes;
  res.verdict = rank_verdict(res.ks, res.ranks);

  for (std::size_t i = 0; i < res.ks.size(); ++i) {
    std::optional<int> o, nv;
    if (req.bigon) {
      o = geometric_rank_oracle(*req.bigon, res.ks[i]);
      if (in_window(*req.bigon, ts[i])) {
        auto pt = novikov_point(req.cat, ts[i]);
        nv = total(cohomology_rank(fiber_complex(pt, req.L, req.Lp, kSlotA)));
      }
    }
    if ((o && *o != res.ranks[i]) || (nv && *nv != res.ranks[i])) res.consistent = false;
    res.oracle.push_back(o);
    res.novikov.push_back(nv);
  }
  if (!run.agree) res.consistent = false;

  if (req.p2) {
    PrimeRun second = run_prime(req, req.p2, res.ks, ts);
    res.verdict_p2 = rank_verdict(res.ks, second.ranks);
    if (!second.agree) res.consistent = false;
    if (second.ranks != res.ranks) {
      res.consistent = false;
      res.notes.push_back("ranks differ between the two primes");
    }
  }

  json echo = {{"source", req.source},
               {"category", category_digest(c)},
               {"objects", {c.objects[req.L], c.objects[req.Lp]}},
               {"step", q_str(req.step)},
               {"period", req.period ? json(*req.period) : json(nullptr)},
               {"mode", req.mode == EmbedMode::Monotone ? "monotone" : "generic"},
               {"p", req.p},
               {"p2", req.p2},
               {"N", req.N},
               {"D", req.D},
               {"k_range", {req.k_lo, req.k_hi}},
               {"seed", req.seed},
               {"lmax", req.lmax}};
  res.digest = sha256_hex(json{{"request", echo}, {"result", res.to_json()}}.dump());
  return res;
}

}  // namespace ff
