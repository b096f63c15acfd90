#include "fluxfam/ainf.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <set>

namespace ff {

QVec DiscTerm::flux(std::size_t pos) const {
  QVec d(arcs.empty() ? 0 : arcs[0].size(), Q(0));
  for (std::size_t i = pos + 1; i < arcs.size(); ++i) d = qvec_add(d, arcs[i]);
  return d;
}

std::vector<QVec> coboundary_arcs(const AinfCategory& c, const std::vector<int>& inputs, int output) {
  const std::size_t k = inputs.size();
  std::vector<QVec> arcs(k + 1);
  auto B = [&](int g) { return c.gens[g].base.empty() ? c.zero_flux() : c.gens[g].base; };
  arcs[0] = qvec_sub(B(inputs[0]), B(output));
  for (std::size_t i = 1; i < k; ++i) arcs[i] = qvec_sub(B(inputs[i]), B(inputs[i - 1]));
  arcs[k] = qvec_sub(B(output), B(inputs[k - 1]));
  return arcs;
}

void AinfCategory::finalize(bool add_units) {
  const int nobj = static_cast<int>(objects.size());
  for (auto& g : gens)
    if (g.base.empty()) g.base = zero_flux();
  unit_.assign(nobj, -1);
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (gens[i].unit) {
      if (gens[i].source != gens[i].target) throw ValidationError("unit " + gens[i].name + " is not an endomorphism");
      unit_[gens[i].source] = static_cast<int>(i);
    }
  if (add_units) {
    for (int x = 0; x < nobj; ++x) {
      if (unit_[x] >= 0) continue;
      Generator e;
      e.name = "e_" + objects[x];
      e.source = e.target = x;
      e.unit = true;
      e.base = zero_flux();
      unit_[x] = static_cast<int>(gens.size());
      gens.push_back(e);
    }
    terms.erase(std::remove_if(terms.begin(), terms.end(), [](const DiscTerm& t) { return t.unit; }), terms.end());
    const Exponent zero(basis);
    for (std::size_t g = 0; g < gens.size(); ++g) {
      const Generator& G = gens[g];
      const int gi = static_cast<int>(g);
      DiscTerm l;
      l.inputs = {unit_[G.source], gi};
      l.output = gi;
      l.coef = 1;
      l.energy = zero;
      l.unit = l.has_flux = true;
      l.arcs = coboundary_arcs(*this, l.inputs, gi);
      terms.push_back(l);
      if (G.unit) continue;
      DiscTerm r = l;
      r.inputs = {gi, unit_[G.target]};
      r.coef = G.degree % 2 ? -1 : 1;
      r.arcs = coboundary_arcs(*this, r.inputs, gi);
      terms.push_back(r);
    }
  }
  hom_.assign(nobj, std::vector<std::vector<int>>(nobj));
  for (std::size_t i = 0; i < gens.size(); ++i) hom_[gens[i].source][gens[i].target].push_back(static_cast<int>(i));
  out_.assign(gens.size(), {});
  in_.clear();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    out_[terms[i].output].push_back(static_cast<int>(i));
    in_[terms[i].inputs].push_back(static_cast<int>(i));
  }
}

int AinfCategory::object(const std::string& name) const {
  for (std::size_t i = 0; i < objects.size(); ++i)
    if (objects[i] == name) return static_cast<int>(i);
  throw DomainError("unknown object " + name);
}

int AinfCategory::gen(const std::string& name) const {
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (gens[i].name == name) return static_cast<int>(i);
  throw DomainError("unknown generator " + name);
}

const std::vector<int>& AinfCategory::hom(int s, int t) const { return hom_.at(s).at(t); }
const std::vector<int>& AinfCategory::terms_out(int g) const { return out_.at(g); }

const std::vector<int>& AinfCategory::terms_in(const std::vector<int>& inputs) const {
  static const std::vector<int> none;
  auto it = in_.find(inputs);
  return it == in_.end() ? none : it->second;
}

Exponent AinfCategory::alpha(const QVec& v) const {
  Exponent a(basis);
  for (std::size_t i = 0; i < flux_rank; ++i)
    if (v[i] != 0) a = a + flux_form[i] * v[i];
  return a;
}

bool AinfCategory::flux_free() const {
  for (const auto& t : terms)
    for (const auto& a : t.arcs)
      if (!is_zero(a)) return false;
  return true;
}

// ------------------------------------------------------------- validation

json AinfReport::to_json() const {
  json f = json::array();
  for (const auto& x : failures)
    f.push_back({{"inputs", x.inputs},
                 {"output", x.output},
                 {"residue", x.residue},
                 {"valuation", x.valuation ? json(x.valuation->str()) : json(nullptr)}});
  return {{"pass", pass}, {"instances", instances}, {"failures", f}};
}

AinfReport validate_ainf(const AinfCategory& c, const Exponent& emax, int arity_cap) {
  std::map<std::pair<std::vector<int>, int>, NovikovSeries> acc;
  AinfReport rep;
  for (const auto& o : c.terms) {
    if (static_cast<int>(o.arity()) > arity_cap) continue;
    int sign_exp = 0;
    for (std::size_t s = 0; s < o.arity(); ++s) {
      for (int ii : c.terms_out(o.inputs[s])) {
        const DiscTerm& in = c.terms[ii];
        if (static_cast<int>(in.arity()) > arity_cap) continue;
        std::vector<int> word(o.inputs.begin(), o.inputs.begin() + s);
        word.insert(word.end(), in.inputs.begin(), in.inputs.end());
        word.insert(word.end(), o.inputs.begin() + s + 1, o.inputs.end());
        Q coef = o.coef * in.coef * (sign_exp % 2 ? -1 : 1);
        auto mono = NovikovSeries::monomial(coef, o.energy + in.energy, emax);
        auto key = std::make_pair(word, o.output);
        auto it = acc.find(key);
        if (it == acc.end())
          acc.emplace(key, mono);
        else
          it->second = it->second + mono;
        ++rep.instances;
      }
      sign_exp += c.gens[o.inputs[s]].degree - 1;
    }
  }
  for (const auto& [key, v] : acc) {
    if (v.is_zero()) continue;
    rep.pass = false;
    RelationFailure f;
    for (int g : key.first) f.inputs.push_back(c.gens[g].name);
    f.output = c.gens[key.second].name;
    f.residue = v.str();
    f.valuation = v.valuation();
    rep.failures.push_back(f);
  }
  return rep;
}

AinfReport validate_ainf(const AinfCategory& c) { return validate_ainf(c, c.emax, c.arity_cap); }

std::optional<Exponent> check_energy_positivity(const AinfCategory& c) {
  std::optional<Exponent> best;
  for (const auto& t : c.terms) {
    if (t.unit || t.morse) continue;
    int s;
    try {
      s = t.energy.sign();
    } catch (const PrecisionError&) {
      throw ValidationError("term into " + c.gens[t.output].name + " has sign-ambiguous energy " + t.energy.str());
    }
    if (s <= 0) throw ValidationError("term into " + c.gens[t.output].name + " has non-positive energy " + t.energy.str());
    if (!best || compare(t.energy, *best) < 0) best = t.energy;
  }
  return best;
}

void check_degrees(const AinfCategory& c) {
  for (const auto& t : c.terms) {
    int d = 2 - static_cast<int>(t.arity());
    for (int g : t.inputs) d += c.gens[g].degree;
    if (((d - c.gens[t.output].degree) % 2 + 2) % 2 != 0)
      throw ValidationError("degree mismatch in term into " + c.gens[t.output].name);
    for (std::size_t i = 0; i + 1 < t.arity(); ++i)
      if (c.gens[t.inputs[i]].target != c.gens[t.inputs[i + 1]].source)
        throw ValidationError("inputs of term into " + c.gens[t.output].name + " are not composable");
    if (c.gens[t.inputs.front()].source != c.gens[t.output].source ||
        c.gens[t.inputs.back()].target != c.gens[t.output].target)
      throw ValidationError("endpoints of term into " + c.gens[t.output].name + " do not match");
  }
}

int bar_length_bound(const AinfCategory& c) {
  auto d = check_energy_positivity(c);
  if (!d) return 0;
  Interval e = c.emax.interval(ExponentBasis::kMaxLevel), m = d->interval(ExponentBasis::kMaxLevel);
  return static_cast<int>(ceil_q(e.hi / m.lo).get_si());
}

// ------------------------------------------------------------------- json

namespace {

QVec parse_vec(const json& j) {
  QVec v;
  for (const auto& x : j) v.push_back(x.is_string() ? parse_q(x.get<std::string>()) : Q(x.get<long>()));
  return v;
}

json vec_json(const QVec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(q_str(x));
  return a;
}

std::vector<QVec> parse_fluxes(const json& f, std::size_t k, std::size_t b) {
  auto fit = [&](QVec v) {
    if (v.size() != b) throw ValidationError("flux vector has wrong length");
    return v;
  };
  if (f.contains("arcs")) {
    std::vector<QVec> arcs;
    for (const auto& a : f.at("arcs")) arcs.push_back(fit(parse_vec(a)));
    if (arcs.size() != k + 1) throw ValidationError("arcs must have arity + 1 entries");
    QVec s(b, Q(0));
    for (const auto& a : arcs) s = qvec_add(s, a);
    if (!is_zero(s)) throw ValidationError("arcs do not sum to zero");
    return arcs;
  }
  if (k == 1 && f.contains("dh")) {
    QVec d = fit(parse_vec(f.at("dh")));
    return {qvec_scale(d, Q(-1)), d};
  }
  if (k == 2 && f.contains("d1") && f.contains("d2")) {
    QVec d1 = fit(parse_vec(f.at("d1"))), d2 = fit(parse_vec(f.at("d2")));
    return {qvec_scale(d1, Q(-1)), qvec_sub(d1, d2), d2};
  }
  throw ValidationError("flux data must give arcs, dh (arity 1) or d1/d2 (arity 2)");
}

}  // namespace

AinfCategory parse_category(const json& doc) {
  AinfCategory c;
  c.basis = ExponentBasis::from_json(doc.at("basis"));
  const std::size_t nb = c.basis->size();
  for (const auto& o : doc.at("objects")) c.objects.push_back(o.get<std::string>());
  std::set<std::string> names;
  for (const auto& h : doc.value("homs", json::array())) {
    int s = c.object(h.at("source").get<std::string>()), t = c.object(h.at("target").get<std::string>());
    for (const auto& g : h.at("generators")) {
      Generator G;
      G.name = g.at("name").get<std::string>();
      if (!names.insert(G.name).second) throw ValidationError("duplicate generator " + G.name);
      G.source = s;
      G.target = t;
      G.degree = ((g.value("degree", 0) % 2) + 2) % 2;
      G.unit = g.value("unit", false);
      G.morse = g.value("morse", false);
      if (g.contains("base")) G.base = parse_vec(g.at("base"));
      c.gens.push_back(G);
    }
  }
  if (doc.contains("flux_form"))
    for (const auto& row : doc.at("flux_form")) c.flux_form.push_back(Exponent(c.basis, parse_vec(row)));
  c.flux_rank = c.flux_form.size();
  for (auto& g : c.gens)
    if (!g.base.empty() && g.base.size() != c.flux_rank) throw ValidationError("base class of " + g.name + " has wrong length");
  c.emax = doc.contains("emax") ? Exponent(c.basis, parse_vec(doc.at("emax"))) : Exponent(c.basis);
  c.arity_cap = doc.value("arity_cap", 4);

  std::map<std::string, QVec> rescale;
  for (const auto& h : doc.value("homs", json::array()))
    for (const auto& g : h.at("generators"))
      if (g.contains("path_rescale")) {
        QVec r = parse_vec(g.at("path_rescale"));
        if (r.size() != nb) throw ValidationError("path_rescale has wrong length");
        // Applied to term energies as x -> T^{g(x)} x; not stored.
        rescale[g.at("name").get<std::string>()] = r;
      }

  c.finalize(doc.value("units", true));
  for (const auto& m : doc.value("mu", json::array())) {
    DiscTerm t;
    for (const auto& n : m.at("inputs")) t.inputs.push_back(c.gen(n.get<std::string>()));
    if (t.inputs.empty()) throw ValidationError("curved term (no inputs) is not supported");
    if (m.contains("arity") && m.at("arity").get<std::size_t>() != t.inputs.size())
      throw ValidationError("arity does not match inputs");
    if (static_cast<int>(t.inputs.size()) > c.arity_cap) throw ValidationError("term exceeds the arity cap");
    t.output = c.gen(m.at("output").get<std::string>());
    t.coef = parse_q(m.value("coefficient", std::string("1")));
    QVec e = parse_vec(m.at("energy_coords"));
    if (e.size() != nb) throw ValidationError("energy_coords has wrong length");
    for (int g : t.inputs)
      if (rescale.count(c.gens[g].name)) e = qvec_add(e, rescale[c.gens[g].name]);
    if (rescale.count(c.gens[t.output].name)) e = qvec_sub(e, rescale[c.gens[t.output].name]);
    t.energy = Exponent(c.basis, e);
    t.morse = m.value("morse", false);
    if (m.contains("fluxes")) {
      t.arcs = parse_fluxes(m.at("fluxes"), t.inputs.size(), c.flux_rank);
      t.has_flux = true;
    } else {
      t.arcs.assign(t.inputs.size() + 1, c.zero_flux());
      t.has_flux = c.flux_rank == 0;
    }
    c.terms.push_back(t);
  }
  c.finalize(false);
  return c;
}

CategoryPtr load_category(const json& doc) {
  auto c = std::make_shared<AinfCategory>(parse_category(doc));
  check_degrees(*c);
  check_energy_positivity(*c);
  auto rep = validate_ainf(*c);
  if (!rep.pass) {
    const auto& f = rep.failures.front();
    std::string in;
    for (const auto& s : f.inputs) in += (in.empty() ? "" : ",") + s;
    throw ValidationError("A-infinity relation fails at (" + in + ") -> " + f.output + ": " + f.residue);
  }
  return c;
}

json serialize(const AinfCategory& c) {
  json homs = json::array();
  for (std::size_t s = 0; s < c.objects.size(); ++s)
    for (std::size_t t = 0; t < c.objects.size(); ++t) {
      json gens = json::array();
      for (int g : c.hom(static_cast<int>(s), static_cast<int>(t))) {
        const Generator& G = c.gens[g];
        json j = {{"name", G.name}, {"degree", G.degree}};
        if (G.unit) j["unit"] = true;
        if (G.morse) j["morse"] = true;
        if (!is_zero(G.base)) j["base"] = vec_json(G.base);
        gens.push_back(j);
      }
      if (!gens.empty()) homs.push_back({{"source", c.objects[s]}, {"target", c.objects[t]}, {"generators", gens}});
    }
  json mu = json::array();
  for (const auto& t : c.terms) {
    if (t.unit) continue;
    json in = json::array();
    for (int g : t.inputs) in.push_back(c.gens[g].name);
    json m = {{"arity", t.arity()},
              {"inputs", in},
              {"output", c.gens[t.output].name},
              {"coefficient", q_str(t.coef)},
              {"energy_coords", t.energy.to_json()}};
    if (t.morse) m["morse"] = true;
    if (t.has_flux && c.flux_rank > 0) {
      json arcs = json::array();
      for (const auto& a : t.arcs) arcs.push_back(vec_json(a));
      m["fluxes"] = {{"arcs", arcs}};
    }
    mu.push_back(m);
  }
  json ff = json::array();
  for (const auto& a : c.flux_form) ff.push_back(a.to_json());
  return {{"basis", c.basis->to_json()}, {"objects", c.objects}, {"homs", homs},       {"mu", mu},
          {"flux_form", ff},             {"emax", c.emax.to_json()}, {"arity_cap", c.arity_cap}};
}

std::string sha256_hex(const std::string& s) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int n = 0;
  EVP_Digest(s.data(), s.size(), md, &n, EVP_sha256(), nullptr);
  std::string out;
  char buf[3];
  for (unsigned int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    out += buf;
  }
  return out;
}

std::string category_digest(const AinfCategory& c) { return sha256_hex(serialize(c).dump()); }

}  // namespace ff
