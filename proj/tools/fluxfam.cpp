#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <iostream>
#include <sstream>

#include "fluxfam/monoid.hpp"
#include "fluxfam/scan.hpp"

using namespace ff;

namespace {

struct Options {
  std::string source;
  std::string L = "0", Lp = "1";
  std::string mode = "monotone";
  long p = 5, p2 = 0;
  int N = 12, D = 24, lmax = 2, max_n = 2;
  std::string emax, step, f = "0", f2 = "0", k_range = "-6..6";
  std::uint64_t seed = 1;
  std::string json_out;
};

// A category source is a document path or one of the built-in bigons.
struct Source {
  CategoryPtr cat;
  std::optional<BigonConfig> bigon;
  json echo;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

json emax_coords(const BasisPtr& b, const Q& e) {
  json j = json::array({q_str(e)});
  for (std::size_t i = 1; i < b->size(); ++i) j.push_back("0");
  return j;
}

Source load_source(const Options& o) {
  Source s;
  static const std::map<std::string, BigonConfig (*)()> builtin{
      {"bigon:basic", bigon_basic_config}, {"bigon:period3", bigon_period3_config},
      {"bigon:irrational", bigon_irrational_config}};
  if (auto it = builtin.find(o.source); it != builtin.end()) {
    s.bigon = it->second();
    s.echo = {{"builtin", o.source}};
  } else {
    json doc = read_json(o.source);
    s.echo = {{"document", o.source}};
    if (doc.contains("a1")) {
      s.bigon = BigonConfig::from_json(doc);
    } else {
      if (!o.emax.empty()) doc["emax"] = emax_coords(ExponentBasis::from_json(doc.at("basis")), parse_q(o.emax));
      s.cat = load_category(doc);
    }
  }
  if (s.bigon) {
    if (!o.emax.empty()) s.bigon->emax = Exponent::from_json(s.bigon->basis, emax_coords(s.bigon->basis, parse_q(o.emax)));
    if (!o.step.empty()) s.bigon->step = parse_q(o.step);
    s.cat = bigon_pair(*s.bigon);
    s.echo["config"] = s.bigon->to_json();
  }
  if (!o.emax.empty()) s.echo["emax"] = o.emax;
  return s;
}

int object_index(const AinfCategory& c, const std::string& name) {
  if (!name.empty() && std::all_of(name.begin(), name.end(), ::isdigit)) {
    const int i = std::stoi(name);
    if (i >= static_cast<int>(c.objects.size())) throw DomainError("object index " + name + " out of range");
    return i;
  }
  return c.object(name);
}

EmbedMode parse_mode(const std::string& m) {
  if (m == "monotone") return EmbedMode::Monotone;
  if (m == "generic") return EmbedMode::Generic;
  throw DomainError("mode must be monotone or generic");
}

std::pair<long, long> parse_range(const std::string& r) {
  const auto dots = r.find("..");
  if (dots == std::string::npos) throw DomainError("k range must look like a..b");
  return {std::stol(r.substr(0, dots)), std::stol(r.substr(dots + 2))};
}

void emit(const Options& o, const json& j) {
  if (o.json_out.empty()) return;
  std::ofstream out(o.json_out);
  if (!out) throw DomainError("cannot write " + o.json_out);
  out << j.dump(2) << "\n";
}

std::string ranks_str(const Ranks& r) { return std::to_string(r[0]) + "+" + std::to_string(r[1]); }

template <class R>
void print_complex(const FreeComplex<R>& C) {
  for (std::size_t j = 0; j < C.size(); ++j)
    for (const auto& [i, v] : C.col[j]) std::cout << "  d " << C.label[j] << " -> " << C.label[i] << " : " << rstr(v) << "\n";
}

// ------------------------------------------------------------- subcommands

int cmd_validate(const Options& o) {
  json doc = read_json(o.source);
  AinfCategory c = parse_category(doc);
  auto rep = validate_ainf(c);
  json out = {{"objects", c.objects}, {"generators", c.gens.size()}, {"relations", rep.to_json()}};
  std::cout << "objects: " << c.objects.size() << "  generators: " << c.gens.size()
            << "  relation instances: " << rep.instances << "\n";
  if (!rep.pass) {
    std::cout << "A-infinity relations: FAIL\n";
    for (const auto& f : rep.failures) std::cout << "  output " << f.output << " residue " << f.residue << "\n";
    emit(o, out);
    return 1;
  }
  auto cat = load_category(doc);
  auto delta = check_energy_positivity(*cat);
  out["energy_gap"] = delta ? json(delta->str()) : json(nullptr);
  out["bar_length_bound"] = bar_length_bound(*cat);
  out["digest"] = category_digest(*cat);
  std::cout << "A-infinity relations: pass\n"
            << "energy gap: " << (delta ? delta->str() : std::string("none")) << "\n"
            << "bar length bound: " << bar_length_bound(*cat) << "\n"
            << "digest: " << category_digest(*cat) << "\n";
  emit(o, out);
  return 0;
}

int cmd_monoid(const Options& o) {
  json doc = read_json(o.source);
  auto b = ExponentBasis::from_json(doc.at("basis"));
  std::vector<FormalReal> xs;
  for (const auto& x : doc.at("reals")) xs.push_back(Exponent::from_json(b, x));
  auto gens = extend_to_free(xs);
  json rep = monoid_report(xs, gens);
  std::cout << "generators:\n";
  for (const auto& g : gens) std::cout << "  " << g.str() << "\n";
  std::cout << "certificates:\n";
  bool all = true;
  for (const auto& c : rep["certificates"]) {
    std::cout << "  " << c["input"].get<std::string>() << " : " << c["certificate"].dump() << "\n";
    all = all && !c["certificate"].is_null();
  }
  emit(o, rep);
  return all && rep["independent"].get<bool>() ? 0 : 1;
}

int cmd_embed(const Options& o) {
  auto s = load_source(o);
  auto e = build_embedding(s.cat->basis, parse_mode(o.mode), o.p, o.N, o.seed);
  json j = e.to_json();
  json img = json::object();
  for (std::size_t i = 0; i < s.cat->basis->size(); ++i) img[s.cat->basis->symbol(i).name] = rstr(e.image(i));
  j["images"] = img;
  std::cout << j.dump(2) << "\n";
  emit(o, j);
  return 0;
}

int cmd_specialize(const Options& o) {
  auto s = load_source(o);
  const int X = object_index(*s.cat, o.L), Y = object_index(*s.cat, o.Lp);
  const Q f1 = parse_q(o.f), f2 = parse_q(o.f2);
  auto nov = fiber_complex(novikov_point(s.cat, f1, f2), X, Y);
  auto e = build_embedding(s.cat->basis, parse_mode(o.mode), o.p, o.N, o.seed);
  auto pad = fiber_complex(padic_point(s.cat, e, f1, f2), X, Y);
  std::cout << "fiber " << s.cat->objects[X] << " -> " << s.cat->objects[Y] << " at t = (" << q_str(f1) << ", "
            << q_str(f2) << ")\nNovikov:\n";
  print_complex(nov);
  const Ranks rn = cohomology_rank(nov), rp = cohomology_rank(pad);
  std::cout << "  ranks " << ranks_str(rn) << "\np-adic (p = " << o.p << "):\n";
  print_complex(pad);
  std::cout << "  ranks " << ranks_str(rp) << "\n";
  emit(o, {{"source", s.echo},
           {"f", {q_str(f1), q_str(f2)}},
           {"novikov_ranks", rn},
           {"padic_ranks", rp},
           {"embedding", e.to_json()}});
  return rn == rp ? 0 : 1;
}

int cmd_rank_profile(const Options& o) {
  auto s = load_source(o);
  const int X = object_index(*s.cat, o.L), Y = object_index(*s.cat, o.Lp);
  auto [lo, hi] = parse_range(o.k_range);
  const Q step = s.bigon ? s.bigon->step : (o.step.empty() ? Q(1) : parse_q(o.step));
  auto e = build_embedding(s.cat->basis, parse_mode(o.mode), o.p, o.N, o.seed);
  auto C = fiber_complex(family_padic(s.cat, e, 1, o.D), X, Y);
  std::vector<Q> ts;
  for (long k = lo; k <= hi; ++k) ts.push_back(step * k);
  auto rep = exceptional_report(C, ts);
  std::vector<std::pair<std::string, Ranks>> rows;
  for (const auto& smp : rep.samples) rows.emplace_back(smp.point, smp.ranks);
  std::cout << ranks_table(rows) << "generic ranks: " << ranks_str(rep.generic.cohomology) << "\n"
            << "Strassman bound: " << (rep.generic.bound ? std::to_string(*rep.generic.bound) : std::string("none"))
            << "\nexceptional:";
  for (const auto& x : rep.exceptional) std::cout << " " << x;
  std::cout << "\n";
  emit(o, {{"source", s.echo}, {"report", rep.to_json()}});
  return 0;
}

int cmd_grouplike(const Options& o) {
  auto s = load_source(o);
  auto e = build_embedding(s.cat->basis, parse_mode(o.mode), o.p, o.N, o.seed);
  RadiusRequest rq;
  rq.D = o.D;
  rq.lmax = o.lmax;
  rq.max_n = o.max_n;
  if (s.bigon) rq.pairs = {{0, 1}};
  auto rep = grouplike_radius(s.cat, e, rq);
  const int L = bar_length_bound(*s.cat);
  auto closed = check_closed(grouplike_morphism(family_padic(s.cat, e, 2, o.D)), L);
  std::cout << "closedness at bar length " << L << ": " << (closed.pass ? "pass" : "fail") << " ("
            << closed.failures.size() << " failing tuples)\n"
            << "radius: " << (rep.n ? std::to_string(*rep.n) : std::string("none")) << " (" << rep.mode
            << " mode)\n";
  emit(o, {{"source", s.echo}, {"closedness", closed.to_json()}, {"radius", rep.to_json()}});
  return rep.n ? 0 : 2;
}

int cmd_scan(const Options& o) {
  auto s = load_source(o);
  ScanRequest req = s.bigon ? bigon_scan_request(*s.bigon) : ScanRequest{};
  req.cat = s.cat;
  req.source = s.echo;
  req.L = object_index(*s.cat, o.L);
  req.Lp = object_index(*s.cat, o.Lp);
  if (!s.bigon && !o.step.empty()) req.step = parse_q(o.step);
  if (!s.bigon) req.mode = parse_mode(o.mode);
  req.p = o.p;
  req.p2 = o.p2;
  req.N = o.N;
  req.D = o.D;
  req.lmax = o.lmax;
  req.max_n = o.max_n;
  req.seed = o.seed;
  std::tie(req.k_lo, req.k_hi) = parse_range(o.k_range);
  auto res = dml_scan(req);
  std::cout << res.table();
  for (const auto& n : res.notes) std::cout << "note: " << n << "\n";
  emit(o, res.to_json());
  return res.consistent ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flux-decorated A-infinity families: validation, p-adic families and rank scans"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool source_required = true) {
    auto* opt = sub->add_option("source", o.source, "category document, bigon config, or bigon:basic|period3|irrational");
    if (source_required) opt->required();
    sub->add_option("--json-out", o.json_out, "write the structured report here");
  };
  auto padic = [&](CLI::App* sub) {
    sub->add_option("--p", o.p, "prime")->check(CLI::Range(2L, 1000000L));
    sub->add_option("--N", o.N, "p-adic precision");
    sub->add_option("--D", o.D, "Tate series degree");
    sub->add_option("--seed", o.seed, "embedding seed");
    sub->add_option("--mode", o.mode, "embedding mode: monotone or generic");
    sub->add_option("--emax", o.emax, "energy cutoff (first coordinate)");
  };
  auto objects = [&](CLI::App* sub) {
    sub->add_option("--L", o.L, "source object (name or index)");
    sub->add_option("--Lp", o.Lp, "target object (name or index)");
  };

  auto* validate = app.add_subcommand("validate", "check a category document");
  common(validate);
  auto* monoid = app.add_subcommand("monoid-extend", "free generators for a list of positive reals");
  common(monoid);
  auto* embed = app.add_subcommand("embed", "build a p-adic embedding of the exponent basis");
  common(embed);
  padic(embed);
  auto* spz = app.add_subcommand("specialize", "fiber complex at a parameter value");
  common(spz);
  padic(spz);
  objects(spz);
  spz->add_option("--f", o.f, "first parameter");
  spz->add_option("--f2", o.f2, "second parameter");
  auto* profile = app.add_subcommand("rank-profile", "fiber ranks of the p-adic family along k * step");
  common(profile);
  padic(profile);
  objects(profile);
  profile->add_option("--k-range", o.k_range, "a..b");
  profile->add_option("--step", o.step, "parameter step");
  auto* gl = app.add_subcommand("group-like-check", "closedness and group-like radius");
  common(gl);
  padic(gl);
  gl->add_option("--lmax", o.lmax, "bar length for the radius search");
  gl->add_option("--max-n", o.max_n, "largest radius exponent tried");
  auto* scan = app.add_subcommand("dml-scan", "rank scan over the flow parameter");
  common(scan);
  padic(scan);
  objects(scan);
  scan->add_option("--p2", o.p2, "second prime for the cross-check (0 disables)");
  scan->add_option("--k-range", o.k_range, "a..b");
  scan->add_option("--step", o.step, "parameter step");
  scan->add_option("--lmax", o.lmax, "bar length for the radius search");
  scan->add_option("--max-n", o.max_n, "largest radius exponent tried");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(o);
    if (*monoid) return cmd_monoid(o);
    if (*embed) return cmd_embed(o);
    if (*spz) return cmd_specialize(o);
    if (*profile) return cmd_rank_profile(o);
    if (*gl) return cmd_grouplike(o);
    if (*scan) return cmd_scan(o);
  } catch (const ValidationError& e) {
    std::cerr << "validation failure: " << e.what() << "\n";
    return 1;
  } catch (const PrecisionError& e) {
    std::cerr << "precision insufficient: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "malformed document: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
