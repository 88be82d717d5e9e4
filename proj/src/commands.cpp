#include "commands.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "toricheights/heights.hpp"
#include "toricheights/resultants.hpp"

namespace th::io {

namespace {

using Handler = std::function<CommandResult(const json&)>;

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail_validation(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::size_t get_size(const json& req, const char* key, std::size_t fallback) {
  if (!req.contains(key)) return fallback;
  const json& v = req.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) fail_validation(std::string(key) + " must be a non-negative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

std::uint64_t get_seed(const json& req) {
  const json& s = need(req, "seed");
  if (!s.is_number_integer()) fail_validation("seed must be an integer");
  return s.get<std::uint64_t>();
}

std::vector<Integer> integers_from(const json& j) {
  std::vector<Integer> out;
  for (const auto& q : vector_from(j)) {
    if (q.get_den() != 1) fail_validation("expected integers");
    out.push_back(q.get_num());
  }
  return out;
}

// Stochastic commands take the sample budget from "samples" and require a seed.
QuadratureConfig sampling_config(const json& req) {
  QuadratureConfig q = quadrature_from(req);
  q.seed = get_seed(req);
  if (req.contains("samples")) {
    q.budget = get_size(req, "samples", q.budget);
    if (q.budget == 0) fail_validation("samples must be positive");
  }
  return q;
}

json estimate_result(const EstimateResult& e) {
  return json{{"value", real(e.value)}, {"error", real(e.error())}, {"stderr", real(e.stderr_)},
              {"samples", e.samples}, {"seed", e.seed}};
}

// Stochastic commands refuse to run on an implicit seed.
ToricConfig toric_config(const json& req, bool stochastic) {
  ToricConfig c;
  c.quadrature = quadrature_from(req);
  if (stochastic) c.quadrature.seed = get_seed(req);
  if (req.contains("u_step")) c.roof.u_step = req.at("u_step").get<double>();
  if (req.contains("m_step")) c.roof.m_step = req.at("m_step").get<double>();
  if (req.contains("margin")) c.roof.margin = req.at("margin").get<double>();
  if (req.contains("mi_step")) c.mi_step = req.at("mi_step").get<double>();
  return c;
}

// ---------------------------------------------------------------------------

CommandResult poly_mv(const json& req) {
  std::vector<Polytope> ps;
  for (const auto& p : need(req, "polytopes")) ps.push_back(polytope_from(p));
  return {json{{"value", to_json(mixed_volume(ps))}, {"error", 0}}, ""};
}

CommandResult poly_vol(const json& req) {
  return {json{{"value", to_json(volume(polytope_from(need(req, "polytope"))))}, {"error", 0}}, ""};
}

CommandResult poly_newton(const json& req) {
  return {json{{"polytope", to_json(newton_polytope(laurent_from(need(req, "poly"))))}}, ""};
}

NumericConfig numeric_config(const json& req) {
  NumericConfig nc;
  if (req.contains("u_radius")) nc.u_radius = req.at("u_radius").get<double>();
  if (req.contains("u_step")) nc.u_step = req.at("u_step").get<double>();
  if (req.contains("m_step")) nc.m_step = req.at("m_step").get<double>();
  if (!(nc.u_radius > 0 && nc.u_step > 0 && nc.m_step > 0)) fail_validation("grid parameters must be positive");
  return nc;
}

CommandResult cave_mi(const json& req) {
  std::vector<ConcaveFunction> fs;
  for (const auto& f : need(req, "functions")) fs.push_back(concave_from(f));
  auto r = mixed_integral(fs, numeric_config(req));
  json out = estimate(r.estimate.value, r.estimate.error);
  if (r.exact) out["exact"] = scaled(*r.exact);
  return {out, ""};
}

PAConcave pa_from(const json& j) {
  auto f = concave_from(j);
  if (!std::holds_alternative<PAConcave>(f)) fail_validation("expected a piecewise affine function");
  return std::get<PAConcave>(f);
}

CommandResult cave_dual(const json& req) { return {to_json(legendre_dual(pa_from(need(req, "function")))), ""}; }

CommandResult cave_supconv(const json& req) {
  const json& fs = need(req, "functions");
  if (!fs.is_array() || fs.empty()) fail_validation("supconv needs functions");
  PAConcave acc = pa_from(fs[0]);
  for (std::size_t i = 1; i < fs.size(); ++i) acc = sup_convolution(acc, pa_from(fs[i]));
  return {to_json(acc), ""};
}

CommandResult ronkin_eval(const json& req) {
  auto f = laurent_from(need(req, "poly"));
  PlaceQ v = req.contains("place") ? place_from(req.at("place")) : PlaceQ::archimedean();
  auto u = vector_from(need(req, "u"));
  if (u.size() != f.n_vars()) fail_validation("u has the wrong dimension");
  if (v.is_archimedean()) {
    auto e = arch_ronkin_value(f, u, sampling_config(req));
    return {estimate(e.value, e.error), ""};
  }
  std::vector<double> ud;
  for (const auto& x : u) ud.push_back(to_double(x));
  return {estimate(tropical_ronkin(f, v).value(ud), 0.0), ""};
}

CommandResult ronkin_roof(const json& req) {
  auto f = laurent_from(need(req, "poly"));
  PlaceQ v = req.contains("place") ? place_from(req.at("place")) : PlaceQ::archimedean();
  ToricConfig c = toric_config(req, v.is_archimedean());
  auto r = th::ronkin_roof(f, v, c.quadrature, c.roof);
  CommandResult out{json{{"place", v.to_string()}, {"roof", to_json(r)}}, ""};
  std::ostringstream csv;
  if (auto s = std::get_if<SampledConcave>(&r)) {
    for (std::size_t a = 0; a < s->grid().dim(); ++a) csv << "m" << a << ",";
    csv << "value,error\n";
    for (std::size_t k = 0; k < s->grid().size(); ++k) {
      for (double x : s->grid().node(k)) csv << format_real(x) << ",";
      csv << format_real(s->values()[k]) << "," << format_real(s->error()) << "\n";
    }
  } else {
    const auto& p = std::get<PAConcave>(r);
    for (std::size_t a = 0; a < p.ambient_dim(); ++a) csv << "m" << a << ",";
    csv << "value,log_of\n";
    for (std::size_t i = 0; i < p.breakpoint_positions().size(); ++i) {
      for (const auto& x : p.breakpoint_positions()[i]) csv << th::to_string(x) << ",";
      csv << th::to_string(p.breakpoint_values()[i]) << "," << p.scale().log_of << "\n";
    }
  }
  out.csv = csv.str();
  return out;
}

CommandResult ronkin_push(const json& req) {
  auto f = laurent_from(need(req, "poly"));
  std::vector<RationalVector> rows;
  for (const auto& r : need(req, "map")) rows.push_back(vector_from(r));
  auto gamma = LinearMapQ::from_rows(rows, f.n_vars());
  std::vector<PlaceQ> places;
  if (req.contains("places")) {
    for (const auto& p : req.at("places")) places.push_back(place_from(p));
  } else {
    places = {PlaceQ::archimedean(), PlaceQ::trivial()};
  }
  auto rep = pushforward_check(f, gamma, places, quadrature_from(req), get_size(req, "points", 8));
  (void)get_seed(req);
  json entries = json::array();
  for (const auto& e : rep.entries) {
    entries.push_back(json{{"place", e.place.to_string()},
                           {"points", e.points},
                           {"values_ok", e.values_ok},
                           {"roof_checked", e.roof_checked},
                           {"roof_ok", e.roof_ok},
                           {"max_deviation", real(e.max_deviation)},
                           {"error", real(e.max_error)},
                           {"note", e.note}});
  }
  return {json{{"image", to_json(rep.image)}, {"entries", entries}, {"ok", rep.ok()}}, ""};
}

ProjectivePoint point_from(const json& req) {
  ProjectivePoint p;
  p.conductor = req.contains("conductor") ? req.at("conductor").get<std::uint64_t>() : 1;
  if (p.conductor == 0) fail_validation("conductor must be positive");
  for (const auto& c : need(req, "coords")) {
    if (c.is_array()) {
      p.coords.emplace_back(p.conductor, vector_from(c));
    } else {
      p.coords.push_back(Cyclotomic::rational(p.conductor, rational_from(c)));
    }
  }
  return p;
}

CommandResult height_point(const json& req) {
  double target = req.contains("precision") ? req.at("precision").get<double>() : 1e-12;
  auto h = projective_height(point_from(req), target);
  json out{{"height", estimate(h.total(), h.error())},
           {"archimedean", estimate(h.archimedean, h.archimedean_error)},
           {"finite", estimate(h.finite(), 0)},
           {"content", h.content.get_str()},
           {"degree", h.degree},
           {"precision_bits", h.precision_bits},
           {"zero_point", h.is_zero_point}};
  return {out, ""};
}

CommandResult height_tuple(const json& req) {
  auto x = vector_from(need(req, "coords"));
  return {json{{"value", real(height_tuple_Q(x))}, {"error", 0}, {"exp", height_tuple_Q_exp(x).get_str()}}, ""};
}

CommandResult height_axioms(const json& req) {
  std::size_t samples = get_size(req, "samples", 200);
  if (samples == 0) fail_validation("samples must be positive");
  auto rep = gvf_axiom_suite(get_seed(req), samples);
  json axioms = json::array();
  for (const auto& a : rep.axioms) {
    axioms.push_back(json{{"name", a.name}, {"checks", a.checks}, {"failures", a.failures},
                          {"max_violation", real(a.max_violation)}, {"bound", real(a.bound)}, {"ok", a.ok()}});
  }
  return {json{{"axioms", axioms}, {"ok", rep.ok()}}, ""};
}

json form_summary(const MultiForm& r, std::size_t n, double normalizer) {
  double h = form_height(r);
  json groups = json::array();
  for (const auto& g : r.groups()) groups.push_back(json{{"size", g.size}, {"degree", g.degree}});
  return json{{"n", n},
              {"groups", groups},
              {"terms", r.terms().size()},
              {"content", r.content().get_str()},
              {"max_coefficient", r.max_abs_coefficient().get_str()},
              {"height", estimate(h, 0)},
              {"normalized", estimate(h / normalizer, 0)}};
}

CommandResult res_sylvester(const json& req) {
  need(req, "n");
  std::size_t n = get_size(req, "n", 0);
  auto r = sylvester_resultant_form(n);
  double nd = static_cast<double>(n);
  return {form_summary(r, n, n == 0 ? 1.0 : nd * nd), ""};
}

CommandResult res_point(const json& req) {
  auto p = integers_from(need(req, "coords"));
  std::size_t n = get_size(req, "n", 0);
  auto r = point_resultant_form(p, n);
  return {form_summary(r, n, n == 0 ? 1.0 : static_cast<double>(n)), ""};
}

CommandResult res_converge(const json& req) {
  std::string kind = req.contains("case") ? req.at("case").get<std::string>() : "sylvester";
  std::size_t nmax = get_size(req, "nmax", 5);
  ConvergenceTable t;
  if (kind == "sylvester") {
    t = convergence_table_sylvester(nmax);
  } else if (kind == "point") {
    t = convergence_table_point(integers_from(need(req, "coords")), nmax);
  } else {
    fail_validation("case must be 'sylvester' or 'point'");
  }
  json rows = json::array();
  std::ostringstream csv;
  csv << "n,height,normalized,limit,envelope,within\n";
  for (const auto& r : t.rows) {
    rows.push_back(json{{"n", r.n}, {"height", estimate(r.height, 0)}, {"normalized", estimate(r.normalized, 0)},
                        {"limit", real(r.limit)}, {"envelope", real(r.envelope)}, {"within", r.within}});
    csv << r.n << "," << format_real(r.height) << "," << format_real(r.normalized) << "," << format_real(r.limit) << ","
        << format_real(r.envelope) << "," << (r.within ? 1 : 0) << "\n";
  }
  return {json{{"description", t.description}, {"constant", real(t.constant)}, {"rows", rows}, {"ok", t.ok()}}, csv.str()};
}

CommandResult res_veronese(const json& req) {
  auto g = veronese_gap(get_size(req, "r", 0), get_size(req, "n", 0), sampling_config(req));
  return {json{{"observed", estimate(g.observed, 0)},
               {"binomial_bound", real(g.binomial_bound)},
               {"bound", real(g.bound)},
               {"samples", g.samples},
               {"ok", g.ok()}},
          ""};
}

CommandResult mahler_torus(const json& req) {
  return {estimate_result(th::mahler_torus(polyc_from(need(req, "poly")), sampling_config(req))), ""};
}

CommandResult mahler_sphere(const json& req) {
  return {estimate_result(th::mahler_sphere(polyc_from(need(req, "poly")), sampling_config(req))), ""};
}

CommandResult mahler_mixed(const json& req) {
  PolyC p = polyc_from(need(req, "poly"));
  std::vector<std::size_t> partition = p.partition();
  if (req.contains("partition")) {
    partition.clear();
    for (const auto& x : req.at("partition")) partition.push_back(x.get<std::size_t>());
  }
  return {estimate_result(mahler_multisphere(p, partition, sampling_config(req))), ""};
}

CommandResult mahler_exact(const json& req) {
  auto e = mahler_univariate_exact(polyc_from(need(req, "poly")));
  return {estimate(e.value, e.error), ""};
}

CommandResult mahler_bounds(const json& req) {
  std::size_t corpus = get_size(req, "samples", 1000);
  if (corpus == 0) fail_validation("samples must be positive");
  QuadratureConfig q = quadrature_from(req);
  auto rep = bound_suite(corpus, get_seed(req), q);
  json checks = json::array();
  std::ostringstream csv;
  csv << "name,checks,violations,max_ratio\n";
  for (const auto& c : rep.checks) {
    checks.push_back(json{{"name", c.name}, {"checks", c.checks}, {"violations", c.violations},
                          {"max_ratio", real(c.max_ratio)}});
    csv << '"' << c.name << "\"," << c.checks << "," << c.violations << "," << format_real(c.max_ratio) << "\n";
  }
  return {json{{"corpus", rep.corpus}, {"seed", rep.seed}, {"checks", checks}, {"ok", rep.ok()}}, csv.str()};
}

CommandResult toric_height_cmd(const json& req) {
  return {to_json(toric_height(divisors_from(need(req, "divisors")), toric_config(req, false))), ""};
}

CommandResult toric_hyper(const json& req) {
  return {to_json(hypersurface_height(divisors_from(need(req, "divisors")), laurent_from(need(req, "poly")),
                                      toric_config(req, true))),
          ""};
}

CommandResult toric_gualdi(const json& req) {
  auto fs = laurent_list_from(need(req, "polys"));
  auto rep = gualdi_limit(divisors_from(need(req, "divisors")), fs, toric_config(req, !fs.empty()));
  CommandResult out{to_json(rep), ""};
  if (req.contains("tol")) {
    double tol = req.at("tol").get<double>();
    if (!(tol > 0)) fail_validation("tol must be positive");
    out.report["tol"] = real(tol);
    out.target_met = rep.error <= tol;
    out.report["target_met"] = out.target_met;
  }
  return out;
}

CommandResult toric_push(const json& req) {
  PushforwardInstance inst;
  if (req.contains("deltas")) {
    inst.n = get_size(req, "n", 0);
    inst.k = get_size(req, "k", 0);
    for (const auto& d : req.at("deltas")) inst.deltas.push_back(polytope_from(d));
    for (const auto& g : need(req, "functions")) inst.gs.push_back(pa_from(g));
  } else {
    bool simplices = req.contains("simplices") ? req.at("simplices").get<bool>() : true;
    inst = random_pushforward_instance(get_size(req, "n", 2), get_size(req, "k", 1), get_seed(req), simplices);
  }
  auto r = pushforward_reduction_check(inst);
  return {json{{"mv_full", to_json(r.mv_full)},
               {"mv_product", to_json(r.mv_product)},
               {"mi_full", scaled(r.mi_full)},
               {"mi_product", scaled(r.mi_product)},
               {"mv_ok", r.mv_ok()},
               {"mi_ok", r.mi_ok()},
               {"ok", r.ok()}},
          ""};
}

CommandResult toric_experiment(const json& req) {
  auto fs = laurent_list_from(need(req, "polys"));
  // One polynomial in n variables stands for n translates of itself.
  if (fs.size() == 1 && fs[0].n_vars() > 1) fs.assign(fs[0].n_vars(), fs[0]);
  std::vector<std::uint64_t> conductors;
  const json& ns = need(req, "N");
  if (ns.is_array()) {
    for (const auto& x : ns) conductors.push_back(x.get<std::uint64_t>());
  } else {
    conductors.push_back(ns.get<std::uint64_t>());
  }
  std::size_t samples = get_size(req, "samples", 200);
  std::uint64_t seed = get_seed(req);
  double precision = req.contains("precision") ? req.at("precision").get<double>() : 1e-9;
  json out{{"seed", seed}, {"runs", json::array()}};
  std::optional<HeightReport> limit;
  if (!req.contains("limit") || req.at("limit").get<bool>()) {
    // The limit lives on projective space with the canonical O(1).
    const std::size_t n = fs.empty() ? 0 : fs[0].n_vars();
    std::vector<ToricDivisorData> ds;
    if (n + 1 > fs.size()) ds.assign(n + 1 - fs.size(), ToricDivisorData(unit_simplex(n)));
    limit = gualdi_limit(ds, fs, toric_config(req, true));
    out["limit"] = to_json(*limit);
  }
  std::ostringstream csv;
  csv << "N,index,height,error,exponents\n";
  bool any_valid = false;
  for (auto N : conductors) {
    auto rep = torsion_experiment(fs, N, samples, seed, precision);
    rep.limit = limit;
    any_valid = any_valid || !rep.all_degenerate();
    json run{{"N", N},          {"requested", rep.requested}, {"attempts", rep.attempts},
             {"valid", rep.draws.size()}, {"singular", rep.singular}, {"boundary", rep.boundary},
             {"all_degenerate", rep.all_degenerate()}};
    if (!rep.all_degenerate()) {
      run["mean"] = estimate(rep.mean, 3 * rep.stderr_);
      run["min"] = real(rep.min);
      run["max"] = real(rep.max);
      if (limit) run["deviation"] = real(std::abs(rep.mean - limit->total));
    }
    out["runs"].push_back(run);
    for (const auto& d : rep.draws) {
      csv << N << "," << d.index << "," << format_real(d.height) << "," << format_real(d.error) << ",";
      for (std::size_t i = 0; i < d.exponents.size(); ++i) csv << (i ? " " : "") << d.exponents[i];
      csv << "\n";
    }
  }
  CommandResult res{out, csv.str()};
  // Every conductor degenerate means there is nothing to report.
  res.target_met = any_valid;
  return res;
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table{
      {"poly.mv", poly_mv},
      {"poly.vol", poly_vol},
      {"poly.newton", poly_newton},
      {"cave.mi", cave_mi},
      {"cave.dual", cave_dual},
      {"cave.supconv", cave_supconv},
      {"ronkin.eval", ronkin_eval},
      {"ronkin.roof", ronkin_roof},
      {"ronkin.push", ronkin_push},
      {"height.point", height_point},
      {"height.tuple", height_tuple},
      {"height.axioms", height_axioms},
      {"res.sylvester", res_sylvester},
      {"res.point", res_point},
      {"res.converge", res_converge},
      {"res.veronese", res_veronese},
      {"mahler.torus", mahler_torus},
      {"mahler.sphere", mahler_sphere},
      {"mahler.mixed", mahler_mixed},
      {"mahler.exact", mahler_exact},
      {"mahler.bounds", mahler_bounds},
      {"toric.height", toric_height_cmd},
      {"toric.hyper", toric_hyper},
      {"toric.gualdi", toric_gualdi},
      {"toric.push", toric_push},
      {"toric.experiment", toric_experiment},
  };
  return table;
}

}  // namespace

CommandResult run_command(const std::string& op, const json& request) {
  auto it = handlers().find(op);
  if (it == handlers().end()) fail_validation("unknown command '" + op + "'");
  if (!request.is_object()) fail_validation("request must be a JSON object");
  return it->second(request);
}

}  // namespace th::io
