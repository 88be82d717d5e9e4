#include "json_io.hpp"

#include <cmath>

namespace th::io {

namespace {

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail_validation(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::size_t size_from(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail_validation(std::string(what) + " must be a non-negative integer");
  return static_cast<std::size_t>(j.get<long long>());
}

std::vector<double> doubles_from(const json& j) {
  if (!j.is_array()) fail_validation("expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (x.is_number()) {
      out.push_back(x.get<double>());
    } else if (x.is_string()) {
      const auto& s = x.get_ref<const std::string&>();
      out.push_back(s == "nan" ? std::nan("") : s == "inf" ? HUGE_VAL : s == "-inf" ? -HUGE_VAL : to_double(parse_rational(s)));
    } else {
      fail_validation("expected an array of numbers");
    }
  }
  return out;
}

}  // namespace

Rational rational_from(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) return parse_rational(j.dump());
  if (j.is_string()) return parse_rational(j.get_ref<const std::string&>());
  if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
    if (j[1].get<long>() == 0) fail_validation("rational with zero denominator");
    return make_rational(j[0].get<long>(), j[1].get<long>());
  }
  fail_validation("malformed rational: " + j.dump());
}

RationalVector vector_from(const json& j) {
  if (!j.is_array()) fail_validation("expected an array of rationals");
  RationalVector v;
  for (const auto& x : j) v.push_back(rational_from(x));
  return v;
}

json to_json(const Rational& q) { return th::to_string(q); }

json to_json(const RationalVector& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(to_json(q));
  return a;
}

json real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) return 0.0;  // no negative zero
  return std::stod(format_real(x));
}

json estimate(double value, double error) { return json{{"value", real(value)}, {"error", real(error)}}; }

json scaled(const ScaledRational& s) {
  return json{{"coeff", to_json(s.coeff)}, {"log_of", s.scale.log_of}, {"value", real(s.value())}, {"error", 0}};
}

Polytope polytope_from(const json& j) {
  const json& verts = need(j, "vertices");
  if (!verts.is_array() || verts.empty()) fail_validation("polytope needs at least one vertex");
  std::vector<RationalVector> pts;
  for (const auto& v : verts) pts.push_back(vector_from(v));
  std::size_t dim = j.contains("dim") ? size_from(j.at("dim"), "dim") : pts[0].size();
  for (const auto& p : pts) {
    if (p.size() != dim) fail_validation("polytope vertex has the wrong dimension");
  }
  return convex_hull(std::move(pts), dim);
}

json to_json(const Polytope& p) {
  json v = json::array();
  for (const auto& x : p.vertices()) v.push_back(to_json(x));
  return json{{"dim", p.ambient_dim()}, {"vertices", v}};
}

LaurentPolynomial laurent_from(const json& j) {
  std::size_t n = size_from(need(j, "vars"), "vars");
  const json& terms = need(j, "terms");
  if (!terms.is_array()) fail_validation("terms must be an array");
  LaurentPolynomial f(n);
  for (const auto& t : terms) {
    const json& e = need(t, "exp");
    if (!e.is_array() || e.size() != n) fail_validation("term exponent has the wrong length");
    Exponent ex;
    for (const auto& x : e) {
      if (!x.is_number_integer()) fail_validation("exponents must be integers");
      ex.push_back(x.get<std::int64_t>());
    }
    f.add_term(ex, rational_from(need(t, "coef")));
  }
  return f;
}

json to_json(const LaurentPolynomial& f) {
  json terms = json::array();
  for (const auto& [e, c] : f.terms()) terms.push_back(json{{"exp", e}, {"coef", to_json(c)}});
  return json{{"vars", f.n_vars()}, {"terms", terms}};
}

std::vector<LaurentPolynomial> laurent_list_from(const json& j) {
  if (j.is_array()) {
    std::vector<LaurentPolynomial> out;
    for (const auto& x : j) out.push_back(laurent_from(x));
    return out;
  }
  if (j.is_object() && j.contains("polys")) return laurent_list_from(j.at("polys"));
  return {laurent_from(j)};
}

PolyC polyc_from(const json& j) {
  std::size_t n = size_from(need(j, "vars"), "vars");
  std::vector<std::size_t> partition;
  if (j.contains("partition")) {
    for (const auto& x : j.at("partition")) partition.push_back(size_from(x, "partition entry"));
  } else {
    partition.push_back(n);
  }
  std::map<std::vector<int>, ComplexQ> terms;
  for (const auto& t : need(j, "terms")) {
    const json& e = need(t, "exp");
    if (!e.is_array() || e.size() != n) fail_validation("term exponent has the wrong length");
    std::vector<int> ex;
    for (const auto& x : e) {
      if (!x.is_number_integer()) fail_validation("exponents must be integers");
      ex.push_back(x.get<int>());
    }
    const json& c = need(t, "coef");
    ComplexQ z;
    if (c.is_object()) {
      z.re = c.contains("re") ? rational_from(c.at("re")) : Rational(0);
      z.im = c.contains("im") ? rational_from(c.at("im")) : Rational(0);
    } else {
      z.re = rational_from(c);
    }
    ComplexQ& slot = terms[ex];
    slot.re += z.re;
    slot.im += z.im;
  }
  for (auto it = terms.begin(); it != terms.end();) it = it->second.is_zero() ? terms.erase(it) : std::next(it);
  return PolyC(partition, terms);
}

ConcaveFunction concave_from(const json& j, const Polytope* domain) {
  if (!j.is_object()) fail_validation("concave function must be an object");
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    Grid grid;
    grid.lo = doubles_from(need(g, "lo"));
    grid.step = doubles_from(need(g, "step"));
    for (const auto& c : need(g, "count")) grid.count.push_back(size_from(c, "grid count"));
    if (grid.step.size() != grid.lo.size() || grid.count.size() != grid.lo.size()) {
      fail_validation("grid fields have different lengths");
    }
    auto values = doubles_from(need(j, "values"));
    if (values.size() != grid.size()) fail_validation("grid values have the wrong length");
    Polytope dom = j.contains("domain") ? polytope_from(j.at("domain")) : domain ? *domain : box_polytope(grid);
    double lip = j.contains("lipschitz") ? j.at("lipschitz").get<double>() : 0.0;
    double err = j.contains("error") ? j.at("error").get<double>() : 0.0;
    return SampledConcave(grid, std::move(values), dom, lip, err);
  }
  ValueScale scale{j.contains("scale") ? j.at("scale").get<std::uint64_t>() : 0};
  if (j.contains("points")) {
    std::vector<RationalVector> ms;
    for (const auto& m : j.at("points")) ms.push_back(vector_from(m));
    if (ms.empty()) fail_validation("upper envelope needs points");
    auto ts = vector_from(need(j, "values"));
    if (ts.size() != ms.size()) fail_validation("points and values differ in length");
    std::size_t dim = ms[0].size();
    return PAConcave::upper_envelope(std::move(ms), std::move(ts), dim, scale);
  }
  std::vector<AffinePiece> pieces;
  for (const auto& p : need(j, "pieces")) pieces.push_back({vector_from(need(p, "slope")), rational_from(need(p, "const"))});
  if (j.contains("domain")) return PAConcave::on_domain(polytope_from(j.at("domain")), pieces, scale);
  if (domain != nullptr) return PAConcave::on_domain(*domain, pieces, scale);
  std::size_t dim = j.contains("dim") ? size_from(j.at("dim"), "dim") : pieces.empty() ? 0 : pieces[0].slope.size();
  return PAConcave::unbounded(dim, pieces, scale);
}

json to_json(const PAConcave& f) {
  json pieces = json::array();
  for (const auto& p : f.pieces()) pieces.push_back(json{{"slope", to_json(p.slope)}, {"const", to_json(p.constant)}});
  json out{{"dim", f.ambient_dim()}, {"pieces", pieces}, {"scale", f.scale().log_of}};
  if (f.bounded()) {
    out["domain"] = to_json(f.domain());
    json bps = json::array();
    for (std::size_t i = 0; i < f.breakpoint_positions().size(); ++i) {
      bps.push_back(json{{"m", to_json(f.breakpoint_positions()[i])}, {"value", to_json(f.breakpoint_values()[i])}});
    }
    out["breakpoints"] = bps;
  }
  return out;
}

json to_json(const SampledConcave& f) {
  json values = json::array();
  for (double v : f.values()) values.push_back(real(v));
  json lo = json::array(), step = json::array();
  for (std::size_t a = 0; a < f.grid().dim(); ++a) {
    lo.push_back(real(f.grid().lo[a]));
    step.push_back(real(f.grid().step[a]));
  }
  return json{{"grid", {{"lo", lo}, {"step", step}, {"count", f.grid().count}}},
              {"values", values},
              {"domain", to_json(f.domain())},
              {"lipschitz", real(f.lipschitz())},
              {"error", real(f.error())}};
}

json to_json(const ConcaveFunction& f) {
  return std::visit([](const auto& g) { return to_json(g); }, f);
}

PlaceQ place_from(const json& j) {
  if (j.is_number_integer()) return PlaceQ::parse(std::to_string(j.get<long long>()));
  if (j.is_string()) return PlaceQ::parse(j.get_ref<const std::string&>());
  fail_validation("malformed place: " + j.dump());
}

ToricDivisorData divisor_from(const json& j) {
  ToricDivisorData d(polytope_from(need(j, "polytope")));
  if (j.contains("roofs")) {
    const json& roofs = j.at("roofs");
    if (!roofs.is_object()) fail_validation("roofs must map places to functions");
    for (const auto& [key, f] : roofs.items()) d.set_roof(PlaceQ::parse(key), concave_from(f, &d.polytope()));
  }
  return d;
}

std::vector<ToricDivisorData> divisors_from(const json& j) {
  if (j.is_object() && j.contains("divisors")) return divisors_from(j.at("divisors"));
  if (!j.is_array()) fail_validation("divisors must be an array");
  std::vector<ToricDivisorData> out;
  for (const auto& d : j) out.push_back(divisor_from(d));
  return out;
}

json to_json(const HeightReport& r) {
  json cs = json::array();
  for (const auto& c : r.contributions) {
    json e{{"place", c.place.to_string()}, {"value", real(c.value)}, {"error", real(c.error)}};
    if (c.exact) e["exact"] = scaled(*c.exact);
    cs.push_back(e);
  }
  return json{{"contributions", cs}, {"total", real(r.total)}, {"error", real(r.error)}};
}

QuadratureConfig quadrature_from(const json& req, QuadratureConfig base) {
  if (req.contains("budget")) base.budget = size_from(req.at("budget"), "budget");
  if (req.contains("batches")) base.batches = size_from(req.at("batches"), "batches");
  if (req.contains("seed")) {
    if (!req.at("seed").is_number_integer()) fail_validation("seed must be an integer");
    base.seed = req.at("seed").get<std::uint64_t>();
  }
  if (req.contains("max_stderr")) base.max_stderr = req.at("max_stderr").get<double>();
  base.validate();
  return base;
}

}  // namespace th::io
