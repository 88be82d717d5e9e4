#pragma once

#include <string>

#include "json.hpp"
#include "toricheights/concave.hpp"
#include "toricheights/laurent.hpp"
#include "toricheights/mahler.hpp"
#include "toricheights/ronkin.hpp"
#include "toricheights/toric.hpp"

namespace th::io {

using json = nlohmann::json;

// Rationals: integers, decimal numbers, "p/q" or decimal strings, or [num, den].
Rational rational_from(const json& j);
RationalVector vector_from(const json& j);
json to_json(const Rational& q);
json to_json(const RationalVector& v);

// Reals rounded to 12 significant digits; non-finite values become strings.
json real(double x);
json estimate(double value, double error);
json scaled(const ScaledRational& s);

Polytope polytope_from(const json& j);
json to_json(const Polytope& p);

LaurentPolynomial laurent_from(const json& j);
json to_json(const LaurentPolynomial& f);
// A single polynomial or a list of them.
std::vector<LaurentPolynomial> laurent_list_from(const json& j);

PolyC polyc_from(const json& j);

// PA forms: {"domain", "pieces", "scale"}, {"dim", "pieces"} (unbounded) or
// {"points", "values"} (upper envelope). Sampled: {"grid", "values", "domain"}.
// `domain` fills in a missing domain.
ConcaveFunction concave_from(const json& j, const Polytope* domain = nullptr);
json to_json(const PAConcave& f);
json to_json(const SampledConcave& f);
json to_json(const ConcaveFunction& f);

// {"polytope": P, "roofs": {"inf": f, "2": g}}
ToricDivisorData divisor_from(const json& j);
std::vector<ToricDivisorData> divisors_from(const json& j);
json to_json(const HeightReport& r);

PlaceQ place_from(const json& j);
QuadratureConfig quadrature_from(const json& req, QuadratureConfig base = {});

}  // namespace th::io
