#include <cmath>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "toricheights/detail/hull.hpp"
#include "toricheights/ronkin.hpp"

using namespace th;

namespace {

LaurentPolynomial poly(std::size_t n, std::vector<std::pair<Exponent, Rational>> terms) {
  LaurentPolynomial f(n);
  for (auto& [e, c] : terms) f.add_term(e, c);
  return f;
}

// m(1 + x + y) = 3 sqrt(3) / (4 pi) * L(chi_-3, 2), summed directly.
double mahler_1xy() {
  double l = 0;
  for (long k = 1000000; k >= 0; --k) l += 1.0 / std::pow(3.0 * k + 1, 2) - 1.0 / std::pow(3.0 * k + 2, 2);
  return 3 * std::sqrt(3.0) / (4 * M_PI) * l;
}

// m(1 + x + y + z) = 7 zeta(3) / (2 pi^2).
double mahler_1xyz() {
  double z3 = 0;
  for (long k = 200000; k >= 1; --k) z3 += 1.0 / std::pow(static_cast<double>(k), 3);
  return 7 * z3 / (2 * M_PI * M_PI);
}

// Brute-force torus average of -log|f| on a midpoint grid, two variables.
double brute_ronkin2(const LaurentPolynomial& f, double u1, double u2, int res) {
  double acc = 0;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      double a = 2 * M_PI * (i + 0.37) / res, b = 2 * M_PI * (j + 0.61) / res;
      std::vector<std::complex<double>> x{std::polar(std::exp(-u1), a), std::polar(std::exp(-u2), b)};
      acc += -std::log(std::abs(f.evaluate(x)));
    }
  }
  return acc / (static_cast<double>(res) * res);
}

}  // namespace

TEST_CASE("places and orders") {
  CHECK(PlaceQ::parse("inf").is_archimedean());
  CHECK(PlaceQ::parse("7").p() == 7);
  CHECK(PlaceQ::parse("trivial").kind() == PlaceQ::Kind::trivial);
  CHECK_THROWS_AS(PlaceQ::prime(9), Error);
  CHECK_THROWS_AS(PlaceQ::parse("x"), Error);
  CHECK(p_adic_order(make_rational(12, 5), 2) == 2);
  CHECK(p_adic_order(make_rational(12, 5), 5) == -1);
  QuadratureConfig bad;
  bad.batches = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("tropical ronkin examples") {
  auto f = poly(1, {{{0}, 1}, {{1}, 2}});
  auto r2 = tropical_ronkin(f, PlaceQ::prime(2));
  CHECK(r2 == PAConcave::unbounded(1, {{{Rational(0)}, 0}, {{Rational(1)}, 1}}, ValueScale{2}));
  CHECK(std::abs(r2.value({0.0}) - 0.0) < 1e-15);
  CHECK(std::abs(r2.value({-3.0}) - (std::log(2.0) - 3)) < 1e-12);
  auto rt = tropical_ronkin(f, PlaceQ::trivial());
  CHECK(rt == PAConcave::unbounded(1, {{{Rational(0)}, 0}, {{Rational(1)}, 0}}));
  auto g = poly(2, {{{2, -1}, 5}});
  auto r5 = tropical_ronkin(g, PlaceQ::prime(5));
  CHECK(std::abs(r5.value({0.3, 0.7}) - (std::log(5.0) + 0.6 - 0.7)) < 1e-12);
  CHECK_THROWS_AS(tropical_ronkin(f, PlaceQ::archimedean()), Error);
}

TEST_CASE("roof examples") {
  auto f = poly(1, {{{0}, 1}, {{1}, 2}});
  auto r2 = std::get<PAConcave>(ronkin_roof(f, PlaceQ::prime(2)));
  CHECK(r2.domain() == segment({Rational(0)}, {Rational(1)}));
  CHECK(r2.core_value({Rational(1)}) == -1);
  CHECK(r2.core_value({make_rational(1, 3)}) == make_rational(-1, 3));
  auto rt = std::get<PAConcave>(ronkin_roof(f, PlaceQ::trivial()));
  CHECK(rt.is_zero());
  auto ra = std::get<SampledConcave>(ronkin_roof(f, PlaceQ::archimedean()));
  CHECK(ra.domain() == newton_polytope(f));
  CHECK(ra.error() < 5e-3);
  for (double m : {0.0, 0.1, 0.25, 0.5, 0.77, 1.0}) {
    CHECK(std::abs(ra.value({m}) - m * std::log(2.0)) < 5e-3);
  }
  REQUIRE(ra.conjugate());
  CHECK(std::abs(ra.conjugate()->value({0.2}) - std::min(0.2 - std::log(2.0), 0.0)) < 1e-9);
}

TEST_CASE("archimedean ronkin values") {
  auto mono = poly(1, {{{2}, 3}});
  for (double u : {-1.5, 0.0, 2.25}) {
    auto e = arch_ronkin_value(mono, std::vector<double>{u});
    CHECK(std::abs(e.value - (-std::log(3.0) + 2 * u)) < 1e-12);
    CHECK(e.error == 0);
  }
  auto f = poly(1, {{{0}, 1}, {{1}, 2}});
  CHECK(std::abs(arch_ronkin_value(f, std::vector<double>{0.0}).value + std::log(2.0)) < 1e-12);

  auto g = poly(2, {{{0, 0}, 1}, {{1, 0}, 1}, {{0, 1}, 1}});
  auto e = arch_ronkin_value(g, std::vector<double>{0.0, 0.0});
  double oracle = -mahler_1xy();
  CHECK(std::abs(oracle + 0.3230659472) < 1e-9);
  CHECK(std::abs(e.value - oracle) <= e.error + 1e-3);
  CHECK(e.error < 1e-2);

  auto h = poly(3, {{{0, 0, 0}, 1}, {{1, 0, 0}, 1}, {{0, 1, 0}, 1}, {{0, 0, 1}, 1}});
  QuadratureConfig cfg;
  cfg.budget = 4096;
  auto e3 = arch_ronkin_value(h, std::vector<double>{0.0, 0.0, 0.0}, cfg);
  CHECK(std::abs(e3.value + mahler_1xyz()) <= e3.error + 2e-3);
}

TEST_CASE("archimedean ronkin against brute force torus average") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 4; ++trial) {
    auto f = gen::laurent(rng, 2, 3, 1);
    if (f.is_monomial()) continue;
    double u1 = static_cast<double>(rng() % 5) / 4 - 0.5, u2 = static_cast<double>(rng() % 5) / 4 - 0.5;
    auto e = arch_ronkin_value(f, std::vector<double>{u1, u2});
    double b = brute_ronkin2(f, u1, u2, 600);
    CHECK(std::abs(e.value - b) <= e.error + 5e-3);
  }
}

TEST_CASE("ronkin invariants") {
  std::mt19937_64 rng(7);
  QuadratureConfig cfg;
  for (int trial = 0; trial < 6; ++trial) {
    auto f = gen::laurent(rng, 2, 3, 1);
    auto g = gen::laurent(rng, 2, 2, 1);
    // Exact multiplicativity by monomials at every non-archimedean place.
    auto mono = poly(2, {{{1, -1}, make_rational(6, 5)}});
    for (auto v : {PlaceQ::prime(2), PlaceQ::prime(3), PlaceQ::prime(5), PlaceQ::trivial()}) {
      auto lhs = tropical_ronkin(mono * f, v);
      auto rf = tropical_ronkin(f, v);
      auto rm = tropical_ronkin(mono, v);
      for (int k = 0; k < 5; ++k) {
        auto u = gen::point(rng, 2);
        CHECK(lhs.core_value(u) == rf.core_value(u) + rm.core_value(u));
      }
    }
    // Products at the archimedean place.
    std::vector<double> u{static_cast<double>(rng() % 7) / 3 - 1, static_cast<double>(rng() % 7) / 3 - 1};
    auto a = arch_ronkin_value(f * g, u, cfg);
    auto b = arch_ronkin_value(f, u, cfg);
    auto c = arch_ronkin_value(g, u, cfg);
    CHECK(std::abs(a.value - b.value - c.value) <= a.error + b.error + c.error + 2e-3);
    // Concavity along a segment.
    std::vector<double> p{-1.0 + trial * 0.3, 0.5}, q{1.2, -0.7 + trial * 0.2}, mid{(p[0] + q[0]) / 2, (p[1] + q[1]) / 2};
    auto ep = arch_ronkin_value(f, p, cfg), eq = arch_ronkin_value(f, q, cfg), em = arch_ronkin_value(f, mid, cfg);
    CHECK(em.value >= (ep.value + eq.value) / 2 - (ep.error + eq.error + em.error) - 1e-3);
    // Bounded distance at the window boundary.
    double R = ronkin_window(f, 2);
    double maxlog = -1e300;
    for (const auto& [ex, cf] : f.terms()) maxlog = std::max(maxlog, std::log(std::abs(to_double(cf))));
    auto np = newton_polytope(f);
    for (auto w : {std::vector<double>{R, R}, std::vector<double>{-R, R}, std::vector<double>{R, 0}, std::vector<double>{0, -R}}) {
      double psi = 1e300, vertex_bound = 1e300;
      for (const auto& vert : np.vertices()) {
        double s = to_double(vert[0]) * w[0] + to_double(vert[1]) * w[1];
        psi = std::min(psi, s);
        Exponent ex{vert[0].get_num().get_si(), vert[1].get_num().get_si()};
        vertex_bound = std::min(vertex_bound, s - std::log(std::abs(to_double(f.terms().at(ex)))));
      }
      auto e = arch_ronkin_value(f, w, cfg);
      CHECK(e.value >= psi - maxlog - std::log(static_cast<double>(f.terms().size())) - e.error - 1e-9);
      CHECK(e.value <= vertex_bound + e.error + 1e-9);
    }
  }
}

TEST_CASE("trivial place roofs and roof domains") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = gen::laurent(rng, 2, 4, 2);
    LaurentPolynomial signs(2);
    for (const auto& [e, c] : f.terms()) signs.add_term(e, c > 0 ? 1 : -1);
    auto r = std::get<PAConcave>(ronkin_roof(signs, PlaceQ::trivial()));
    CHECK(r.is_zero());
    CHECK(r.domain() == newton_polytope(signs));
    for (auto v : {PlaceQ::prime(2), PlaceQ::prime(3), PlaceQ::trivial()}) {
      auto rv = std::get<PAConcave>(ronkin_roof(f, v));
      CHECK(rv.domain() == newton_polytope(f));
    }
  }
}

TEST_CASE("pushforward examples") {
  auto f = poly(1, {{{0}, 1}, {{1}, 2}});
  auto diag = LinearMapQ::from_rows({{Rational(1)}, {Rational(1)}}, 1);
  std::vector<PlaceQ> places{PlaceQ::prime(2), PlaceQ::trivial(), PlaceQ::archimedean()};
  auto rep = pushforward_check(f, diag, places);
  CHECK(rep.image.terms() == poly(2, {{{0, 0}, 1}, {{1, 1}, 2}}).terms());
  CHECK(rep.ok());
  CHECK(rep.entries[0].roof_checked);

  auto g = poly(2, {{{0, 0}, 3}, {{1, 0}, -1}, {{0, 1}, make_rational(1, 2)}});
  auto rid = pushforward_check(g, LinearMapQ::identity(2), places, {}, 4);
  CHECK(rid.ok());
  auto mono = poly(2, {{{2, -1}, make_rational(5, 4)}});
  auto gam = LinearMapQ::from_rows({{Rational(1), Rational(2)}, {Rational(0), Rational(-1)}, {Rational(3), Rational(1)}}, 2);
  auto rm = pushforward_check(mono, gam, places, {}, 4);
  CHECK(rm.ok());
  for (const auto& e : rm.entries) CHECK(e.max_deviation < 1e-9);
}

TEST_CASE("random pushforwards along injective maps") {
  std::mt19937_64 rng(19);
  std::vector<PlaceQ> places{PlaceQ::prime(2), PlaceQ::prime(3), PlaceQ::trivial()};
  int checked = 0;
  while (checked < 15) {
    auto f = gen::laurent(rng, 2, 3, 2);
    std::vector<RationalVector> rows;
    for (int r = 0; r < 3; ++r) rows.push_back({Rational(static_cast<long>(rng() % 5) - 2), Rational(static_cast<long>(rng() % 5) - 2)});
    auto gam = LinearMapQ::from_rows(rows, 2);
    if (detail::rank(gam.matrix) != 2) continue;
    auto rep = pushforward_check(f, gam, places, {}, 6);
    CHECK(rep.ok());
    ++checked;
  }
}
