#include <cmath>
#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "toricheights/heights.hpp"
#include "toricheights/toric.hpp"

using namespace th;

namespace {

LaurentPolynomial linear(long a, long b) { return LaurentPolynomial(1, {{{0}, Rational(a)}, {{1}, Rational(b)}}); }

ToricDivisorData canonical(std::size_t n) { return ToricDivisorData(unit_simplex(n)); }

PAConcave linear_roof(const Polytope& p, const RationalVector& slope, std::uint64_t log_of) {
  return PAConcave::on_domain(p, {{slope, Rational(0)}}, ValueScale{log_of});
}

}  // namespace

TEST_CASE("toric heights of PA divisors") {
  auto inf = PlaceQ::archimedean();
  // Canonical metrics have no relevant place.
  auto r0 = toric_height({canonical(2), canonical(2), canonical(2)});
  CHECK(r0.contributions.empty());
  CHECK(r0.total == 0);

  // Two copies of [0,1] with roof m log 2: MI(theta, theta) = 2! * (log 2)/2.
  ToricDivisorData d(unit_simplex(1));
  d.set_roof(inf, linear_roof(unit_simplex(1), {Rational(1)}, 2));
  auto r1 = toric_height({d, d});
  REQUIRE(r1.contributions.size() == 1);
  REQUIRE(r1.contributions[0].exact.has_value());
  CHECK(r1.contributions[0].exact->coeff == 1);
  CHECK(r1.contributions[0].exact->scale.log_of == 2);
  CHECK(r1.total == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(r1.error == 0);

  // Zero roofs are canonical: locality holds bit for bit.
  ToricDivisorData d2 = d;
  d2.set_roof(PlaceQ::prime(5), indicator(unit_simplex(1)));
  d2.set_roof(PlaceQ::trivial(), indicator(unit_simplex(1)));
  CHECK(d2.places().size() == 1);
  CHECK(toric_height({d2, d}).total == r1.total);

  CHECK_THROWS_AS(toric_height({d}), Error);
  CHECK_THROWS_AS(toric_height({canonical(2), canonical(2), canonical(1)}), Error);
  CHECK_THROWS_AS(d2.set_roof(inf, indicator(dilate(unit_simplex(1), Rational(2)))), Error);
}

TEST_CASE("toric height symmetry and linearity") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 12; ++t) {
    std::vector<ToricDivisorData> ds;
    std::vector<PlaceQ> places{PlaceQ::archimedean()};
    for (int i = 0; i < 3; ++i) {
      auto f = gen::pa_function(rng, 2);
      ToricDivisorData d(f.domain());
      d.set_roof(places[0], f);
      ds.push_back(d);
    }
    auto base = toric_height(ds);
    std::vector<ToricDivisorData> perm{ds[2], ds[0], ds[1]};
    auto permuted = toric_height(perm);
    REQUIRE(permuted.contributions.size() == base.contributions.size());
    for (std::size_t i = 0; i < base.contributions.size(); ++i) {
      REQUIRE(base.contributions[i].exact.has_value());
      CHECK(permuted.contributions[i].exact->coeff == base.contributions[i].exact->coeff);
    }

    // Additivity in the first slot under sup-convolution.
    auto f0 = std::get<PAConcave>(ds[0].roof(places[0]));
    auto h = gen::pa_function(rng, 2);
    ToricDivisorData dh(h.domain()), sum(minkowski_sum(f0.domain(), h.domain()));
    dh.set_roof(places[0], h);
    sum.set_roof(places[0], sup_convolution(f0, h));
    auto lhs = toric_height({sum, ds[1], ds[2]});
    auto rhs_a = toric_height({ds[0], ds[1], ds[2]});
    auto rhs_b = toric_height({dh, ds[1], ds[2]});
    auto coeff = [](const HeightReport& r) { return r.contributions.empty() ? Rational(0) : r.contributions[0].exact->coeff; };
    CHECK(coeff(lhs) == coeff(rhs_a) + coeff(rhs_b));
    // Three-fold sup-convolution scales the total by three.
    ToricDivisorData triple(minkowski_sum(minkowski_sum(f0.domain(), f0.domain()), f0.domain()));
    triple.set_roof(places[0], sup_convolution(sup_convolution(f0, f0), f0));
    CHECK(coeff(toric_height({triple, ds[1], ds[2]})) == 3 * coeff(rhs_a));
  }
}

TEST_CASE("hypersurface heights on the projective line") {
  auto r = hypersurface_height({canonical(1)}, linear(1, 2));
  REQUIRE(r.contributions.size() == 2);
  CHECK(r.contributions[0].place == PlaceQ::archimedean());
  CHECK(r.contributions[1].place == PlaceQ::prime(2));
  CHECK(r.contributions[1].exact->coeff == 0);
  CHECK(std::abs(r.total - std::log(2.0)) <= r.error + 1e-12);
  CHECK(r.error < 1e-2);

  auto torsion = hypersurface_height({canonical(1)}, linear(-1, 1));
  CHECK(std::abs(torsion.total) <= torsion.error + 1e-12);

  // Monomials collapse to log|c|_v per place and sum to zero.
  auto mono = hypersurface_height({canonical(1)}, LaurentPolynomial(1, {{{1}, Rational(6)}}));
  CHECK(mono.contributions.size() == 3);
  CHECK(mono.contributions[0].value == doctest::Approx(std::log(6.0)));
  CHECK(mono.total == doctest::Approx(0.0).epsilon(1e-12));

  // m = 1 is the same formula.
  auto g = gualdi_limit({canonical(1)}, {linear(1, 2)});
  CHECK(g.total == r.total);
}

TEST_CASE("hypersurface heights match projective heights of the zero") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<long> c(-50, 50);
  for (int t = 0; t < 12; ++t) {
    long a = 0, b = 0;
    while (a == 0) a = c(rng);
    while (b == 0) b = c(rng);
    auto r = hypersurface_height({canonical(1)}, linear(a, b));
    // a + b x = 0 at x = -a/b, the point [b : -a].
    double h = projective_height(ProjectivePoint::from_rationals({Rational(b), Rational(-a)})).total();
    CHECK(std::abs(r.total - h) <= r.error + 1e-12);
    CHECK(r.error <= 1e-2);
  }
}

TEST_CASE("reduction to toric heights without polynomials") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 4; ++t) {
    std::vector<ToricDivisorData> ds;
    for (int i = 0; i < 3; ++i) {
      auto f = gen::pa_function(rng, 2);
      ToricDivisorData d(f.domain());
      d.set_roof(PlaceQ::prime(7), PAConcave::upper_envelope(f.breakpoint_positions(), f.breakpoint_values(), 2,
                                                             ValueScale{7}));
      ds.push_back(d);
    }
    auto a = toric_height(ds), b = gualdi_limit(ds, {});
    CHECK(a.total == b.total);
    CHECK(a.error == b.error);
    CHECK(a.contributions.size() == b.contributions.size());
  }
}

TEST_CASE("mixed integral of two indicators and a Ronkin roof") {
  // MI(iota, iota, rho^vee) for 1 + x + y is its Mahler measure.
  LaurentPolynomial f(2, {{{0, 0}, Rational(1)}, {{1, 0}, Rational(1)}, {{0, 1}, Rational(1)}});
  ToricConfig cfg;
  cfg.roof.u_step = 0.05;
  cfg.roof.margin = 5;
  auto r = hypersurface_height({canonical(2), canonical(2)}, f, cfg);
  double target = 0.3230659472194505;
  CHECK(std::abs(r.total - target) <= r.error);
  CHECK(std::abs(r.total - target) < 5e-3);
}

TEST_CASE("pushforward reduction") {
  // Deltas spanning everything: MV against MV.
  PushforwardInstance full;
  full.n = 2;
  full.k = 2;
  full.deltas = {unit_simplex(2), unit_cube(2)};
  full.gs = {indicator(unit_simplex(2))};
  auto rf = pushforward_reduction_check(full);
  CHECK(rf.ok());
  CHECK(rf.mv_full == 2);

  PushforwardInstance square;
  square.n = 2;
  square.k = 1;
  square.deltas = {segment({Rational(0), Rational(0)}, {Rational(1), Rational(0)})};
  square.gs = {indicator(unit_cube(2)), indicator(unit_cube(2))};
  auto rs = pushforward_reduction_check(square);
  CHECK(rs.ok());
  CHECK(rs.mi_full.coeff == 0);
  CHECK(rs.mv_full == 1);

  std::size_t nonzero = 0;
  for (std::size_t n : {2UL, 3UL}) {
    for (std::size_t k = 0; k <= n; ++k) {
      for (bool simplices : {true, false}) {
        auto inst = random_pushforward_instance(n, k, 100 * n + 10 * k + simplices, simplices);
        auto r = pushforward_reduction_check(inst);
        CHECK(r.mv_ok());
        CHECK(r.mi_ok());
        nonzero += r.mi_full.coeff != 0 && r.mv_full != 0;
      }
    }
  }
  CHECK(nonzero >= 10);
  square.k = 2;
  CHECK_THROWS_AS(pushforward_reduction_check(square), Error);
}

TEST_CASE("torsion translates") {
  LaurentPolynomial f(2, {{{0, 0}, Rational(1)}, {{1, 0}, Rational(1)}, {{0, 1}, Rational(1)}});
  // No translation: the two equations coincide.
  auto d = torsion_experiment({f, f}, 1, 5, 1);
  CHECK(d.all_degenerate());
  CHECK(d.singular == d.attempts);

  auto r = torsion_experiment({f, f}, 7, 20, 3);
  CHECK(r.draws.size() == 20);
  for (const auto& draw : r.draws) {
    CHECK(std::isfinite(draw.height));
    CHECK(draw.height >= -1e-9);
  }
  CHECK(r.min <= r.mean);
  CHECK(r.mean <= r.max);

  auto again = torsion_experiment({f, f}, 7, 20, 3);
  REQUIRE(again.draws.size() == r.draws.size());
  for (std::size_t i = 0; i < r.draws.size(); ++i) {
    CHECK(again.draws[i].height == r.draws[i].height);
    CHECK(again.draws[i].exponents == r.draws[i].exponents);
  }

  // Re-solve one draw by field division and compare heights.
  const auto& first = r.draws[0];
  auto z = [](std::uint64_t k) { return Cyclotomic::zeta(7, static_cast<std::int64_t>(k)); };
  auto a11 = z(first.exponents[0]), a12 = z(first.exponents[1]);
  auto a21 = z(first.exponents[2]), a22 = z(first.exponents[3]);
  auto det = a11 * a22 - a12 * a21;
  auto minus_one = Cyclotomic::rational(7, Rational(-1));
  auto x = (minus_one * a22 - a12 * minus_one) / det;
  auto y = (a11 * minus_one - minus_one * a21) / det;
  ProjectivePoint p{7, {Cyclotomic::rational(7, Rational(1)), x, y}};
  CHECK(projective_height(p).total() == doctest::Approx(first.height).epsilon(1e-9));
  // The translated equations hold.
  CHECK((Cyclotomic::rational(7, Rational(1)) + a11 * x + a12 * y).is_zero());
  CHECK((Cyclotomic::rational(7, Rational(1)) + a21 * x + a22 * y).is_zero());

  LaurentPolynomial quad(2, {{{2, 0}, Rational(1)}, {{0, 0}, Rational(1)}});
  CHECK_THROWS_AS(torsion_experiment({quad, f}, 7, 5, 1), Error);
  CHECK_THROWS_AS(torsion_experiment({f, f}, 7, 0, 1), Error);
}
