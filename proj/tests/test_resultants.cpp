#include <cmath>
#include <random>

#include "doctest.h"
#include "toricheights/detail/hull.hpp"
#include "toricheights/heights.hpp"
#include "toricheights/resultants.hpp"

using namespace th;

namespace {

// Numeric Sylvester determinant of two binary forms, via exact elimination.
Rational sylvester_det(const std::vector<long>& a, const std::vector<long>& b) {
  const std::size_t n = a.size() - 1, m = 2 * n;
  std::vector<RationalVector> rows(m, RationalVector(m, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      rows[i][i + j] = a[j];
      rows[n + i][i + j] = b[j];
    }
  }
  return detail::determinant(rows);
}

std::vector<Integer> specialize(const std::vector<long>& a, const std::vector<long>& b) {
  std::vector<Integer> x;
  for (long v : a) x.push_back(v);
  for (long v : b) x.push_back(v);
  return x;
}

// Coefficients (highest power of x first) of prod (x - r_k y).
std::vector<long> from_roots(const std::vector<long>& roots, long lead) {
  std::vector<long> c{lead};
  for (long r : roots) {
    std::vector<long> d(c.size() + 1, 0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      d[i] += c[i];
      d[i + 1] -= r * c[i];
    }
    c = d;
  }
  return c;
}

}  // namespace

TEST_CASE("sylvester forms") {
  auto r1 = sylvester_resultant_form(1);
  CHECK(r1.terms().size() == 2);
  CHECK(r1.terms().at({1, 0, 0, 1}) == 1);
  CHECK(r1.terms().at({0, 1, 1, 0}) == -1);
  CHECK(form_height(r1) == 0);

  auto r2 = sylvester_resultant_form(2);
  CHECK(r2.max_abs_coefficient() == 2);
  CHECK(std::abs(form_height(r2) - std::log(2.0)) < 1e-15);
  // Against (a0b2 - a2b0)^2 - (a0b1 - a1b0)(a1b2 - a2b1) on random integer points.
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<long> d(-9, 9);
  for (int t = 0; t < 40; ++t) {
    long a0 = d(rng), a1 = d(rng), a2 = d(rng), b0 = d(rng), b1 = d(rng), b2 = d(rng);
    long expect = (a0 * b2 - a2 * b0) * (a0 * b2 - a2 * b0) - (a0 * b1 - a1 * b0) * (a1 * b2 - a2 * b1);
    CHECK(r2.evaluate(specialize({a0, a1, a2}, {b0, b1, b2})) == expect);
  }
  CHECK_THROWS_AS(sylvester_resultant_form(0), Error);
  CHECK_THROWS_AS(sylvester_resultant_form(kSylvesterCap + 1), Error);
  // (x - y)(x - 2y) and (x - y)(x - 3y) share a root.
  CHECK(r2.evaluate(specialize(from_roots({1, 2}, 1), from_roots({1, 3}, 1))) == 0);
}

TEST_CASE("sylvester structure and defining property") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<long> d(-4, 4);
  for (std::size_t n = 1; n <= kSylvesterCap; ++n) {
    auto r = sylvester_resultant_form(n);
    CHECK(r.content() == 1);
    for (const auto& [e, c] : r.terms()) {
      int da = 0, db = 0;
      for (std::size_t k = 0; k <= n; ++k) {
        da += e[k];
        db += e[n + 1 + k];
      }
      CHECK(da == static_cast<int>(n));
      CHECK(db == static_cast<int>(n));
    }
    for (int t = 0; t < 50; ++t) {
      std::vector<long> a(n + 1), b(n + 1);
      if (t % 2 == 0) {
        // Planted common root.
        long root = d(rng);
        std::vector<long> ra{root}, rb{root};
        for (std::size_t k = 1; k < n; ++k) {
          ra.push_back(d(rng));
          rb.push_back(d(rng));
        }
        a = from_roots(ra, 1 + static_cast<long>(rng() % 3));
        b = from_roots(rb, 1 + static_cast<long>(rng() % 3));
      } else {
        for (auto& x : a) x = d(rng);
        for (auto& x : b) x = d(rng);
      }
      Integer val = r.evaluate(specialize(a, b));
      Rational det = sylvester_det(a, b);
      CHECK(Rational(val) == det);
      if (t % 2 == 0) CHECK(val == 0);
    }
  }
}

TEST_CASE("point forms") {
  auto f = point_resultant_form({2, 3}, 3);
  std::vector<Integer> coeffs;
  for (const auto& [e, c] : f.terms()) coeffs.push_back(c);
  // Terms are keyed by unit vectors, so map order is reversed relative to the monomial order.
  CHECK(coeffs == std::vector<Integer>{27, 18, 12, 8});
  CHECK(std::abs(form_height(f) - std::log(27.0)) < 1e-15);
  CHECK(form_height(point_resultant_form({1, 0}, 5)) == 0);
  CHECK(point_resultant_form({1, 0}, 5).terms().size() == 1);
  CHECK(form_height(point_resultant_form({1, 1}, 2)) == 0);
  CHECK(point_resultant_form({1, 1}, 2).terms().size() == 3);
  CHECK(std::abs(form_height(point_resultant_form({2, 3}, 1)) - std::log(3.0)) < 1e-15);
  CHECK_THROWS_AS(point_resultant_form({0, 0}, 2), Error);
  CHECK_THROWS_AS(point_resultant_form({2, 4}, 2), Error);

  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    std::vector<Integer> p{static_cast<long>(rng() % 20) - 10, static_cast<long>(rng() % 20) - 10, 1};
    RationalVector pq{Rational(p[0]), Rational(p[1]), 1};
    for (std::size_t n = 1; n <= 10; ++n) {
      auto g = point_resultant_form(p, n);
      Integer hp = height_tuple_Q_exp(pq), pw;
      mpz_pow_ui(pw.get_mpz_t(), hp.get_mpz_t(), n);
      CHECK(g.max_abs_coefficient() == pw * g.content());
    }
  }
}

TEST_CASE("convergence tables") {
  auto t = convergence_table_point({2, 3}, 10);
  CHECK(t.ok());
  for (const auto& r : t.rows) CHECK(std::abs(r.normalized - std::log(3.0)) < 1e-12);
  auto s = convergence_table_sylvester(kSylvesterCap);
  CHECK(s.rows[0].normalized == 0);
  CHECK(std::abs(s.rows[1].normalized - std::log(2.0) / 4) < 1e-15);
  CHECK(std::abs(s.constant - 0.5) < 1e-12);
  CHECK(s.ok());
  CHECK_THROWS_AS(convergence_table_sylvester(kSylvesterCap + 1), Error);
}

TEST_CASE("sphere heights") {
  // z0 on the unit sphere of C^2: integral -1/2, correction 1/2.
  MultiForm mono({{2, 1}}, {{{1, 0}, Integer(1)}});
  QuadratureConfig cfg;
  cfg.budget = 20000;
  auto e = fs_height_estimate(mono, cfg);
  CHECK(std::abs(e.sphere + 0.5) <= e.error + 1e-3);
  CHECK(e.correction == doctest::Approx(0.5));
  CHECK(std::abs(e.total()) <= e.error + 1e-3);
  auto p = fs_height_estimate(point_resultant_form({1, 0}, 1), cfg);
  CHECK(std::abs(p.total()) <= p.error + 1e-3);
  // Higher powers: log|z0^k| integrates to -k/2 exactly.
  MultiForm cube({{3, 3}}, {{{3, 0, 0}, Integer(1)}});
  auto c = fs_height_estimate(cube, cfg);
  CHECK(std::abs(c.sphere + 3 * harmonic(2) / 2) <= c.error + 1e-3);

  cfg.budget = 2000;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto r = sylvester_resultant_form(n);
    auto fs = fs_height_estimate(r, cfg);
    CHECK(std::abs(fs.total() - form_height(r)) <= fs_comparison_bound(r) + fs.error);
  }
  for (std::vector<Integer> pt : {std::vector<Integer>{2, 3}, std::vector<Integer>{5, -7, 1}}) {
    for (std::size_t n = 1; n <= 3; ++n) {
      auto f = point_resultant_form(pt, n);
      auto fs = fs_height_estimate(f, cfg);
      CHECK(std::abs(fs.total() - form_height(f)) <= fs_comparison_bound(f) + fs.error);
    }
  }
  CHECK(std::abs(fs_comparison_bound(sylvester_resultant_form(1)) - 2 * std::log(2.0)) < 1e-15);
}

TEST_CASE("veronese gap") {
  CHECK(veronese_gap_at({1.0, 0.0, 0.0}, 4) == doctest::Approx(0.0));
  auto g = veronese_gap(1, 2);
  CHECK(g.ok());
  CHECK(g.observed <= std::log(3.0) / 4 + 1e-12);
  CHECK(std::abs(g.bound - std::log(2.0) / 2) < 1e-15);
  auto g2 = veronese_gap(2, 3);
  CHECK(g2.ok());
  CHECK(std::abs(g2.binomial_bound - std::log(10.0) / 6) < 1e-12);
  CHECK(std::abs(g2.bound - 2 * std::log(3.0) / 3) < 1e-15);
  // Brute-force check of the monomial sum on random points.
  std::mt19937_64 rng(6);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 20; ++t) {
    std::complex<double> a(nd(rng), nd(rng)), b(nd(rng), nd(rng));
    double s = 0;
    for (int i = 0; i <= 3; ++i) s += std::pow(std::abs(a), 2 * i) * std::pow(std::abs(b), 2 * (3 - i));
    double expect = std::abs(std::log(std::max(std::abs(a), std::abs(b))) - std::log(s) / 6);
    CHECK(veronese_gap_at({a, b}, 3) == doctest::Approx(expect).epsilon(1e-10));
  }
  CHECK_THROWS_AS(veronese_gap(2, 2), Error);
}
