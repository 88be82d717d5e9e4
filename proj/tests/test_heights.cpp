#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "toricheights/detail/hull.hpp"
#include "toricheights/heights.hpp"

using namespace th;

namespace {

Cyclotomic cyc(std::uint64_t n, std::vector<long> c) {
  std::vector<Rational> v;
  for (long x : c) v.push_back(Rational(x));
  return Cyclotomic(n, v);
}

// Gaussian integer gcd, the oracle for ideals of Z[i].
std::complex<long> gauss_gcd(std::complex<long> a, std::complex<long> b) {
  auto norm = [](std::complex<long> z) { return z.real() * z.real() + z.imag() * z.imag(); };
  while (b != std::complex<long>(0, 0)) {
    // Round the exact quotient a * conj(b) / |b|^2 to the nearest Gaussian integer.
    std::complex<long> num = a * std::conj(b);
    long nb = norm(b);
    auto rnd = [nb](long x) { return static_cast<long>(std::floor(static_cast<double>(x) / nb + 0.5)); };
    std::complex<long> q(rnd(num.real()), rnd(num.imag()));
    std::complex<long> r = a - q * b;
    a = b;
    b = r;
  }
  return a;
}

// Index of the integer row lattice of a full-rank matrix by plain Euclidean echelon form.
Integer lattice_index(std::vector<std::vector<Integer>> rows, std::size_t d) {
  Integer index = 1;
  for (std::size_t c = 0; c < d; ++c) {
    for (;;) {
      std::size_t piv = rows.size();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][c] != 0 && (piv == rows.size() || abs(rows[i][c]) < abs(rows[piv][c]))) piv = i;
      }
      if (piv == rows.size()) return 0;
      bool done = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i == piv || rows[i][c] == 0) continue;
        Integer q = rows[i][c] / rows[piv][c];
        for (std::size_t k = c; k < d; ++k) rows[i][k] -= q * rows[piv][k];
        if (rows[i][c] != 0) done = false;
      }
      if (done) {
        index *= abs(rows[piv][c]);
        rows.erase(rows.begin() + static_cast<long>(piv));
        break;
      }
    }
  }
  return index;
}

double double_norm(const Cyclotomic& x) {
  double acc = 0;
  for (std::uint64_t k = 1; k <= x.conductor(); ++k) {
    if (std::gcd(k, x.conductor()) == 1) acc += std::log(std::abs(x.embedding(k)));
  }
  return acc;
}

}  // namespace

TEST_CASE("cyclotomic polynomials and arithmetic") {
  CHECK(cyclotomic_polynomial(12) == std::vector<Integer>{1, 0, -1, 0, 1});
  CHECK(cyclotomic_polynomial(1) == std::vector<Integer>{-1, 1});
  CHECK(cyclotomic_polynomial(9) == std::vector<Integer>{1, 0, 0, 1, 0, 0, 1});
  CHECK(euler_phi(24) == 8);
  auto z4 = Cyclotomic::zeta(4);
  CHECK(z4 * z4 == Cyclotomic::rational(4, -1));
  auto z3 = Cyclotomic::zeta(3);
  CHECK(z3 + z3 * z3 == Cyclotomic::rational(3, -1));
  auto a = Cyclotomic::rational(5, 1) + Cyclotomic::zeta(5);
  CHECK(a.inverse() * a == Cyclotomic::rational(5, 1));
  CHECK_THROWS_AS(Cyclotomic(5).inverse(), Error);
  // zeta_3 inside Q(zeta_12) is zeta_12^4.
  CHECK(Cyclotomic::zeta(3).embed(12) == Cyclotomic::zeta(12, 4));
  CHECK(Cyclotomic::zeta(3) + Cyclotomic::zeta(4) == Cyclotomic::zeta(12, 4) + Cyclotomic::zeta(12, 3));

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> d(-4, 4);
  for (std::uint64_t n : {5ULL, 7ULL, 8ULL, 9ULL, 12ULL, 15ULL}) {
    for (int t = 0; t < 5; ++t) {
      std::vector<long> ca(euler_phi(n)), cb(euler_phi(n)), cc(euler_phi(n));
      for (auto& x : ca) x = d(rng);
      for (auto& x : cb) x = d(rng);
      for (auto& x : cc) x = d(rng);
      auto x = cyc(n, ca), y = cyc(n, cb), z = cyc(n, cc);
      CHECK((x * y) * z == x * (y * z));
      CHECK(x * (y + z) == x * y + x * z);
      if (!x.is_zero()) {
        CHECK(x * x.inverse() == Cyclotomic::rational(n, 1));
        // Embeddings are ring homomorphisms.
        CHECK(std::abs((x * y).embedding(1) - x.embedding(1) * y.embedding(1)) < 1e-9);
        CHECK(std::abs(std::log(std::abs(to_double(x.norm()))) - double_norm(x)) < 1e-8);
      }
    }
  }
}

TEST_CASE("content norm") {
  CHECK(content_norm({Cyclotomic::rational(1, 1)}) == 1);
  CHECK(content_norm({Cyclotomic::rational(1, 2)}) == 2);
  CHECK(content_norm({Cyclotomic::rational(3, 1) - Cyclotomic::zeta(3)}) == 3);
  CHECK(content_norm({Cyclotomic::rational(3, 3) - Cyclotomic::zeta(3)}) == 13);
  // -1 - zeta_3 = zeta_3^2 is a unit.
  CHECK(content_norm({Cyclotomic::rational(3, -1) - Cyclotomic::zeta(3)}) == 1);
  CHECK(content_norm({Cyclotomic::rational(5, 2)}) == 16);
  CHECK(content_norm({Cyclotomic::rational(1, 6), Cyclotomic::rational(1, 10)}) == 2);
  CHECK_THROWS_AS(content_norm({Cyclotomic(3)}), Error);
  CHECK_THROWS_AS(content_norm({Cyclotomic::rational(3, make_rational(1, 2))}), Error);

  // Ideals of Z[i] against the Gaussian gcd.
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> d(-30, 30);
  for (int t = 0; t < 60; ++t) {
    std::complex<long> a(d(rng), d(rng)), b(d(rng), d(rng));
    if (a == std::complex<long>(0, 0) && b == std::complex<long>(0, 0)) continue;
    auto g = gauss_gcd(a, b);
    long expect = g.real() * g.real() + g.imag() * g.imag();
    CHECK(content_norm({cyc(4, {a.real(), a.imag()}), cyc(4, {b.real(), b.imag()})}) == expect);
  }
  // Principal ideals: the norm of the generator.
  std::uniform_int_distribution<long> s(-5, 5);
  for (std::uint64_t n : {3ULL, 5ULL, 7ULL, 8ULL, 12ULL}) {
    for (int t = 0; t < 6; ++t) {
      std::vector<long> c(euler_phi(n));
      for (auto& x : c) x = s(rng);
      auto x = cyc(n, c);
      if (x.is_zero()) continue;
      CHECK(content_norm({x}) == abs(x.norm().get_num()));
      // Adding a multiple of the generator does not change the ideal.
      auto y = x * cyc(n, {s(rng), s(rng)});
      CHECK(content_norm({x, y}) == abs(x.norm().get_num()));
    }
  }
}

TEST_CASE("tuple heights over Q") {
  CHECK(std::abs(height_tuple_Q({1, 2}) - std::log(2.0)) < 1e-15);
  CHECK(height_tuple_Q({1, 1}) == 0);
  CHECK(std::abs(height_tuple_Q({1, 3, 2, 6}) - std::log(6.0)) < 1e-15);
  CHECK(std::isinf(height_tuple_Q({0, 0})));
  CHECK(height_tuple_Q_exp({make_rational(2, 3), make_rational(4, 9)}) == 3);
}

TEST_CASE("projective heights") {
  auto h = projective_height(ProjectivePoint::from_rationals({1, 2}));
  CHECK(std::abs(h.total() - std::log(2.0)) < 1e-12);
  ProjectivePoint p{5, {Cyclotomic::rational(5, 1), Cyclotomic::zeta(5)}};
  CHECK(std::abs(projective_height(p).total()) < 1e-12);
  auto h8 = projective_height(ProjectivePoint::from_rationals({2, 3}, 8));
  CHECK(std::abs(h8.total() - std::log(3.0)) < 1e-12);
  CHECK(h8.degree == 4);
  CHECK(projective_height(ProjectivePoint::from_rationals({0, 0})).is_zero_point);

  // Gaussian points against the gcd oracle: h = log max(|x|, |y|) after removing the gcd.
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<long> d(-20, 20);
  for (int t = 0; t < 30; ++t) {
    std::complex<long> a(d(rng), d(rng)), b(d(rng), d(rng));
    if (a == std::complex<long>(0, 0) || b == std::complex<long>(0, 0)) continue;
    auto g = gauss_gcd(a, b);
    std::complex<double> gd(static_cast<double>(g.real()), static_cast<double>(g.imag()));
    std::complex<double> ad(static_cast<double>(a.real()), static_cast<double>(a.imag()));
    std::complex<double> bd(static_cast<double>(b.real()), static_cast<double>(b.imag()));
    double expect = std::log(std::max(std::abs(ad / gd), std::abs(bd / gd)));
    auto hb = projective_height(ProjectivePoint{4, {cyc(4, {a.real(), a.imag()}), cyc(4, {b.real(), b.imag()})}});
    CHECK(std::abs(hb.total() - expect) < 1e-10);
  }
}

TEST_CASE("projective height invariants") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<long> d(-6, 6);
  for (std::uint64_t n : {3ULL, 5ULL, 7ULL, 8ULL, 9ULL, 12ULL}) {
    for (int t = 0; t < 3; ++t) {
      std::vector<Cyclotomic> xs;
      for (int i = 0; i < 3; ++i) {
        std::vector<long> c(euler_phi(n));
        for (auto& x : c) x = d(rng);
        xs.push_back(cyc(n, c));
      }
      std::vector<Rational> lc(euler_phi(n));
      for (auto& x : lc) x = make_rational(d(rng), 1 + static_cast<long>(rng() % 3));
      Cyclotomic lam(n, lc);
      if (lam.is_zero()) continue;
      ProjectivePoint p{n, xs}, q{n, {}};
      for (const auto& x : xs) q.coords.push_back(x * lam);
      auto hp = projective_height(p), hq = projective_height(q);
      if (hp.is_zero_point) continue;
      CHECK(std::abs(hp.total() - hq.total()) < 1e-9);
      CHECK(hp.total() >= -hp.error());
      // The finite part is exact and reproducible.
      CHECK(projective_height(p).content == hp.content);
    }
  }
  for (std::uint64_t n = 1; n <= 24; ++n) {
    RationalVector v{make_rational(static_cast<long>(rng() % 50) - 25, 1 + static_cast<long>(rng() % 7)),
                     make_rational(static_cast<long>(rng() % 50) - 25, 1 + static_cast<long>(rng() % 7)), 1};
    CHECK(std::abs(projective_height(ProjectivePoint::from_rationals(v, n)).total() - height_tuple_Q(v)) < 1e-9);
  }
  for (std::uint64_t n = 1; n <= 50; ++n) {
    for (std::uint64_t k = 0; k < n; k += 1 + n / 7) {
      ProjectivePoint p{n, {Cyclotomic::rational(n, 1), Cyclotomic::zeta(n, static_cast<std::int64_t>(k))}};
      auto hb = projective_height(p);
      CHECK(std::abs(hb.total()) <= hb.error());
      CHECK(hb.content == 1);
    }
  }
}

TEST_CASE("height axioms") {
  auto rep = gvf_axiom_suite(2024, 150);
  CHECK(rep.ok());
  CHECK(rep.axioms.size() == 8);
  for (const auto& a : rep.axioms) {
    INFO(a.name);
    CHECK(a.checks > 0);
    CHECK(a.failures == 0);
  }
  // 1 + zeta_3 is a unit; its height as a one-element tuple vanishes.
  ProjectivePoint u{3, {Cyclotomic::rational(3, 1) + Cyclotomic::zeta(3)}};
  CHECK(std::abs(projective_height(u).total()) < 1e-9);
}

TEST_CASE("norms and contents against matrix oracles") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<long> s(-6, 6);
  for (std::uint64_t n : {5ULL, 7ULL, 8ULL, 9ULL, 12ULL, 15ULL, 16ULL}) {
    const std::size_t d = euler_phi(n);
    for (int t = 0; t < 8; ++t) {
      std::vector<long> a(d), b(d);
      for (auto& x : a) x = s(rng);
      for (auto& x : b) x = s(rng);
      auto x = cyc(n, a), y = cyc(n, b);
      if (x.is_zero() || y.is_zero()) continue;
      CHECK(x.norm() == detail::determinant(x.multiplication_matrix()));
      auto q = x * Cyclotomic::rational(n, make_rational(1, 3));
      CHECK(q.norm() == detail::determinant(q.multiplication_matrix()));
      // Scaled copies make the gcd of the norms carry repeated prime factors.
      for (long k : {1L, 2L, 6L}) {
        auto xs = x * Cyclotomic::rational(n, Rational(k)), ys = y * Cyclotomic::rational(n, Rational(k * k));
        std::vector<std::vector<Integer>> rows;
        for (const auto& z : {xs, ys}) {
          for (const auto& r : z.multiplication_matrix()) {
            std::vector<Integer> row;
            for (const auto& c : r) row.push_back(c.get_num());
            rows.push_back(row);
          }
        }
        CHECK(content_norm({xs, ys}) == lattice_index(rows, d));
      }
    }
  }
}

