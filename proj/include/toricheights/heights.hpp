#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "toricheights/rational.hpp"

namespace th {

std::size_t euler_phi(std::uint64_t n);
// Coefficients of the n-th cyclotomic polynomial, constant term first.
const std::vector<Integer>& cyclotomic_polynomial(std::uint64_t n);

// Element of Q(zeta_N) as a reduced residue modulo the N-th cyclotomic polynomial.
class Cyclotomic {
 public:
  Cyclotomic() : Cyclotomic(1) {}
  explicit Cyclotomic(std::uint64_t conductor);
  // Any coefficient length; reduced on construction.
  Cyclotomic(std::uint64_t conductor, std::vector<Rational> coeffs);

  static Cyclotomic rational(std::uint64_t conductor, const Rational& q);
  static Cyclotomic zeta(std::uint64_t conductor, std::int64_t power = 1);

  std::uint64_t conductor() const { return n_; }
  std::size_t degree() const { return c_.size(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  bool is_zero() const;
  bool is_integral() const;
  Integer denominator() const;

  // Same element in Q(zeta_M); M must be a multiple of the conductor.
  Cyclotomic embed(std::uint64_t m) const;

  Cyclotomic operator+(const Cyclotomic& o) const;
  Cyclotomic operator-(const Cyclotomic& o) const;
  Cyclotomic operator-() const;
  Cyclotomic operator*(const Cyclotomic& o) const;
  Cyclotomic operator/(const Cyclotomic& o) const;
  Cyclotomic inverse() const;
  bool operator==(const Cyclotomic& o) const;
  bool operator!=(const Cyclotomic& o) const { return !(*this == o); }

  // zeta -> exp(2 pi i k / N), k coprime to N.
  std::complex<double> embedding(std::uint64_t k) const;
  // Exact field norm to Q.
  Rational norm() const;
  // Rows: coefficient vectors of x * zeta^j, j < degree.
  std::vector<RationalVector> multiplication_matrix() const;

  std::string to_string() const;

 private:
  std::uint64_t n_;
  std::vector<Rational> c_;
};

// Index of the lattice spanned by x_i * zeta^j inside Z[zeta_N], i.e. the norm of
// the ideal generated by the x_i. Entries must be integral, not all zero.
Integer content_norm(const std::vector<Cyclotomic>& xs);

struct ProjectivePoint {
  std::uint64_t conductor = 1;
  std::vector<Cyclotomic> coords;

  static ProjectivePoint from_rationals(const RationalVector& xs, std::uint64_t conductor = 1);
};

struct HeightBreakdown {
  double archimedean = 0;        // (1/deg) sum over embeddings of log max |sigma x_i|
  double archimedean_error = 0;  // certified bound on that average
  Integer content = 1;           // content ideal norm after clearing denominators
  std::size_t degree = 1;
  unsigned precision_bits = 0;

  double finite() const;         // -log(content) / degree
  double total() const { return archimedean + finite(); }
  double error() const { return archimedean_error + 1e-15 * (1 + std::abs(total())); }
  bool is_zero_point = false;    // all coordinates zero: height is -infinity
};

// Height of a point; the archimedean part is certified to `target` absolute error.
HeightBreakdown projective_height(const ProjectivePoint& p, double target = 1e-12);

// Height of a rational tuple: log of the largest entry of the coprime integer
// representative; -infinity for the zero tuple.
double height_tuple_Q(const RationalVector& x);
// The integer whose log is height_tuple_Q(x); 0 for the zero tuple.
Integer height_tuple_Q_exp(const RationalVector& x);

struct AxiomResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;   // checks whose violation exceeded their own error bound
  double max_violation = 0;
  double bound = 0;           // largest per-check bound used
  bool ok() const { return failures == 0; }
};

struct GvfReport {
  std::vector<AxiomResult> axioms;
  bool ok() const;
};

// Random checks of the height axioms over Q and cyclotomic fields.
GvfReport gvf_axiom_suite(std::uint64_t seed, std::size_t samples = 200);

}  // namespace th
