#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "toricheights/laurent.hpp"
#include "toricheights/rational.hpp"
#include "toricheights/ronkin.hpp"

namespace th {

struct ComplexQ {
  Rational re;
  Rational im;
  Rational norm_squared() const { return re * re + im * im; }
  std::complex<double> value() const { return {to_double(re), to_double(im)}; }
  bool is_zero() const { return re == 0 && im == 0; }
};

// Polynomial in groups of variables; exponents are concatenated group by group.
class PolyC {
 public:
  PolyC() = default;
  PolyC(std::vector<std::size_t> partition, const std::map<std::vector<int>, ComplexQ>& terms);
  // Rational coefficients, every variable in one group unless a partition is given.
  static PolyC from_laurent(const LaurentPolynomial& f, std::vector<std::size_t> partition = {});

  const std::vector<std::size_t>& partition() const { return partition_; }
  const std::map<std::vector<int>, ComplexQ>& terms() const { return terms_; }
  std::size_t n_vars() const { return n_vars_; }
  const std::vector<int>& group_degrees() const { return degrees_; }
  int total_degree() const;
  bool is_constant() const;

  std::complex<double> evaluate(const std::vector<std::complex<double>>& z) const;
  PolyC operator*(const PolyC& o) const;
  // Same polynomial with the partition replaced.
  PolyC regroup(std::vector<std::size_t> partition) const;

 private:
  std::vector<std::size_t> partition_;
  std::map<std::vector<int>, ComplexQ> terms_;
  std::size_t n_vars_ = 0;
  std::vector<int> degrees_;
  // Flattened copy for fast evaluation.
  std::vector<std::complex<double>> coef_;
  std::vector<std::vector<int>> exps_;
};

struct EstimateResult {
  double value = 0;
  double stderr_ = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double error() const { return 3 * stderr_; }
};

// max |coefficient|
double norm_inf(const PolyC& p);
Rational norm_inf_squared(const PolyC& p);

EstimateResult mahler_torus(const PolyC& p, const QuadratureConfig& cfg = {});
Estimate mahler_univariate_exact(const PolyC& p);
// All variables on one sphere.
EstimateResult mahler_sphere(const PolyC& p, const QuadratureConfig& cfg = {});
// One sphere per group of the given partition.
EstimateResult mahler_multisphere(const PolyC& p, const std::vector<std::size_t>& partition,
                                  const QuadratureConfig& cfg = {});

struct SupEstimate {
  double lower = 0;         // sampled value, a lower bound for S(P) up to rounding
  double upper = 0;         // sum of |coefficients|
  double norm = 0;
  double binomial_bound = 0;  // C(n+d, n) * norm
  bool ok() const;
};
SupEstimate sup_polydisc(const PolyC& p, const QuadratureConfig& cfg = {});

struct ParsevalReport {
  double estimate = 0;
  double exact = 0;
  double stderr_ = 0;
  double z = 0;
  bool ok() const;
};
ParsevalReport parseval_check(const PolyC& p, const QuadratureConfig& cfg = {});

struct BoundCheck {
  std::string name;
  std::size_t checks = 0;
  std::size_t violations = 0;
  double max_ratio = 0;  // largest |gap| / bound observed; coefficient ratio for the coefficient bound
};

struct BoundReport {
  std::size_t corpus = 0;
  std::uint64_t seed = 0;
  std::vector<BoundCheck> checks;
  bool ok() const;
};

// Random corpus: integer coefficients in [-9, 9], group degrees <= 4, up to 3 groups of size <= 3.
PolyC random_corpus_polynomial(Rng& rng);
BoundReport bound_suite(std::size_t corpus, std::uint64_t seed, const QuadratureConfig& cfg = {});

}  // namespace th
