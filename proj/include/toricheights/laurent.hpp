#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "toricheights/rational.hpp"

namespace th {

using Exponent = std::vector<std::int64_t>;

class LaurentPolynomial {
 public:
  LaurentPolynomial() = default;
  explicit LaurentPolynomial(std::size_t n_vars) : n_vars_(n_vars) {}
  LaurentPolynomial(std::size_t n_vars, std::map<Exponent, Rational> terms);

  std::size_t n_vars() const { return n_vars_; }
  const std::map<Exponent, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }

  // Adds c * x^e, dropping the term if the sum cancels.
  void add_term(const Exponent& e, const Rational& c);

  std::complex<double> evaluate(const std::vector<std::complex<double>>& x) const;
  LaurentPolynomial operator*(const LaurentPolynomial& o) const;

 private:
  std::size_t n_vars_ = 0;
  std::map<Exponent, Rational> terms_;
};

}  // namespace th
