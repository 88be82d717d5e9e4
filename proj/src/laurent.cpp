#include "toricheights/laurent.hpp"

namespace th {

LaurentPolynomial::LaurentPolynomial(std::size_t n_vars, std::map<Exponent, Rational> terms) : n_vars_(n_vars) {
  for (auto& [e, c] : terms) add_term(e, c);
}

void LaurentPolynomial::add_term(const Exponent& e, const Rational& c) {
  if (e.size() != n_vars_) fail_validation("exponent length does not match variable count");
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

std::complex<double> LaurentPolynomial::evaluate(const std::vector<std::complex<double>>& x) const {
  std::complex<double> s = 0;
  for (const auto& [e, c] : terms_) {
    std::complex<double> t = to_double(c);
    for (std::size_t i = 0; i < n_vars_; ++i) {
      if (e[i] != 0) t *= std::pow(x[i], static_cast<double>(e[i]));
    }
    s += t;
  }
  return s;
}

LaurentPolynomial LaurentPolynomial::operator*(const LaurentPolynomial& o) const {
  if (o.n_vars_ != n_vars_) fail_validation("variable count mismatch in product");
  LaurentPolynomial r(n_vars_);
  for (const auto& [e1, c1] : terms_) {
    for (const auto& [e2, c2] : o.terms_) {
      Exponent e(n_vars_);
      for (std::size_t i = 0; i < n_vars_; ++i) e[i] = e1[i] + e2[i];
      r.add_term(e, c1 * c2);
    }
  }
  return r;
}

}  // namespace th
