#pragma once

#include <complex>
#include <vector>

namespace th::detail {

// Roots of sum_k coeffs[k] z^k (leading coefficient nonzero, degree >= 1), with
// companion-matrix eigenvalues refined by Newton steps.
std::vector<std::complex<double>> polynomial_roots(const std::vector<std::complex<double>>& coeffs);

// Largest |p(r)| / (|p'(r)| |r|) style relative root uncertainty after polishing.
double root_uncertainty(const std::vector<std::complex<double>>& coeffs, const std::vector<std::complex<double>>& roots);

// Mean of log|sum_k coeffs[k] z^k| over |z| = r, by Jensen's formula. Leading
// zeros are ignored; returns -inf for the zero polynomial.
double jensen_mean(const std::vector<std::complex<double>>& coeffs, double log_r);

}  // namespace th::detail
