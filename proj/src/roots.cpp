#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "toricheights/detail/roots.hpp"

namespace th::detail {

namespace {

using cd = std::complex<double>;

cd horner(const std::vector<cd>& c, cd z, cd* deriv) {
  cd p = 0, dp = 0;
  for (std::size_t k = c.size(); k-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[k];
  }
  if (deriv) *deriv = dp;
  return p;
}

}  // namespace

std::vector<cd> polynomial_roots(const std::vector<cd>& coeffs) {
  const std::size_t d = coeffs.size() - 1;
  if (d == 1) return {-coeffs[0] / coeffs[1]};
  if (d == 2) {
    cd a = coeffs[2], b = coeffs[1], c = coeffs[0];
    cd disc = std::sqrt(b * b - 4.0 * a * c);
    // Choose the sign that avoids cancellation.
    cd q = std::real(std::conj(b) * disc) >= 0 ? -0.5 * (b + disc) : -0.5 * (b - disc);
    if (q == cd(0)) return {0.0, 0.0};
    return {q / a, c / q};
  }
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(static_cast<long>(d), static_cast<long>(d));
  for (std::size_t i = 1; i < d; ++i) comp(static_cast<long>(i), static_cast<long>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < d; ++i) comp(static_cast<long>(i), static_cast<long>(d - 1)) = -coeffs[i] / coeffs[d];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<cd> roots(d);
  for (std::size_t i = 0; i < d; ++i) roots[i] = es.eigenvalues()(static_cast<long>(i));
  for (auto& r : roots) {
    for (int it = 0; it < 3; ++it) {
      cd dp;
      cd p = horner(coeffs, r, &dp);
      if (dp == cd(0)) break;
      cd step = p / dp;
      if (!std::isfinite(std::abs(step)) || std::abs(step) > 1e-3 * (1 + std::abs(r))) break;
      r -= step;
    }
  }
  return roots;
}

double root_uncertainty(const std::vector<cd>& coeffs, const std::vector<cd>& roots) {
  double worst = 0;
  for (const auto& r : roots) {
    cd dp;
    cd p = horner(coeffs, r, &dp);
    double scale = std::max(std::abs(r), 1.0);
    double u = std::abs(dp) == 0 ? std::numeric_limits<double>::infinity() : std::abs(p) / std::abs(dp) / scale;
    worst = std::max(worst, u);
  }
  return worst;
}

double jensen_mean(const std::vector<cd>& coeffs, double log_r) {
  std::size_t lo = 0, hi = coeffs.size();
  while (lo < hi && coeffs[lo] == cd(0)) ++lo;
  while (hi > lo && coeffs[hi - 1] == cd(0)) --hi;
  if (lo == hi) return -std::numeric_limits<double>::infinity();
  double acc = static_cast<double>(lo) * log_r + std::log(std::abs(coeffs[hi - 1]));
  if (hi - lo == 1) return acc;
  std::vector<cd> q(coeffs.begin() + static_cast<long>(lo), coeffs.begin() + static_cast<long>(hi));
  for (const auto& a : polynomial_roots(q)) acc += std::max(std::log(std::abs(a)), log_r);
  return acc;
}

}  // namespace th::detail
