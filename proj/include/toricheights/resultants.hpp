#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "toricheights/numeric.hpp"
#include "toricheights/rational.hpp"
#include "toricheights/ronkin.hpp"

namespace th {

struct FormGroup {
  std::size_t size = 0;    // number of variables, r_i + 1
  std::size_t degree = 0;  // delta_i
};

// Multihomogeneous integer form; exponents are concatenated group by group.
class MultiForm {
 public:
  MultiForm() = default;
  MultiForm(std::vector<FormGroup> groups, std::map<std::vector<int>, Integer> terms);

  const std::vector<FormGroup>& groups() const { return groups_; }
  const std::map<std::vector<int>, Integer>& terms() const { return terms_; }
  std::size_t n_vars() const;
  const Integer& content() const { return content_; }
  Integer max_abs_coefficient() const;
  bool is_zero() const { return terms_.empty(); }

  Integer evaluate(const std::vector<Integer>& x) const;
  std::complex<double> evaluate(const std::vector<std::complex<double>>& z) const;

 private:
  std::vector<FormGroup> groups_;
  std::map<std::vector<int>, Integer> terms_;
  Integer content_ = 0;
};

constexpr std::size_t kSylvesterCap = 6;

// Resultant of a_0 x^n + ... + a_n y^n and b_0 x^n + ... + b_n y^n in the
// variables (a_0..a_n | b_0..b_n).
MultiForm sylvester_resultant_form(std::size_t n);
// Linear form sum_I p^I t_I over the degree-n monomials of p, in graded lex order.
MultiForm point_resultant_form(const std::vector<Integer>& p, std::size_t n);

double form_height(const MultiForm& r);

// Sum over i of delta_i (log(r_i + 1) + H_{r_i - 1}): the gap allowed between the
// sphere-integral height and the max-coefficient height.
double fs_comparison_bound(const MultiForm& r);

struct FsEstimate {
  double finite = 0;      // exact: -log content
  double sphere = 0;      // integral of log|R| over the product of unit spheres
  double correction = 0;  // (1/2) sum_i delta_i H_{r_i}
  double error = 0;       // 3 standard errors
  double total() const { return finite + sphere + correction; }
};

FsEstimate fs_height_estimate(const MultiForm& r, const QuadratureConfig& cfg = {});

struct ConvergenceRow {
  std::size_t n = 0;
  double height = 0;
  double normalized = 0;  // height / n^(d+1)
  double limit = 0;
  double envelope = 0;    // C log n / n
  bool within = true;
};

struct ConvergenceTable {
  std::string description;  // includes the normalization convention
  double constant = 0;      // fitted envelope constant C
  std::vector<ConvergenceRow> rows;
  bool ok() const;
};

ConvergenceTable convergence_table_sylvester(std::size_t n_max);
ConvergenceTable convergence_table_point(const std::vector<Integer>& p, std::size_t n_max);

struct VeroneseGap {
  double observed = 0;
  double binomial_bound = 0;  // (1/2n) log C(r+n, n)
  double bound = 0;           // r log n / n
  std::size_t samples = 0;
  bool ok() const { return observed <= binomial_bound + 1e-12 && binomial_bound <= bound + 1e-12; }
};

// Gap between the max metric and the pulled-back Fubini-Study metric of the n-th Veronese map.
double veronese_gap_at(const std::vector<std::complex<double>>& z, std::size_t n);
VeroneseGap veronese_gap(std::size_t r, std::size_t n, const QuadratureConfig& cfg = {});

}  // namespace th
