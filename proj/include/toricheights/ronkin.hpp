#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toricheights/concave.hpp"
#include "toricheights/laurent.hpp"

namespace th {

class PlaceQ {
 public:
  enum class Kind { archimedean, prime, trivial };

  static PlaceQ archimedean() { return PlaceQ(Kind::archimedean, 0); }
  static PlaceQ trivial() { return PlaceQ(Kind::trivial, 0); }
  static PlaceQ prime(std::uint64_t p);
  // "inf", "trivial" or a prime.
  static PlaceQ parse(const std::string& s);

  Kind kind() const { return kind_; }
  std::uint64_t p() const { return p_; }
  bool is_archimedean() const { return kind_ == Kind::archimedean; }
  std::string to_string() const;

  // v(c) = -log|c|_v as an exact multiple of log p (0 for the other kinds).
  Integer order(const Rational& c) const;

  bool operator==(const PlaceQ& o) const { return kind_ == o.kind_ && p_ == o.p_; }
  bool operator<(const PlaceQ& o) const { return kind_ != o.kind_ ? kind_ < o.kind_ : p_ < o.p_; }

 private:
  PlaceQ(Kind k, std::uint64_t p) : kind_(k), p_(p) {}
  Kind kind_;
  std::uint64_t p_;
};

struct QuadratureConfig {
  std::size_t budget = 512;       // total integrand evaluations per point
  std::size_t batches = 4;        // independent random shifts
  std::uint64_t seed = 1;
  std::string scheme = "rank1-lattice";
  double max_stderr = 0.25;       // larger batch spread is reported as a failure

  void validate() const;
  std::size_t per_batch() const { return (budget + batches - 1) / batches; }
};

// Sampling layout for archimedean roofs; zero steps pick defaults by dimension.
struct RoofConfig {
  double u_step = 0.0;
  double m_step = 0.0;
  double margin = 8.0;
  double window = 0.0;  // half-width override; roofs sharing it share a dual grid
};

// pushforward along an integral map: x^m -> x^{gamma m}
LaurentPolynomial pushforward(const LaurentPolynomial& f, const LinearMapQ& gamma);

PAConcave tropical_ronkin(const LaurentPolynomial& f, const PlaceQ& v);

// Half-width of the archimedean sampling window.
double ronkin_window(const LaurentPolynomial& f, double margin);

ConcaveFunction ronkin_roof(const LaurentPolynomial& f, const PlaceQ& v, const QuadratureConfig& cfg = {},
                            const RoofConfig& roof = {});

// value +- 3 standard errors
Estimate arch_ronkin_value(const LaurentPolynomial& f, const std::vector<double>& u, const QuadratureConfig& cfg = {});
Estimate arch_ronkin_value(const LaurentPolynomial& f, const RationalVector& u, const QuadratureConfig& cfg = {});
// Same estimator on every node of a grid, sharing the quadrature points.
std::vector<Estimate> arch_ronkin_grid(const LaurentPolynomial& f, const Grid& grid, const QuadratureConfig& cfg = {});

struct PushforwardEntry {
  PlaceQ place = PlaceQ::archimedean();
  std::size_t points = 0;
  bool values_ok = true;
  bool roof_checked = false;
  bool roof_ok = true;
  double max_deviation = 0;  // archimedean only
  double max_error = 0;
  std::string note;
};

struct PushforwardReport {
  LaurentPolynomial image;
  std::vector<PushforwardEntry> entries;
  bool ok() const;
};

PushforwardReport pushforward_check(const LaurentPolynomial& f, const LinearMapQ& gamma, const std::vector<PlaceQ>& places,
                                    const QuadratureConfig& cfg = {}, std::size_t points = 8);

}  // namespace th
