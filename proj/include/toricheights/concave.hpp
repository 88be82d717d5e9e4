#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "toricheights/numeric.hpp"
#include "toricheights/polytope.hpp"

namespace th {

// u -> <slope,u> + constant
struct AffinePiece {
  RationalVector slope;
  Rational constant;
  bool operator==(const AffinePiece& o) const { return slope == o.slope && constant == o.constant; }
};

// Values of a PAConcave are stored as rationals times a common scale: 1, or log p.
// For functions on a bounded domain the value is scale * core(m); for functions on
// all of space it is scale * core(u / scale). Both conventions commute with duality.
struct ValueScale {
  std::uint64_t log_of = 0;  // 0 means the scale is 1

  double value() const;
  bool operator==(const ValueScale& o) const { return log_of == o.log_of; }
};

struct ScaledRational {
  Rational coeff;
  ValueScale scale;
  double value() const { return to_double(coeff) * scale.value(); }
};

class PAConcave {
 public:
  PAConcave() = default;

  // min of pieces over all of R^dim.
  static PAConcave unbounded(std::size_t dim, const std::vector<AffinePiece>& pieces, ValueScale scale = {});
  // min of pieces restricted to a polytope.
  static PAConcave on_domain(const Polytope& domain, const std::vector<AffinePiece>& pieces, ValueScale scale = {});
  // Smallest concave function on hull{m_k} with value >= t_k at m_k.
  static PAConcave upper_envelope(std::vector<RationalVector> ms, std::vector<Rational> ts, std::size_t dim,
                                  ValueScale scale = {});

  std::size_t ambient_dim() const { return dim_; }
  bool bounded() const { return bounded_; }
  const Polytope& domain() const { return domain_; }
  // Sorted by slope; canonical.
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  // Vertices (m, core value) of the hypograph top, bounded functions only.
  const std::vector<RationalVector>& breakpoint_positions() const { return bp_m_; }
  const std::vector<Rational>& breakpoint_values() const { return bp_t_; }
  ValueScale scale() const { return scale_; }
  bool is_zero() const;

  // Core value at a point (domain point when bounded, u / scale otherwise).
  Rational core_value(const RationalVector& x) const;
  // Actual value; for bounded functions the point must lie in the domain.
  double value(const std::vector<double>& x) const;
  // Min-of-pieces extension of a bounded function outside its domain.
  double extended_value(const std::vector<double>& m) const;

  bool operator==(const PAConcave& o) const;

 private:
  std::size_t dim_ = 0;
  bool bounded_ = true;
  Polytope domain_;
  std::vector<AffinePiece> pieces_;
  std::vector<RationalVector> bp_m_;
  std::vector<Rational> bp_t_;
  ValueScale scale_;
};

class SampledConcave {
 public:
  SampledConcave() = default;
  SampledConcave(Grid grid, std::vector<double> values, Polytope domain, double lipschitz, double error);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const Polytope& domain() const { return domain_; }
  std::size_t ambient_dim() const { return grid_.dim(); }
  double lipschitz() const { return lipschitz_; }
  double error() const { return error_; }
  double value(const std::vector<double>& x) const { return interpolate(grid_, values_, x); }

  // Optional conjugate on the dual side (for roofs: the sampled Ronkin function).
  const std::shared_ptr<const SampledConcave>& conjugate() const { return conjugate_; }
  void set_conjugate(std::shared_ptr<const SampledConcave> c) { conjugate_ = std::move(c); }

  // Midpoint concavity over interior grid triples with tolerance 4 * lip * h.
  bool midpoint_concave() const;

 private:
  Grid grid_;
  std::vector<double> values_;
  Polytope domain_;
  double lipschitz_ = 0;
  double error_ = 0;
  std::shared_ptr<const SampledConcave> conjugate_;
};

using ConcaveFunction = std::variant<PAConcave, SampledConcave>;

struct NumericConfig {
  double u_radius = 8.0;     // half-width of the dual-side window when one must be chosen
  double u_step = 0.02;
  double m_step = 0.005;
  std::size_t panels = 24;   // composite panels per collapsed coordinate
  std::size_t order = 4;     // Gauss points per panel
};

PAConcave indicator(const Polytope& p);
PAConcave legendre_dual(const PAConcave& f);
PAConcave sup_convolution(const PAConcave& f, const PAConcave& g);
PAConcave add(const PAConcave& f, const PAConcave& g);  // unbounded + unbounded
PAConcave direct_image(const LinearMapQ& gamma, const PAConcave& f);
PAConcave scale_values(const PAConcave& f, const Rational& s);  // bounded, s >= 0

ScaledRational integral(const PAConcave& f);
ScaledRational mixed_integral(const std::vector<PAConcave>& fs);

SampledConcave sample(const PAConcave& f, const Grid& grid);
// Dual grid chosen from the observed slope range.
SampledConcave dual_sampled(const SampledConcave& f);
SampledConcave dual_sampled(const SampledConcave& f, const Grid& target, const Polytope& domain);

Estimate integral(const SampledConcave& f, const NumericConfig& cfg = {});
// Exact when every input is PAConcave with a common scale, numeric otherwise.
struct MixedIntegralResult {
  Estimate estimate;
  std::optional<ScaledRational> exact;
};
MixedIntegralResult mixed_integral(const std::vector<ConcaveFunction>& fs, const NumericConfig& cfg = {});
Estimate mixed_integral_numeric(const std::vector<ConcaveFunction>& fs, const NumericConfig& cfg = {});

Polytope box_polytope(const Grid& g);
std::size_t ambient_dim(const ConcaveFunction& f);
const Polytope& domain_of(const ConcaveFunction& f);

}  // namespace th
