#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "toricheights/concave.hpp"
#include "toricheights/laurent.hpp"
#include "toricheights/ronkin.hpp"

namespace th {

// A polytope with one roof function per place. Places without an entry carry the
// zero roof, i.e. the canonical metric.
class ToricDivisorData {
 public:
  ToricDivisorData() = default;
  explicit ToricDivisorData(Polytope polytope);

  const Polytope& polytope() const { return polytope_; }
  std::size_t ambient_dim() const { return polytope_.ambient_dim(); }
  // The roof's domain must equal the polytope. Zero PA roofs are not stored.
  void set_roof(const PlaceQ& v, ConcaveFunction roof);
  ConcaveFunction roof(const PlaceQ& v) const;
  const std::map<PlaceQ, ConcaveFunction>& roofs() const { return roofs_; }
  // The non-canonical places, sorted.
  std::vector<PlaceQ> places() const;

 private:
  Polytope polytope_;
  std::map<PlaceQ, ConcaveFunction> roofs_;
};

struct PlaceContribution {
  PlaceQ place = PlaceQ::archimedean();
  double value = 0;
  double error = 0;
  std::optional<ScaledRational> exact;
};

struct HeightReport {
  std::vector<PlaceContribution> contributions;
  double total = 0;
  double error = 0;
};

struct ToricConfig {
  QuadratureConfig quadrature;
  RoofConfig roof;
  double mi_step = 0;  // m-grid spacing of numeric mixed integrals; 0 picks by dimension
};

// Sum over the non-canonical places of the mixed integral of the n+1 roofs.
HeightReport toric_height(const std::vector<ToricDivisorData>& ds, const ToricConfig& cfg = {});
// n divisors and one polynomial whose Ronkin roofs fill the last slot.
HeightReport hypersurface_height(const std::vector<ToricDivisorData>& ds, const LaurentPolynomial& f,
                                 const ToricConfig& cfg = {});
// n-m+1 divisors and m polynomials. With no polynomials this is toric_height.
HeightReport gualdi_limit(const std::vector<ToricDivisorData>& ds, const std::vector<LaurentPolynomial>& fs,
                          const ToricConfig& cfg = {});
// Places where some roof can be non-zero: divisor places, primes of the
// coefficients, and the archimedean place when polynomials are present.
std::vector<PlaceQ> relevant_places(const std::vector<ToricDivisorData>& ds, const std::vector<LaurentPolynomial>& fs);

// Indicators of k polytopes in the span of the first k coordinates together with
// n-k+1 functions on R^n.
struct PushforwardInstance {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<Polytope> deltas;
  std::vector<PAConcave> gs;
};

struct PushforwardReduction {
  Rational mv_full;       // MV_M(deltas, domains of the first n-k functions)
  Rational mv_product;    // MV_L(deltas) * MV_P(projected domains)
  ScaledRational mi_full;
  ScaledRational mi_product;  // MV_L(deltas) * MI_P(direct images)
  bool mv_ok() const { return mv_full == mv_product; }
  bool mi_ok() const;
  bool ok() const { return mv_ok() && mi_ok(); }
};

PushforwardReduction pushforward_reduction_check(const PushforwardInstance& inst);
// Random instance; with `simplices` the deltas are unit simplices and the
// functions live on products of simplices.
PushforwardInstance random_pushforward_instance(std::size_t n, std::size_t k, std::uint64_t seed, bool simplices);

struct TorsionDraw {
  std::size_t index = 0;                // attempt number, which fixes the draw's seed
  std::vector<std::uint64_t> exponents; // k_ij, row-major: translate of f_i in x_j
  double height = 0;
  double error = 0;
};

struct TorsionReport {
  std::uint64_t conductor = 1;
  std::uint64_t seed = 0;
  std::size_t requested = 0;
  std::size_t attempts = 0;
  std::size_t singular = 0;  // translated system without a unique solution
  std::size_t boundary = 0;  // solution off the torus
  std::vector<TorsionDraw> draws;
  double mean = 0, min = 0, max = 0, stderr_ = 0;
  std::optional<HeightReport> limit;
  bool all_degenerate() const { return draws.empty(); }
};

// Heights of the intersection points of the linear f_i translated by random
// primitive N-th roots. Stops after `samples` valid draws or 20 * samples attempts.
TorsionReport torsion_experiment(const std::vector<LaurentPolynomial>& fs, std::uint64_t N, std::size_t samples,
                                 std::uint64_t seed, double precision = 1e-9);

}  // namespace th
