#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "toricheights/rational.hpp"

namespace th {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

// Tensor grid: node i along axis a sits at lo[a] + i * step[a].
struct Grid {
  std::vector<double> lo;
  std::vector<double> step;
  std::vector<std::size_t> count;

  std::size_t dim() const { return lo.size(); }
  std::size_t size() const;
  double hi(std::size_t a) const { return lo[a] + step[a] * static_cast<double>(count[a] - 1); }
  std::vector<double> node(std::size_t flat) const;
  bool operator==(const Grid& o) const { return lo == o.lo && step == o.step && count == o.count; }

  // Grid covering [lo, hi] per axis with spacing at most h, padded by `pad` cells.
  static Grid covering(const std::vector<double>& lo, const std::vector<double>& hi, double h, std::size_t pad);
};

// out(m) = min over finite nodes u of (<m,u> + F(u)); +inf entries are ignored.
std::vector<double> discrete_conjugate(const Grid& in, const std::vector<double>& F, const Grid& out);

// Multilinear interpolation over the corners that carry values; NaN outside the grid.
double interpolate(const Grid& g, const std::vector<double>& values, const std::vector<double>& x);

// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre(std::size_t q, std::vector<double>& nodes, std::vector<double>& weights);

// Composite collapsed-coordinate rule on a simplex given by k+1 vertices in R^k.
double integrate_simplex(const std::vector<std::vector<double>>& simplex,
                         const std::function<double(const std::vector<double>&)>& f, std::size_t panels,
                         std::size_t order);

// Deterministic sub-seed derivation.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0,1)
  double normal();
  std::int64_t integer(std::int64_t lo, std::int64_t hi);  // inclusive
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Runs body(i) for i in [0,n) on the configured worker count; each index owns its
// own output slot so the result is independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);
void set_worker_count(std::size_t workers);
std::size_t worker_count();

// Harmonic number H_n = sum_{l=1}^n 1/l (H_0 = 0).
double harmonic(std::size_t n);
double log_binomial(std::size_t n, std::size_t k);

// Formats a real with 12 significant digits.
std::string format_real(double x);

}  // namespace th
