#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "toricheights/detail/lattice.hpp"
#include "toricheights/rational.hpp"

namespace th::detail {

namespace {

double p2_merit(std::uint64_t a, std::size_t n, std::size_t d) {
  double total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double prod = 1;
    std::uint64_t g = 1;
    for (std::size_t i = 0; i < d; ++i) {
      double x = static_cast<double>((j * g) % n) / static_cast<double>(n);
      prod *= 1 + 2 * M_PI * M_PI * (x * x - x + 1.0 / 6.0);
      g = (g * a) % n;
    }
    total += prod;
  }
  return total / static_cast<double>(n) - 1;
}

}  // namespace

std::vector<std::uint64_t> lattice_generator(std::size_t n, std::size_t d) {
  if (d == 0) return {};
  if (d == 1 || n <= 2) return std::vector<std::uint64_t>(d, 1);
  static std::mutex mu;
  static std::map<std::pair<std::size_t, std::size_t>, std::vector<std::uint64_t>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, d);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::uint64_t best_a = 1;
  double best = std::numeric_limits<double>::infinity();
  // Candidates restricted to a deterministic subset to keep the search cheap.
  std::size_t stride = std::max<std::size_t>(1, n / 512) | 1;
  for (std::uint64_t a = 2; a < n; a += stride) {
    if (std::gcd(a, static_cast<std::uint64_t>(n)) != 1) continue;
    double m = p2_merit(a, n, d);
    if (m < best) {
      best = m;
      best_a = a;
    }
  }
  std::vector<std::uint64_t> g(d);
  std::uint64_t p = 1;
  for (std::size_t i = 0; i < d; ++i) {
    g[i] = p;
    p = (p * best_a) % n;
  }
  cache[key] = g;
  return g;
}

std::size_t lattice_size(std::size_t n) {
  std::size_t p = std::max<std::size_t>(n, 2);
  while (!is_prime(p)) ++p;
  return p;
}

void lattice_point(const std::vector<std::uint64_t>& g, std::size_t n, std::size_t j, const std::vector<double>& shift,
                   std::vector<double>& out) {
  out.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double x = static_cast<double>((j * g[i]) % n) / static_cast<double>(n) + shift[i];
    out[i] = x - std::floor(x);
  }
}

}  // namespace th::detail
