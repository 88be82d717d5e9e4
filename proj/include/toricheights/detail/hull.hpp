#pragma once

#include <cstdint>
#include <vector>

#include "toricheights/rational.hpp"

namespace th::detail {

class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  std::size_t count() const;
  bool subset_of(const Bits& o) const;
  Bits operator&(const Bits& o) const;
  bool operator==(const Bits& o) const { return words_ == o.words_; }

 private:
  std::vector<std::uint64_t> words_;
};

// Affine hull of a point set: p = origin + sum_j (y_j - origin[pivots[j]]) rows[j],
// with chart coordinates y = p[pivots].
struct Chart {
  std::size_t ambient = 0;
  std::size_t dim = 0;
  RationalVector origin;
  std::vector<std::size_t> pivots;
  std::vector<RationalVector> rows;

  RationalVector project(const RationalVector& p) const;
  RationalVector lift(const RationalVector& y) const;
  bool contains(const RationalVector& p) const;
};

Chart affine_chart(const std::vector<RationalVector>& pts);

// normal . y + offset >= 0 in chart coordinates.
struct Facet {
  std::vector<Integer> normal;
  Integer offset;
  std::vector<std::size_t> points;
};

struct Hull {
  Chart chart;
  std::vector<std::size_t> vertices;
  std::vector<Facet> facets;
};

// Points must be pairwise distinct. Vertex indices refer to the input order.
Hull compute_hull(const std::vector<RationalVector>& pts);

struct Ray {
  std::vector<Integer> v;
  Bits zeros;
};

// Extreme rays of {x : A x >= 0}; A must have full column rank.
std::vector<Ray> extreme_rays(const std::vector<std::vector<Integer>>& rows);

// Vertices of the bounded polytope {y : b_j + c_j . y >= 0}; each inequality is
// (b_j, c_j...). The polytope must be full-dimensional and bounded.
std::vector<RationalVector> vertices_from_inequalities(const std::vector<std::vector<Integer>>& ineqs,
                                                       std::size_t dim);

// Rank of a rational matrix.
std::size_t rank(std::vector<RationalVector> m);

// Determinant of a square rational matrix.
Rational determinant(std::vector<RationalVector> m);

}  // namespace th::detail
