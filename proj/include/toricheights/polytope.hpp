#pragma once

#include <memory>
#include <vector>

#include "toricheights/detail/hull.hpp"
#include "toricheights/rational.hpp"

namespace th {

class LaurentPolynomial;

// Convex polytope stored by its vertices, sorted lexicographically.
class Polytope {
 public:
  Polytope() = default;

  std::size_t ambient_dim() const { return dim_; }
  const std::vector<RationalVector>& vertices() const { return vertices_; }
  bool empty() const { return vertices_.empty(); }
  std::size_t affine_dim() const { return hull_->chart.dim; }
  // Facets are expressed in the chart coordinates of the affine hull; facet point
  // indices refer to vertices().
  const detail::Hull& hull() const { return *hull_; }

  bool contains(const RationalVector& p) const;
  bool operator==(const Polytope& o) const { return dim_ == o.dim_ && vertices_ == o.vertices_; }

  friend Polytope convex_hull(std::vector<RationalVector> points, std::size_t dim);

 private:
  std::size_t dim_ = 0;
  std::vector<RationalVector> vertices_;
  std::shared_ptr<const detail::Hull> hull_;
};

// Rows of `matrix` are indexed by the target coordinates.
struct LinearMapQ {
  std::size_t source_dim = 0;
  std::size_t target_dim = 0;
  std::vector<RationalVector> matrix;

  static LinearMapQ identity(std::size_t n);
  static LinearMapQ from_rows(std::vector<RationalVector> rows, std::size_t source_dim);
  RationalVector apply(const RationalVector& x) const;
  LinearMapQ transpose() const;
};

Polytope convex_hull(std::vector<RationalVector> points, std::size_t dim);
Polytope minkowski_sum(const Polytope& p, const Polytope& q);
Rational volume(const Polytope& p);
Rational mixed_volume(const std::vector<Polytope>& ps);
Polytope project(const Polytope& p, const LinearMapQ& gamma);
Polytope newton_polytope(const LaurentPolynomial& f);

Polytope translate(const Polytope& p, const RationalVector& t);
Polytope dilate(const Polytope& p, const Rational& s);
Polytope unit_simplex(std::size_t n);
Polytope unit_cube(std::size_t n);
Polytope segment(const RationalVector& a, const RationalVector& b);

// Simplices (index tuples into pts) triangulating the hull of distinct points, of
// the hull's affine dimension.
std::vector<std::vector<std::size_t>> triangulate(const std::vector<RationalVector>& pts);

// |det| of the edge matrix of a full-dimensional simplex divided by n!.
Rational simplex_volume(const std::vector<RationalVector>& simplex);

}  // namespace th
