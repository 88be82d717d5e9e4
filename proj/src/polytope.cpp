#include "toricheights/polytope.hpp"

#include <algorithm>
#include <bit>

#include "toricheights/laurent.hpp"

namespace th {

namespace {

void sort_unique(std::vector<RationalVector>& pts) {
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

}  // namespace

Polytope convex_hull(std::vector<RationalVector> points, std::size_t dim) {
  if (points.empty()) fail_validation("convex_hull: empty point set");
  for (const auto& p : points) {
    if (p.size() != dim) fail_validation("convex_hull: point dimension mismatch");
  }
  sort_unique(points);
  Polytope out;
  out.dim_ = dim;
  if (dim == 0) {
    out.vertices_ = {RationalVector{}};
    auto h = std::make_shared<detail::Hull>();
    h->chart.ambient = 0;
    h->vertices = {0};
    out.hull_ = std::move(h);
    return out;
  }
  detail::Hull full = detail::compute_hull(points);
  std::vector<std::size_t> remap(points.size(), SIZE_MAX);
  auto h = std::make_shared<detail::Hull>();
  h->chart = std::move(full.chart);
  std::sort(full.vertices.begin(), full.vertices.end());
  for (std::size_t i = 0; i < full.vertices.size(); ++i) {
    remap[full.vertices[i]] = i;
    out.vertices_.push_back(points[full.vertices[i]]);
    h->vertices.push_back(i);
  }
  for (auto& f : full.facets) {
    detail::Facet g;
    g.normal = std::move(f.normal);
    g.offset = std::move(f.offset);
    for (auto idx : f.points) {
      if (remap[idx] != SIZE_MAX) g.points.push_back(remap[idx]);
    }
    h->facets.push_back(std::move(g));
  }
  out.hull_ = std::move(h);
  return out;
}

bool Polytope::contains(const RationalVector& p) const {
  if (p.size() != dim_) fail_validation("contains: dimension mismatch");
  const auto& ch = hull_->chart;
  if (dim_ == 0) return true;
  if (!ch.contains(p)) return false;
  if (ch.dim == 0) return true;
  RationalVector y = ch.project(p);
  for (const auto& f : hull_->facets) {
    Rational s = f.offset;
    for (std::size_t j = 0; j < ch.dim; ++j) s += f.normal[j] * y[j];
    if (s < 0) return false;
  }
  return true;
}

LinearMapQ LinearMapQ::identity(std::size_t n) {
  LinearMapQ g;
  g.source_dim = g.target_dim = n;
  g.matrix.assign(n, RationalVector(n, 0));
  for (std::size_t i = 0; i < n; ++i) g.matrix[i][i] = 1;
  return g;
}

LinearMapQ LinearMapQ::from_rows(std::vector<RationalVector> rows, std::size_t source_dim) {
  for (const auto& r : rows) {
    if (r.size() != source_dim) fail_validation("linear map: inconsistent row length");
  }
  LinearMapQ g;
  g.source_dim = source_dim;
  g.target_dim = rows.size();
  g.matrix = std::move(rows);
  return g;
}

RationalVector LinearMapQ::apply(const RationalVector& x) const {
  if (x.size() != source_dim) fail_validation("linear map: source dimension mismatch");
  RationalVector y(target_dim);
  for (std::size_t i = 0; i < target_dim; ++i) y[i] = dot(matrix[i], x);
  return y;
}

LinearMapQ LinearMapQ::transpose() const {
  LinearMapQ t;
  t.source_dim = target_dim;
  t.target_dim = source_dim;
  t.matrix.assign(source_dim, RationalVector(target_dim));
  for (std::size_t i = 0; i < target_dim; ++i) {
    for (std::size_t j = 0; j < source_dim; ++j) t.matrix[j][i] = matrix[i][j];
  }
  return t;
}

Polytope minkowski_sum(const Polytope& p, const Polytope& q) {
  if (p.ambient_dim() != q.ambient_dim()) fail_validation("minkowski_sum: dimension mismatch");
  std::vector<RationalVector> pts;
  pts.reserve(p.vertices().size() * q.vertices().size());
  for (const auto& a : p.vertices()) {
    for (const auto& b : q.vertices()) {
      RationalVector s(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) s[k] = a[k] + b[k];
      pts.push_back(std::move(s));
    }
  }
  return convex_hull(std::move(pts), p.ambient_dim());
}

Rational simplex_volume(const std::vector<RationalVector>& s) {
  const std::size_t n = s.size() - 1;
  std::vector<RationalVector> m(n, RationalVector(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) m[i][k] = s[i + 1][k] - s[0][k];
  }
  Rational d = abs(detail::determinant(std::move(m)));
  return d / Rational(factorial(static_cast<unsigned>(n)));
}

namespace {

void triangulate_into(const std::vector<RationalVector>& all, const std::vector<std::size_t>& ids,
                      std::vector<std::vector<std::size_t>>& out) {
  std::vector<RationalVector> pts;
  pts.reserve(ids.size());
  for (auto i : ids) pts.push_back(all[i]);
  detail::Hull h = detail::compute_hull(pts);
  const std::size_t k = h.chart.dim;
  if (k == 0) {
    out.push_back({ids[0]});
    return;
  }
  if (k == 1) {
    out.push_back({ids[h.vertices[0]], ids[h.vertices[1]]});
    return;
  }
  std::vector<bool> is_vertex(pts.size(), false);
  for (auto v : h.vertices) is_vertex[v] = true;
  std::size_t apex = h.vertices[0];
  for (auto v : h.vertices) {
    if (lex_less(pts[v], pts[apex])) apex = v;
  }
  for (const auto& f : h.facets) {
    if (std::find(f.points.begin(), f.points.end(), apex) != f.points.end()) continue;
    std::vector<std::size_t> sub;
    for (auto p : f.points) {
      if (is_vertex[p]) sub.push_back(ids[p]);
    }
    std::vector<std::vector<std::size_t>> facet_simplices;
    triangulate_into(all, sub, facet_simplices);
    for (auto& s : facet_simplices) {
      s.insert(s.begin(), ids[apex]);
      out.push_back(std::move(s));
    }
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> triangulate(const std::vector<RationalVector>& pts) {
  std::vector<std::size_t> ids(pts.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  std::vector<std::vector<std::size_t>> out;
  if (pts.empty()) return out;
  if (pts.front().empty()) return {{0}};
  triangulate_into(pts, ids, out);
  return out;
}

Rational volume(const Polytope& p) {
  const std::size_t n = p.ambient_dim();
  if (n == 0) return 1;
  if (p.affine_dim() < n) return 0;
  const auto& vs = p.vertices();
  Rational total = 0;
  for (const auto& s : triangulate(vs)) {
    std::vector<RationalVector> simplex;
    for (auto i : s) simplex.push_back(vs[i]);
    total += simplex_volume(simplex);
  }
  return total;
}

Rational mixed_volume(const std::vector<Polytope>& ps) {
  const std::size_t n = ps.size();
  if (n == 0) fail_validation("mixed_volume: no polytopes");
  if (n > 20) fail_validation("mixed_volume: too many polytopes");
  for (const auto& p : ps) {
    if (p.ambient_dim() != n) fail_validation("mixed_volume: need n polytopes in dimension n");
  }
  std::vector<Polytope> sums(std::size_t{1} << n);
  Rational total = 0;
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    std::size_t low = static_cast<std::size_t>(std::countr_zero(mask));
    std::size_t rest = mask & (mask - 1);
    sums[mask] = rest == 0 ? ps[low] : minkowski_sum(sums[rest], ps[low]);
    std::size_t size = static_cast<std::size_t>(std::popcount(mask));
    Rational v = volume(sums[mask]);
    if ((n - size) % 2 == 0) {
      total += v;
    } else {
      total -= v;
    }
  }
  return total;
}

Polytope project(const Polytope& p, const LinearMapQ& gamma) {
  if (gamma.source_dim != p.ambient_dim()) fail_validation("project: dimension mismatch");
  std::vector<RationalVector> img;
  img.reserve(p.vertices().size());
  for (const auto& v : p.vertices()) img.push_back(gamma.apply(v));
  return convex_hull(std::move(img), gamma.target_dim);
}

Polytope newton_polytope(const LaurentPolynomial& f) {
  if (f.is_zero()) fail_validation("newton_polytope: zero polynomial");
  std::vector<RationalVector> pts;
  for (const auto& [e, c] : f.terms()) {
    RationalVector v(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) v[i] = Rational(static_cast<long>(e[i]));
    pts.push_back(std::move(v));
  }
  return convex_hull(std::move(pts), f.n_vars());
}

Polytope translate(const Polytope& p, const RationalVector& t) {
  std::vector<RationalVector> pts = p.vertices();
  for (auto& v : pts) {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += t[k];
  }
  return convex_hull(std::move(pts), p.ambient_dim());
}

Polytope dilate(const Polytope& p, const Rational& s) {
  std::vector<RationalVector> pts = p.vertices();
  for (auto& v : pts) {
    for (auto& x : v) x *= s;
  }
  return convex_hull(std::move(pts), p.ambient_dim());
}

Polytope unit_simplex(std::size_t n) {
  std::vector<RationalVector> pts(n + 1, RationalVector(n, 0));
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] = 1;
  return convex_hull(std::move(pts), n);
}

Polytope unit_cube(std::size_t n) {
  std::vector<RationalVector> pts;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    RationalVector v(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) v[i] = 1;
    }
    pts.push_back(std::move(v));
  }
  return convex_hull(std::move(pts), n);
}

Polytope segment(const RationalVector& a, const RationalVector& b) {
  return convex_hull({a, b}, a.size());
}

}  // namespace th
