#include "toricheights/detail/hull.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace th::detail {

std::size_t Bits::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool Bits::subset_of(const Bits& o) const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~o.words_[i]) return false;
  }
  return true;
}

Bits Bits::operator&(const Bits& o) const {
  Bits r = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] &= o.words_[i];
  return r;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(std::vector<RationalVector>& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    Rational inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (std::size_t k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
    }
    pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  return pivots;
}

void normalize(std::vector<Integer>& v) {
  Integer g = 0;
  for (const auto& x : v) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g == 1) return;
  }
  if (g > 1) {
    for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  }
}

Integer idot(const std::vector<Integer>& a, const std::vector<Integer>& b) {
  Integer s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) mpz_addmul(s.get_mpz_t(), a[i].get_mpz_t(), b[i].get_mpz_t());
  return s;
}

}  // namespace

std::size_t rank(std::vector<RationalVector> m) { return rref(m).size(); }

Rational determinant(std::vector<RationalVector> m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m[i][c] == 0) continue;
      Rational f = m[i][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[i][k] -= f * m[c][k];
    }
  }
  return det;
}

RationalVector Chart::project(const RationalVector& p) const {
  RationalVector y(dim);
  for (std::size_t j = 0; j < dim; ++j) y[j] = p[pivots[j]];
  return y;
}

RationalVector Chart::lift(const RationalVector& y) const {
  RationalVector p = origin;
  for (std::size_t j = 0; j < dim; ++j) {
    Rational t = y[j] - origin[pivots[j]];
    if (t == 0) continue;
    for (std::size_t k = 0; k < ambient; ++k) p[k] += t * rows[j][k];
  }
  return p;
}

bool Chart::contains(const RationalVector& p) const { return lift(project(p)) == p; }

Chart affine_chart(const std::vector<RationalVector>& pts) {
  Chart ch;
  ch.ambient = pts.front().size();
  ch.origin = pts.front();
  std::vector<RationalVector> diffs;
  diffs.reserve(pts.size());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    RationalVector d(ch.ambient);
    bool nz = false;
    for (std::size_t k = 0; k < ch.ambient; ++k) {
      d[k] = pts[i][k] - ch.origin[k];
      nz = nz || d[k] != 0;
    }
    if (nz) diffs.push_back(std::move(d));
  }
  ch.pivots = rref(diffs);
  ch.rows = std::move(diffs);
  ch.dim = ch.pivots.size();
  return ch;
}

std::vector<Ray> extreme_rays(const std::vector<std::vector<Integer>>& rows) {
  const std::size_t m = rows.size();
  const std::size_t d = rows.front().size();

  // Greedy independent initial rows.
  std::vector<std::size_t> basis;
  std::vector<RationalVector> echelon;
  std::vector<std::size_t> echelon_pivot;
  for (std::size_t i = 0; i < m && basis.size() < d; ++i) {
    RationalVector r(d);
    for (std::size_t k = 0; k < d; ++k) r[k] = rows[i][k];
    for (std::size_t e = 0; e < echelon.size(); ++e) {
      std::size_t c = echelon_pivot[e];
      if (r[c] == 0) continue;
      Rational f = r[c];
      for (std::size_t k = 0; k < d; ++k) r[k] -= f * echelon[e][k];
    }
    std::size_t c = 0;
    while (c < d && r[c] == 0) ++c;
    if (c == d) continue;
    Rational inv = 1 / r[c];
    for (auto& x : r) x *= inv;
    echelon.push_back(std::move(r));
    echelon_pivot.push_back(c);
    basis.push_back(i);
  }
  if (basis.size() < d) throw Error(ErrorKind::internal, "extreme_rays: constraint matrix is rank deficient");

  // Initial rays are the columns of the inverse of the basis matrix.
  std::vector<RationalVector> aug(d, RationalVector(2 * d));
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t k = 0; k < d; ++k) aug[r][k] = rows[basis[r]][k];
    aug[r][d + r] = 1;
  }
  rref(aug);
  std::vector<Ray> rays;
  std::vector<bool> processed(m, false);
  for (auto b : basis) processed[b] = true;
  for (std::size_t j = 0; j < d; ++j) {
    RationalVector col(d);
    for (std::size_t r = 0; r < d; ++r) col[r] = aug[r][d + j];
    Ray ray;
    ray.v = primitive_integer(col);
    ray.zeros = Bits(m);
    for (std::size_t r = 0; r < d; ++r) {
      if (r != j) ray.zeros.set(basis[r]);
    }
    rays.push_back(std::move(ray));
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (processed[i]) continue;
    processed[i] = true;
    std::vector<Integer> s(rays.size());
    std::vector<std::size_t> pos, neg, zer;
    for (std::size_t r = 0; r < rays.size(); ++r) {
      s[r] = idot(rows[i], rays[r].v);
      int sg = sgn(s[r]);
      (sg > 0 ? pos : sg < 0 ? neg : zer).push_back(r);
    }
    if (neg.empty()) {
      for (auto r : zer) rays[r].zeros.set(i);
      continue;
    }
    std::vector<Ray> next;
    next.reserve(pos.size() + zer.size() + pos.size() * neg.size() / 2);
    for (auto p : pos) {
      for (auto q : neg) {
        Bits z = rays[p].zeros & rays[q].zeros;
        if (z.count() + 2 < d) continue;
        bool adjacent = true;
        for (std::size_t r = 0; r < rays.size() && adjacent; ++r) {
          if (r == p || r == q) continue;
          if (z.subset_of(rays[r].zeros)) adjacent = false;
        }
        if (!adjacent) continue;
        Ray nr;
        nr.v.resize(d);
        Integer a = s[p];
        Integer b = -s[q];
        for (std::size_t k = 0; k < d; ++k) nr.v[k] = a * rays[q].v[k] + b * rays[p].v[k];
        normalize(nr.v);
        z.set(i);
        nr.zeros = std::move(z);
        next.push_back(std::move(nr));
      }
    }
    for (auto r : zer) rays[r].zeros.set(i);
    std::vector<Ray> kept;
    kept.reserve(pos.size() + zer.size() + next.size());
    for (std::size_t r = 0; r < rays.size(); ++r) {
      if (sgn(s[r]) >= 0) kept.push_back(std::move(rays[r]));
    }
    for (auto& nr : next) kept.push_back(std::move(nr));
    rays = std::move(kept);
  }
  return rays;
}

Hull compute_hull(const std::vector<RationalVector>& pts) {
  Hull h;
  h.chart = affine_chart(pts);
  const std::size_t k = h.chart.dim;
  const std::size_t np = pts.size();
  std::vector<RationalVector> ys(np);
  for (std::size_t i = 0; i < np; ++i) ys[i] = h.chart.project(pts[i]);

  if (k == 0) {
    h.vertices = {0};
    return h;
  }
  if (k == 1) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < np; ++i) {
      if (ys[i][0] < ys[lo][0]) lo = i;
      if (ys[i][0] > ys[hi][0]) hi = i;
    }
    h.vertices = {std::min(lo, hi), std::max(lo, hi)};
    Facet fl, fh;
    RationalVector a{1, -ys[lo][0]};
    auto ia = primitive_integer(a);
    fl.normal = {ia[0]};
    fl.offset = ia[1];
    fl.points = {lo};
    RationalVector b{-1, ys[hi][0]};
    auto ib = primitive_integer(b);
    fh.normal = {ib[0]};
    fh.offset = ib[1];
    fh.points = {hi};
    h.facets = {fl, fh};
    return h;
  }

  std::vector<std::vector<Integer>> rows(np);
  for (std::size_t i = 0; i < np; ++i) {
    RationalVector r(k + 1);
    r[0] = 1;
    for (std::size_t j = 0; j < k; ++j) r[j + 1] = ys[i][j];
    rows[i] = primitive_integer(r);
  }
  auto rays = extreme_rays(rows);

  std::vector<Bits> on_facets(np, Bits(rays.size()));
  for (std::size_t f = 0; f < rays.size(); ++f) {
    Facet fc;
    fc.offset = rays[f].v[0];
    fc.normal.assign(rays[f].v.begin() + 1, rays[f].v.end());
    for (std::size_t i = 0; i < np; ++i) {
      if (rays[f].zeros.test(i)) {
        fc.points.push_back(i);
        on_facets[i].set(f);
      }
    }
    h.facets.push_back(std::move(fc));
  }
  // A point is a vertex iff no other point lies on every facet through it.
  for (std::size_t i = 0; i < np; ++i) {
    if (on_facets[i].count() < k) continue;
    bool vertex = true;
    for (std::size_t j = 0; j < np && vertex; ++j) {
      if (j != i && on_facets[i].subset_of(on_facets[j])) vertex = false;
    }
    if (vertex) h.vertices.push_back(i);
  }
  return h;
}

std::vector<RationalVector> vertices_from_inequalities(const std::vector<std::vector<Integer>>& ineqs,
                                                       std::size_t dim) {
  std::vector<std::vector<Integer>> rows = ineqs;
  std::vector<Integer> nonneg(dim + 1, Integer(0));
  nonneg[0] = 1;
  rows.push_back(nonneg);
  auto rays = extreme_rays(rows);
  std::vector<RationalVector> out;
  for (const auto& r : rays) {
    if (r.v[0] == 0) continue;
    RationalVector y(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      y[j] = Rational(r.v[j + 1], r.v[0]);
      y[j].canonicalize();
    }
    out.push_back(std::move(y));
  }
  return out;
}

}  // namespace th::detail
