#include "toricheights/concave.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>

namespace th {

double ValueScale::value() const { return log_of == 0 ? 1.0 : std::log(static_cast<double>(log_of)); }

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LiftedHull {
  std::vector<RationalVector> lifted;  // (t, m...)
  std::size_t top_count = 0;           // first top_count entries are the data points
  detail::Hull hull;
  std::size_t t_chart_index = 0;
};

// Hull of the points (t_k, m_k) together with floor points below every vertex of
// the domain; the upper facets carry the concave envelope.
LiftedHull lift(const std::vector<RationalVector>& ms, const std::vector<Rational>& ts, const Polytope& domain) {
  LiftedHull L;
  Rational floor = *std::min_element(ts.begin(), ts.end()) - 1;
  for (std::size_t k = 0; k < ms.size(); ++k) {
    RationalVector p;
    p.reserve(ms[k].size() + 1);
    p.push_back(ts[k]);
    p.insert(p.end(), ms[k].begin(), ms[k].end());
    L.lifted.push_back(std::move(p));
  }
  L.top_count = L.lifted.size();
  for (const auto& v : domain.vertices()) {
    RationalVector p;
    p.push_back(floor);
    p.insert(p.end(), v.begin(), v.end());
    L.lifted.push_back(std::move(p));
  }
  L.hull = detail::compute_hull(L.lifted);
  const auto& piv = L.hull.chart.pivots;
  auto it = std::find(piv.begin(), piv.end(), std::size_t{0});
  if (it == piv.end()) throw Error(ErrorKind::internal, "lifted hull lost the value axis");
  L.t_chart_index = static_cast<std::size_t>(it - piv.begin());
  return L;
}

bool scale_free(const PAConcave& f) {
  if (f.bounded()) return f.is_zero();
  for (const auto& p : f.pieces()) {
    if (p.constant != 0) return false;
  }
  return true;
}

ValueScale combine(const PAConcave& f, const PAConcave& g) {
  if (scale_free(f)) return g.scale();
  if (scale_free(g)) return f.scale();
  if (f.scale() == g.scale()) return f.scale();
  fail_validation("incompatible value scales in exact concave arithmetic");
}

std::vector<double> to_doubles(const RationalVector& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

}  // namespace

PAConcave PAConcave::upper_envelope(std::vector<RationalVector> ms, std::vector<Rational> ts, std::size_t dim,
                                    ValueScale scale) {
  if (ms.empty() || ms.size() != ts.size()) fail_validation("upper_envelope: need matching nonempty data");
  for (const auto& m : ms) {
    if (m.size() != dim) fail_validation("upper_envelope: dimension mismatch");
  }
  // Keep the largest value per position.
  std::map<RationalVector, Rational, decltype(&lex_less)> best(&lex_less);
  for (std::size_t k = 0; k < ms.size(); ++k) {
    auto [it, inserted] = best.emplace(ms[k], ts[k]);
    if (!inserted && ts[k] > it->second) it->second = ts[k];
  }
  ms.clear();
  ts.clear();
  for (auto& [m, t] : best) {
    ms.push_back(m);
    ts.push_back(t);
  }
  PAConcave f;
  f.dim_ = dim;
  f.bounded_ = true;
  f.scale_ = scale;
  f.domain_ = convex_hull(ms, dim);
  if (dim == 0) {
    f.bp_m_ = {RationalVector{}};
    f.bp_t_ = {ts[0]};
    f.pieces_ = {AffinePiece{{}, ts[0]}};
    return f;
  }
  LiftedHull L = lift(ms, ts, f.domain_);
  const auto& ch = L.hull.chart;
  for (auto v : L.hull.vertices) {
    if (v < L.top_count) {
      f.bp_m_.push_back(ms[v]);
      f.bp_t_.push_back(ts[v]);
    }
  }
  // ms is sorted, and hull vertices come back in input order.
  std::vector<std::size_t> order(f.bp_m_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return lex_less(f.bp_m_[a], f.bp_m_[b]); });
  {
    std::vector<RationalVector> m2;
    std::vector<Rational> t2;
    for (auto i : order) {
      m2.push_back(f.bp_m_[i]);
      t2.push_back(f.bp_t_[i]);
    }
    f.bp_m_ = std::move(m2);
    f.bp_t_ = std::move(t2);
  }
  for (const auto& fc : L.hull.facets) {
    const Integer& ct = fc.normal[L.t_chart_index];
    if (ct >= 0) continue;
    Rational denom(-ct);
    AffinePiece p;
    p.slope.assign(dim, Rational(0));
    for (std::size_t j = 0; j < ch.dim; ++j) {
      if (j == L.t_chart_index) continue;
      p.slope[ch.pivots[j] - 1] = Rational(fc.normal[j]) / denom;
    }
    p.constant = Rational(fc.offset) / denom;
    f.pieces_.push_back(std::move(p));
  }
  std::sort(f.pieces_.begin(), f.pieces_.end(), [](const AffinePiece& a, const AffinePiece& b) {
    if (a.slope != b.slope) return lex_less(a.slope, b.slope);
    return a.constant < b.constant;
  });
  return f;
}

PAConcave PAConcave::unbounded(std::size_t dim, const std::vector<AffinePiece>& pieces, ValueScale scale) {
  if (pieces.empty()) fail_validation("unbounded: no pieces");
  std::vector<RationalVector> ms;
  std::vector<Rational> ts;
  for (const auto& p : pieces) {
    if (p.slope.size() != dim) fail_validation("unbounded: slope dimension mismatch");
    ms.push_back(p.slope);
    ts.push_back(-p.constant);
  }
  PAConcave env = upper_envelope(std::move(ms), std::move(ts), dim, scale);
  PAConcave f;
  f.dim_ = dim;
  f.bounded_ = false;
  f.scale_ = scale;
  for (std::size_t k = 0; k < env.bp_m_.size(); ++k) f.pieces_.push_back(AffinePiece{env.bp_m_[k], -env.bp_t_[k]});
  return f;
}

PAConcave PAConcave::on_domain(const Polytope& domain, const std::vector<AffinePiece>& pieces, ValueScale scale) {
  if (pieces.empty()) fail_validation("on_domain: no pieces");
  const std::size_t n = domain.ambient_dim();
  for (const auto& p : pieces) {
    if (p.slope.size() != n) fail_validation("on_domain: slope dimension mismatch");
  }
  auto eval = [&](const RationalVector& m) {
    Rational best = dot(pieces[0].slope, m) + pieces[0].constant;
    for (const auto& p : pieces) best = std::min(best, Rational(dot(p.slope, m) + p.constant));
    return best;
  };
  const auto& ch = domain.hull().chart;
  const std::size_t k = domain.affine_dim();
  std::vector<RationalVector> ms;
  std::vector<Rational> ts;
  if (k == 0 || n == 0) {
    ms.push_back(domain.vertices()[0]);
    ts.push_back(eval(domain.vertices()[0]));
    return upper_envelope(std::move(ms), std::move(ts), n, scale);
  }
  Rational floor = eval(domain.vertices()[0]);
  for (const auto& v : domain.vertices()) floor = std::min(floor, eval(v));
  floor -= 1;
  std::vector<std::vector<Integer>> rows;
  for (const auto& fc : domain.hull().facets) {
    RationalVector r(k + 2, Rational(0));
    r[0] = fc.offset;
    for (std::size_t j = 0; j < k; ++j) r[j + 1] = fc.normal[j];
    rows.push_back(primitive_integer(r));
  }
  for (const auto& p : pieces) {
    RationalVector r(k + 2, Rational(0));
    Rational alpha = dot(p.slope, ch.origin);
    for (std::size_t j = 0; j < k; ++j) {
      Rational beta = dot(p.slope, ch.rows[j]);
      r[j + 1] = beta;
      alpha -= ch.origin[ch.pivots[j]] * beta;
    }
    r[0] = alpha + p.constant;
    r[k + 1] = -1;
    rows.push_back(primitive_integer(r));
  }
  {
    RationalVector r(k + 2, Rational(0));
    r[0] = -floor;
    r[k + 1] = 1;
    rows.push_back(primitive_integer(r));
  }
  for (const auto& y : detail::vertices_from_inequalities(rows, k + 1)) {
    if (y[k] <= floor) continue;
    RationalVector yc(y.begin(), y.begin() + static_cast<long>(k));
    ms.push_back(ch.lift(yc));
    ts.push_back(y[k]);
  }
  return upper_envelope(std::move(ms), std::move(ts), n, scale);
}

bool PAConcave::is_zero() const {
  if (!bounded_) return false;
  return std::all_of(bp_t_.begin(), bp_t_.end(), [](const Rational& t) { return t == 0; });
}

Rational PAConcave::core_value(const RationalVector& x) const {
  if (x.size() != dim_) fail_validation("core_value: dimension mismatch");
  if (bounded_ && !domain_.contains(x)) fail_validation("core_value: point outside the domain");
  Rational best = dot(pieces_[0].slope, x) + pieces_[0].constant;
  for (const auto& p : pieces_) best = std::min(best, Rational(dot(p.slope, x) + p.constant));
  return best;
}

double PAConcave::extended_value(const std::vector<double>& m) const {
  double lam = scale_.value();
  double best = kInf;
  for (const auto& p : pieces_) {
    double s = to_double(p.constant);
    for (std::size_t i = 0; i < dim_; ++i) s += to_double(p.slope[i]) * m[i];
    best = std::min(best, s);
  }
  return best * lam;
}

double PAConcave::value(const std::vector<double>& x) const {
  if (bounded_) return extended_value(x);
  double lam = scale_.value();
  double best = kInf;
  for (const auto& p : pieces_) {
    double s = to_double(p.constant) * lam;
    for (std::size_t i = 0; i < dim_; ++i) s += to_double(p.slope[i]) * x[i];
    best = std::min(best, s);
  }
  return best;
}

bool PAConcave::operator==(const PAConcave& o) const {
  if (dim_ != o.dim_ || bounded_ != o.bounded_ || pieces_ != o.pieces_) return false;
  if (!scale_free(*this) && !(scale_ == o.scale_)) return false;
  return !bounded_ || domain_ == o.domain_;
}

PAConcave indicator(const Polytope& p) {
  return PAConcave::upper_envelope(p.vertices(), std::vector<Rational>(p.vertices().size(), Rational(0)),
                                   p.ambient_dim());
}

PAConcave legendre_dual(const PAConcave& f) {
  if (f.bounded()) {
    std::vector<AffinePiece> pieces;
    for (std::size_t k = 0; k < f.breakpoint_positions().size(); ++k) {
      pieces.push_back(AffinePiece{f.breakpoint_positions()[k], -f.breakpoint_values()[k]});
    }
    return PAConcave::unbounded(f.ambient_dim(), pieces, f.scale());
  }
  std::vector<RationalVector> ms;
  std::vector<Rational> ts;
  for (const auto& p : f.pieces()) {
    ms.push_back(p.slope);
    ts.push_back(-p.constant);
  }
  return PAConcave::upper_envelope(std::move(ms), std::move(ts), f.ambient_dim(), f.scale());
}

PAConcave add(const PAConcave& f, const PAConcave& g) {
  if (f.bounded() || g.bounded()) fail_validation("add: expects functions on all of space");
  if (f.ambient_dim() != g.ambient_dim()) fail_validation("add: dimension mismatch");
  ValueScale s = combine(f, g);
  std::vector<AffinePiece> pieces;
  for (const auto& a : f.pieces()) {
    for (const auto& b : g.pieces()) {
      RationalVector m(a.slope.size());
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = a.slope[i] + b.slope[i];
      pieces.push_back(AffinePiece{std::move(m), a.constant + b.constant});
    }
  }
  return PAConcave::unbounded(f.ambient_dim(), pieces, s);
}

PAConcave sup_convolution(const PAConcave& f, const PAConcave& g) {
  if (!f.bounded() || !g.bounded()) fail_validation("sup_convolution: expects bounded domains");
  if (f.ambient_dim() != g.ambient_dim()) fail_validation("sup_convolution: dimension mismatch");
  return legendre_dual(add(legendre_dual(f), legendre_dual(g)));
}

PAConcave direct_image(const LinearMapQ& gamma, const PAConcave& f) {
  if (!f.bounded()) fail_validation("direct_image: expects a bounded domain");
  if (gamma.source_dim != f.ambient_dim()) fail_validation("direct_image: dimension mismatch");
  std::vector<RationalVector> ms;
  for (const auto& m : f.breakpoint_positions()) ms.push_back(gamma.apply(m));
  return PAConcave::upper_envelope(std::move(ms), f.breakpoint_values(), gamma.target_dim, f.scale());
}

PAConcave scale_values(const PAConcave& f, const Rational& s) {
  if (!f.bounded()) fail_validation("scale_values: expects a bounded domain");
  if (s < 0) fail_validation("scale_values: negative factor");
  std::vector<Rational> ts = f.breakpoint_values();
  for (auto& t : ts) t *= s;
  return PAConcave::upper_envelope(f.breakpoint_positions(), std::move(ts), f.ambient_dim(), f.scale());
}

ScaledRational integral(const PAConcave& f) {
  if (!f.bounded()) fail_validation("integral: unbounded domain");
  const std::size_t n = f.ambient_dim();
  ScaledRational out{Rational(0), f.scale()};
  if (n == 0) {
    out.coeff = f.breakpoint_values()[0];
    return out;
  }
  if (f.domain().affine_dim() < n) return out;
  LiftedHull L = lift(f.breakpoint_positions(), f.breakpoint_values(), f.domain());
  for (const auto& fc : L.hull.facets) {
    if (fc.normal[L.t_chart_index] >= 0) continue;
    std::vector<RationalVector> pts;
    for (auto i : fc.points) {
      if (i < L.top_count) pts.push_back(L.lifted[i]);
    }
    for (const auto& s : triangulate(pts)) {
      std::vector<RationalVector> simplex;
      Rational tsum = 0;
      for (auto i : s) {
        tsum += pts[i][0];
        simplex.emplace_back(pts[i].begin() + 1, pts[i].end());
      }
      out.coeff += simplex_volume(simplex) * tsum / Rational(static_cast<long>(s.size()));
    }
  }
  return out;
}

ScaledRational mixed_integral(const std::vector<PAConcave>& fs) {
  if (fs.empty()) fail_validation("mixed_integral: no functions");
  const std::size_t n = fs[0].ambient_dim();
  if (fs.size() != n + 1) fail_validation("mixed_integral: need n+1 functions in dimension n");
  if (n > 12) fail_validation("mixed_integral: dimension too large");
  for (const auto& f : fs) {
    if (f.ambient_dim() != n) fail_validation("mixed_integral: dimension mismatch");
    if (!f.bounded()) fail_validation("mixed_integral: unbounded domain");
  }
  std::vector<PAConcave> sums(std::size_t{1} << (n + 1));
  ScaledRational total{Rational(0), {}};
  bool have_scale = false;
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    std::size_t low = static_cast<std::size_t>(std::countr_zero(mask));
    std::size_t rest = mask & (mask - 1);
    sums[mask] = rest == 0 ? fs[low] : sup_convolution(sums[rest], fs[low]);
    ScaledRational v = integral(sums[mask]);
    if (v.coeff != 0) {
      if (have_scale && !(v.scale == total.scale)) fail_validation("mixed_integral: incompatible value scales");
      total.scale = v.scale;
      have_scale = true;
    }
    std::size_t size = static_cast<std::size_t>(std::popcount(mask));
    if ((n + 1 - size) % 2 == 0) {
      total.coeff += v.coeff;
    } else {
      total.coeff -= v.coeff;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Sampled functions

SampledConcave::SampledConcave(Grid grid, std::vector<double> values, Polytope domain, double lipschitz,
                               double error)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      domain_(std::move(domain)),
      lipschitz_(lipschitz),
      error_(error) {
  if (values_.size() != grid_.size()) fail_validation("sampled function: value count does not match grid");
  if (domain_.ambient_dim() != grid_.dim()) fail_validation("sampled function: domain dimension mismatch");
}

bool SampledConcave::midpoint_concave() const {
  const std::size_t n = grid_.dim();
  for (std::size_t a = 0; a < n; ++a) {
    if (grid_.count[a] < 3) continue;
    double tol = 4 * lipschitz_ * grid_.step[a];
    std::size_t inner = 1;
    for (std::size_t b = a + 1; b < n; ++b) inner *= grid_.count[b];
    for (std::size_t flat = 0; flat < values_.size(); ++flat) {
      std::size_t i = (flat / inner) % grid_.count[a];
      if (i == 0 || i + 1 == grid_.count[a]) continue;
      double l = values_[flat - inner], c = values_[flat], r = values_[flat + inner];
      if (!std::isfinite(l) || !std::isfinite(c) || !std::isfinite(r)) continue;
      if (c < 0.5 * (l + r) - tol) return false;
    }
  }
  return true;
}

Polytope box_polytope(const Grid& g) {
  const std::size_t n = g.dim();
  std::vector<RationalVector> pts;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    RationalVector v(n);
    for (std::size_t a = 0; a < n; ++a) v[a] = Rational((mask >> a & 1U) ? g.hi(a) : g.lo[a]);
    pts.push_back(std::move(v));
  }
  return convex_hull(std::move(pts), n);
}

std::size_t ambient_dim(const ConcaveFunction& f) {
  return std::visit([](const auto& g) { return g.ambient_dim(); }, f);
}

const Polytope& domain_of(const ConcaveFunction& f) {
  return std::visit([](const auto& g) -> const Polytope& { return g.domain(); }, f);
}

namespace {

// Largest slope drop across a three-cell stencil, per axis, scaled into a bound on
// the gap between a discrete and a continuous infimum.
double conjugation_error(const Grid& g, const std::vector<double>& v) {
  const std::size_t n = g.dim();
  double total = 0;
  for (std::size_t a = 0; a < n; ++a) {
    if (g.count[a] < 4) continue;
    std::size_t inner = 1;
    for (std::size_t b = a + 1; b < n; ++b) inner *= g.count[b];
    double worst = 0;
    for (std::size_t flat = 0; flat < v.size(); ++flat) {
      std::size_t i = (flat / inner) % g.count[a];
      if (i == 0 || i + 2 >= g.count[a]) continue;
      double a0 = v[flat - inner], a1 = v[flat], a2 = v[flat + inner], a3 = v[flat + 2 * inner];
      if (!std::isfinite(a0) || !std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(a3)) continue;
      worst = std::max(worst, ((a1 - a0) - (a3 - a2)) / g.step[a]);
    }
    total += g.step[a] * worst / 4;
  }
  return total;
}

struct DoubleFacets {
  std::vector<std::vector<double>> normals;
  std::vector<double> offsets;
  bool inside(const std::vector<double>& x, double slack) const {
    for (std::size_t f = 0; f < normals.size(); ++f) {
      double s = offsets[f];
      double nrm = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        s += normals[f][i] * x[i];
        nrm += normals[f][i] * normals[f][i];
      }
      if (s < -slack * std::sqrt(nrm)) return false;
    }
    return true;
  }
};

DoubleFacets double_facets(const Polytope& p) {
  DoubleFacets d;
  for (const auto& f : p.hull().facets) {
    std::vector<double> nrm(f.normal.size());
    for (std::size_t i = 0; i < nrm.size(); ++i) nrm[i] = f.normal[i].get_d();
    d.normals.push_back(std::move(nrm));
    d.offsets.push_back(f.offset.get_d());
  }
  return d;
}

// Integrated interpolation error estimate from second differences at nodes inside
// the domain.
double interpolation_error(const Grid& g, const std::vector<double>& v, const Polytope& domain) {
  const std::size_t n = g.dim();
  DoubleFacets df = double_facets(domain);
  double cell = 1;
  for (auto h : g.step) cell *= h;
  double total = 0;
  std::vector<std::size_t> inner(n, 1);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) inner[a] *= g.count[b];
  }
  for (std::size_t flat = 0; flat < v.size(); ++flat) {
    auto x = g.node(flat);
    if (!df.inside(x, 0.0)) continue;
    double local = 0;
    for (std::size_t a = 0; a < n; ++a) {
      std::size_t i = (flat / inner[a]) % g.count[a];
      if (i == 0 || i + 1 == g.count[a]) continue;
      double l = v[flat - inner[a]], c = v[flat], r = v[flat + inner[a]];
      if (!std::isfinite(l) || !std::isfinite(r)) continue;
      local += std::fabs(l - 2 * c + r) / 8;
    }
    total += cell * local;
  }
  return total;
}

std::vector<std::vector<std::vector<double>>> double_triangulation(const Polytope& p) {
  std::vector<std::vector<std::vector<double>>> out;
  const auto& vs = p.vertices();
  for (const auto& s : triangulate(vs)) {
    std::vector<std::vector<double>> simplex;
    for (auto i : s) simplex.push_back(to_doubles(vs[i]));
    out.push_back(std::move(simplex));
  }
  return out;
}

Estimate integrate_grid_function(const Grid& g, const std::vector<double>& v, const Polytope& domain,
                                 const NumericConfig& cfg) {
  const std::size_t n = domain.ambient_dim();
  if (domain.affine_dim() < n) return {0.0, 0.0};
  auto simplices = double_triangulation(domain);
  auto f = [&](const std::vector<double>& x) {
    double val = interpolate(g, v, x);
    if (std::isnan(val)) fail_numeric("sampled integrand undefined inside its domain");
    return val;
  };
  double fine = 0, coarse = 0;
  std::size_t half = std::max<std::size_t>(1, cfg.panels / 2);
  for (const auto& s : simplices) {
    fine += integrate_simplex(s, f, cfg.panels, cfg.order);
    coarse += integrate_simplex(s, f, half, cfg.order);
  }
  return {fine, std::fabs(fine - coarse) + interpolation_error(g, v, domain)};
}

double lipschitz_of(const PAConcave& f) {
  double lam = f.bounded() ? f.scale().value() : 1.0;
  double best = 0;
  for (const auto& p : f.pieces()) {
    double s = 0;
    for (const auto& x : p.slope) s += to_double(x) * to_double(x);
    best = std::max(best, std::sqrt(s) * lam);
  }
  return best;
}

double max_abs_coordinate_norm(const Grid& g) {
  double s = 0;
  for (std::size_t a = 0; a < g.dim(); ++a) {
    double m = std::max(std::fabs(g.lo[a]), std::fabs(g.hi(a)));
    s += m * m;
  }
  return std::sqrt(s);
}

std::vector<double> negated_or_inf(const std::vector<double>& v) {
  std::vector<double> F(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) F[i] = std::isfinite(v[i]) ? -v[i] : kInf;
  return F;
}

}  // namespace

SampledConcave sample(const PAConcave& f, const Grid& grid) {
  if (grid.dim() != f.ambient_dim()) fail_validation("sample: grid dimension mismatch");
  std::vector<double> vals(grid.size());
  Polytope dom = f.bounded() ? f.domain() : box_polytope(grid);
  DoubleFacets df = double_facets(dom);
  const bool full = dom.affine_dim() == dom.ambient_dim();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    auto x = grid.node(i);
    bool inside = !f.bounded() || (full && df.inside(x, 1e-12));
    vals[i] = inside ? f.value(x) : std::numeric_limits<double>::quiet_NaN();
  }
  return SampledConcave(grid, std::move(vals), std::move(dom), lipschitz_of(f), 0.0);
}

SampledConcave dual_sampled(const SampledConcave& f, const Grid& target, const Polytope& domain) {
  if (target.dim() != f.ambient_dim()) fail_validation("dual_sampled: grid dimension mismatch");
  auto vals = discrete_conjugate(f.grid(), negated_or_inf(f.values()), target);
  for (auto& x : vals) {
    if (!std::isfinite(x)) x = std::numeric_limits<double>::quiet_NaN();
  }
  double err = f.error() + conjugation_error(f.grid(), f.values());
  SampledConcave out(target, std::move(vals), domain, max_abs_coordinate_norm(f.grid()), err);
  out.set_conjugate(std::make_shared<SampledConcave>(f));
  return out;
}

SampledConcave dual_sampled(const SampledConcave& f) {
  const Grid& g = f.grid();
  const std::size_t n = g.dim();
  if (g.size() == 0) fail_validation("dual_sampled: empty grid");
  std::vector<double> lo(n, kInf), hi(n, -kInf);
  std::size_t inner = 1;
  for (std::size_t a = n; a-- > 0;) {
    bool any = false;
    for (std::size_t flat = 0; flat < f.values().size(); ++flat) {
      std::size_t i = (flat / inner) % g.count[a];
      if (i + 1 >= g.count[a]) continue;
      double l = f.values()[flat], r = f.values()[flat + inner];
      if (!std::isfinite(l) || !std::isfinite(r)) continue;
      double s = (r - l) / g.step[a];
      lo[a] = std::min(lo[a], s);
      hi[a] = std::max(hi[a], s);
      any = true;
    }
    if (!any) lo[a] = hi[a] = 0;
    inner *= g.count[a];
  }
  Grid target;
  std::vector<RationalVector> corners;
  for (std::size_t a = 0; a < n; ++a) {
    double width = hi[a] - lo[a];
    std::size_t count = width < 1e-12 ? 1 : std::max<std::size_t>(g.count[a], 2);
    if (count == 1) hi[a] = lo[a];
    target.lo.push_back(lo[a]);
    target.step.push_back(count == 1 ? 1.0 : width / static_cast<double>(count - 1));
    target.count.push_back(count);
  }
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    RationalVector v(n);
    for (std::size_t a = 0; a < n; ++a) v[a] = Rational((mask >> a & 1U) ? hi[a] : lo[a]);
    corners.push_back(std::move(v));
  }
  return dual_sampled(f, target, convex_hull(std::move(corners), n));
}

Estimate integral(const SampledConcave& f, const NumericConfig& cfg) {
  Estimate e = integrate_grid_function(f.grid(), f.values(), f.domain(), cfg);
  e.error += f.error() * to_double(volume(f.domain()));
  return e;
}

Estimate mixed_integral_numeric(const std::vector<ConcaveFunction>& fs, const NumericConfig& cfg) {
  if (fs.empty()) fail_validation("mixed_integral: no functions");
  const std::size_t n = ambient_dim(fs[0]);
  if (fs.size() != n + 1) fail_validation("mixed_integral: need n+1 functions in dimension n");
  for (const auto& f : fs) {
    if (ambient_dim(f) != n) fail_validation("mixed_integral: dimension mismatch");
    if (auto p = std::get_if<PAConcave>(&f); p && !p->bounded()) fail_validation("mixed_integral: unbounded domain");
  }
  if (n == 0) {
    fail_validation("mixed_integral: numeric path needs positive dimension");
  }
  // Common dual-side grid.
  Grid U;
  bool have_grid = false;
  for (const auto& f : fs) {
    if (auto s = std::get_if<SampledConcave>(&f); s && s->conjugate()) {
      U = s->conjugate()->grid();
      have_grid = true;
      break;
    }
  }
  if (!have_grid) {
    U = Grid::covering(std::vector<double>(n, -cfg.u_radius), std::vector<double>(n, cfg.u_radius), cfg.u_step, 0);
  }
  // Coarse grids (every other node) drive the a-posteriori discretization estimates.
  auto halve = [](const Grid& g) {
    Grid h = g;
    for (std::size_t a = 0; a < g.dim(); ++a) {
      h.count[a] = (g.count[a] + 1) / 2;
      h.step[a] = g.count[a] > 1 ? g.step[a] * 2 : g.step[a];
    }
    return h;
  };
  auto coarsen = [](const Grid& g, const Grid& h, const std::vector<double>& v) {
    const std::size_t n = g.dim();
    std::vector<double> out(h.size());
    std::vector<std::size_t> idx(n);
    for (std::size_t k = 0; k < out.size(); ++k) {
      std::size_t r = k, flat = 0;
      for (std::size_t a = n; a-- > 0;) {
        idx[a] = r % h.count[a];
        r /= h.count[a];
      }
      for (std::size_t a = 0; a < n; ++a) flat = flat * g.count[a] + 2 * idx[a];
      out[k] = v[flat];
    }
    return out;
  };
  const Grid U2 = halve(U);

  // psi[i] is the dual-side function of input i on U. The true function lies in
  // [psi - sym - below, psi + sym]; empty vectors mean zero.
  std::vector<std::vector<double>> psi(fs.size()), sym(fs.size()), below(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (auto p = std::get_if<PAConcave>(&fs[i])) {
      PAConcave d = legendre_dual(*p);
      psi[i].resize(U.size());
      for (std::size_t k = 0; k < U.size(); ++k) psi[i][k] = d.value(U.node(k));
      continue;
    }
    const auto& s = std::get<SampledConcave>(fs[i]);
    if (s.conjugate()) {
      const auto& c = *s.conjugate();
      if (c.grid() == U) {
        psi[i] = c.values();
      } else {
        psi[i].resize(U.size());
        for (std::size_t k = 0; k < U.size(); ++k) psi[i][k] = c.value(U.node(k));
      }
      if (c.error() > 0) sym[i].assign(U.size(), c.error());
      continue;
    }
    auto F = negated_or_inf(s.values());
    psi[i] = discrete_conjugate(s.grid(), F, U);
    Grid G2 = halve(s.grid());
    auto coarse = discrete_conjugate(G2, coarsen(s.grid(), G2, F), U);
    // A minimum over a subset of the domain can only overshoot.
    below[i].resize(U.size());
    for (std::size_t k = 0; k < U.size(); ++k) {
      double d = std::fabs(coarse[k] - psi[i][k]);
      below[i][k] = std::isfinite(d) ? d : 0.0;
    }
    if (s.error() > 0) sym[i].assign(U.size(), s.error());
  }

  const std::size_t subsets = std::size_t{1} << (n + 1);
  std::vector<Polytope> domains(subsets);
  std::vector<Estimate> terms(subsets);
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    std::size_t low = static_cast<std::size_t>(std::countr_zero(mask));
    std::size_t rest = mask & (mask - 1);
    domains[mask] = rest == 0 ? domain_of(fs[low]) : minkowski_sum(domains[rest], domain_of(fs[low]));
  }
  parallel_for(subsets - 1, [&](std::size_t idx) {
    std::size_t mask = idx + 1;
    const Polytope& D = domains[mask];
    if (D.affine_dim() < n) return;
    std::vector<double> Psi(U.size(), 0.0), Eup, Edown;
    auto accumulate = [&](std::vector<double>& acc, const std::vector<double>& v) {
      if (v.empty()) return;
      if (acc.empty()) acc.assign(U.size(), 0.0);
      for (std::size_t k = 0; k < U.size(); ++k) acc[k] += v[k];
    };
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (!(mask >> i & 1U)) continue;
      for (std::size_t k = 0; k < U.size(); ++k) Psi[k] += psi[i][k];
      accumulate(Eup, sym[i]);
      accumulate(Edown, sym[i]);
      accumulate(Edown, below[i]);
    }
    const bool banded = !Eup.empty() || !Edown.empty();
    std::vector<double> lo(n, kInf), hi(n, -kInf);
    for (const auto& v : D.vertices()) {
      for (std::size_t a = 0; a < n; ++a) {
        lo[a] = std::min(lo[a], to_double(v[a]));
        hi[a] = std::max(hi[a], to_double(v[a]));
      }
    }
    Grid M = Grid::covering(lo, hi, cfg.m_step, 1);
    auto F = negated_or_inf(Psi);
    auto theta = discrete_conjugate(U, F, M);
    auto theta2 = discrete_conjugate(U2, coarsen(U, U2, F), M);
    std::vector<double> th_lo, th_hi;
    if (banded) {
      // Raising psi lowers the conjugate and vice versa.
      auto Fp = F, Fm = F;
      for (std::size_t k = 0; k < U.size(); ++k) {
        if (!Eup.empty()) Fp[k] -= Eup[k];
        if (!Edown.empty()) Fm[k] += Edown[k];
      }
      th_lo = discrete_conjugate(U, Fp, M);
      th_hi = discrete_conjugate(U, Fm, M);
    }
    Estimate e = integrate_grid_function(M, theta, D, cfg);
    DoubleFacets df = double_facets(D);
    double cell = 1;
    for (auto h : M.step) cell *= h;
    double extra = 0;
    for (std::size_t k = 0; k < M.size(); ++k) {
      if (!df.inside(M.node(k), 0.0)) continue;
      if (std::isfinite(theta[k]) && std::isfinite(theta2[k])) extra += cell * std::fabs(theta2[k] - theta[k]);
      if (banded && std::isfinite(th_hi[k]) && std::isfinite(th_lo[k])) {
        extra += cell * std::max(th_hi[k] - theta[k], theta[k] - th_lo[k]);
      }
    }
    e.error += extra;
    terms[mask] = e;
  });
  Estimate total;
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    std::size_t size = static_cast<std::size_t>(std::popcount(mask));
    double sign = (n + 1 - size) % 2 == 0 ? 1.0 : -1.0;
    total.value += sign * terms[mask].value;
    total.error += terms[mask].error;
  }
  return total;
}

MixedIntegralResult mixed_integral(const std::vector<ConcaveFunction>& fs, const NumericConfig& cfg) {
  bool all_pa = std::all_of(fs.begin(), fs.end(), [](const auto& f) { return std::holds_alternative<PAConcave>(f); });
  if (all_pa) {
    std::vector<PAConcave> pa;
    for (const auto& f : fs) pa.push_back(std::get<PAConcave>(f));
    try {
      ScaledRational r = mixed_integral(pa);
      return {Estimate{r.value(), 0.0}, r};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::validation || std::string(e.what()).find("scale") == std::string::npos) throw;
    }
  }
  return {mixed_integral_numeric(fs, cfg), std::nullopt};
}

}  // namespace th
