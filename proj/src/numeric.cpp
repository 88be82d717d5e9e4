#include "toricheights/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <thread>

namespace th {

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (auto c : count) s *= c;
  return s;
}

std::vector<double> Grid::node(std::size_t flat) const {
  std::vector<double> x(dim());
  for (std::size_t a = dim(); a-- > 0;) {
    std::size_t i = flat % count[a];
    flat /= count[a];
    x[a] = lo[a] + step[a] * static_cast<double>(i);
  }
  return x;
}

Grid Grid::covering(const std::vector<double>& lo, const std::vector<double>& hi, double h, std::size_t pad) {
  Grid g;
  for (std::size_t a = 0; a < lo.size(); ++a) {
    double width = hi[a] - lo[a];
    std::size_t cells = width <= 0 ? 0 : static_cast<std::size_t>(std::ceil(width / h - 1e-9));
    double step = cells == 0 ? h : width / static_cast<double>(cells);
    g.lo.push_back(lo[a] - step * static_cast<double>(pad));
    g.step.push_back(step);
    g.count.push_back(cells + 1 + 2 * pad);
  }
  return g;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// G_j = min_i (s_j x_i + F_i) for increasing x and increasing s.
void conjugate_1d(const std::vector<double>& x, const double* F, std::size_t stride_in, std::size_t nx,
                  const std::vector<double>& s, double* G, std::size_t stride_out, std::vector<std::size_t>& hull) {
  hull.clear();
  for (std::size_t k = nx; k-- > 0;) {
    double Fk = F[k * stride_in];
    if (!(Fk < kInf)) continue;
    while (hull.size() >= 2) {
      std::size_t l1 = hull[hull.size() - 2], l2 = hull.back();
      double F1 = F[l1 * stride_in], F2 = F[l2 * stride_in];
      if ((Fk - F1) * (x[l1] - x[l2]) <= (F2 - F1) * (x[l1] - x[k])) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(k);
  }
  if (hull.empty()) {
    for (std::size_t j = 0; j < s.size(); ++j) G[j * stride_out] = kInf;
    return;
  }
  std::size_t p = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    auto val = [&](std::size_t l) { return s[j] * x[l] + F[l * stride_in]; };
    while (p + 1 < hull.size() && val(hull[p + 1]) <= val(hull[p])) ++p;
    G[j * stride_out] = val(hull[p]);
  }
}

}  // namespace

std::vector<double> discrete_conjugate(const Grid& in, const std::vector<double>& F, const Grid& out) {
  const std::size_t n = in.dim();
  std::vector<std::size_t> shape = in.count;
  std::vector<double> cur = F;
  std::vector<std::size_t> hull;
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<double> xs(in.count[a]), ss(out.count[a]);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = in.lo[a] + in.step[a] * static_cast<double>(i);
    for (std::size_t j = 0; j < ss.size(); ++j) ss[j] = out.lo[a] + out.step[a] * static_cast<double>(j);
    std::size_t outer = 1, inner = 1;
    for (std::size_t b = 0; b < a; ++b) outer *= shape[b];
    for (std::size_t b = a + 1; b < n; ++b) inner *= shape[b];
    std::vector<double> next(outer * ss.size() * inner);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        const double* src = cur.data() + o * shape[a] * inner + i;
        double* dst = next.data() + o * ss.size() * inner + i;
        conjugate_1d(xs, src, inner, xs.size(), ss, dst, inner, hull);
      }
    }
    shape[a] = ss.size();
    cur = std::move(next);
  }
  return cur;
}

double interpolate(const Grid& g, const std::vector<double>& values, const std::vector<double>& x) {
  const std::size_t n = g.dim();
  std::vector<std::size_t> base(n);
  std::vector<double> frac(n);
  for (std::size_t a = 0; a < n; ++a) {
    double t = (x[a] - g.lo[a]) / g.step[a];
    double last = static_cast<double>(g.count[a] - 1);
    if (t < -1e-9 || t > last + 1e-9) return std::numeric_limits<double>::quiet_NaN();
    t = std::clamp(t, 0.0, last);
    if (g.count[a] == 1) {
      base[a] = 0;
      frac[a] = 0;
      continue;
    }
    std::size_t i = std::min(static_cast<std::size_t>(t), g.count[a] - 2);
    base[a] = i;
    frac[a] = t - static_cast<double>(i);
  }
  // Corners without a value are dropped and the remaining weights renormalized.
  double acc = 0, wsum = 0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
    double w = 1;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < n; ++a) {
      bool up = corner >> a & 1U;
      if (g.count[a] == 1 && up) {
        w = 0;
        break;
      }
      w *= up ? frac[a] : 1 - frac[a];
      flat = flat * g.count[a] + base[a] + (up ? 1 : 0);
    }
    if (w == 0) continue;
    double v = values[flat];
    if (!std::isfinite(v)) continue;
    acc += w * v;
    wsum += w;
  }
  if (wsum <= 1e-12) return std::numeric_limits<double>::quiet_NaN();
  return acc / wsum;
}

void gauss_legendre(std::size_t q, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(q, 0);
  weights.assign(q, 0);
  for (std::size_t i = 0; i < q; ++i) {
    double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(q) + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (std::size_t k = 1; k <= q; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * static_cast<double>(k) - 1) * z * p1 - (static_cast<double>(k) - 1) * p2) / static_cast<double>(k);
      }
      dp = static_cast<double>(q) * (z * p0 - p1) / (z * z - 1);
      double dz = p0 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    nodes[i] = 0.5 * (1 - z);
    weights[i] = 1.0 / ((1 - z * z) * dp * dp);
  }
  std::vector<std::size_t> idx(q);
  for (std::size_t i = 0; i < q; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return nodes[a] < nodes[b]; });
  std::vector<double> n2(q), w2(q);
  for (std::size_t i = 0; i < q; ++i) {
    n2[i] = nodes[idx[i]];
    w2[i] = weights[idx[i]];
  }
  nodes = std::move(n2);
  weights = std::move(w2);
}

double integrate_simplex(const std::vector<std::vector<double>>& simplex,
                         const std::function<double(const std::vector<double>&)>& f, std::size_t panels,
                         std::size_t order) {
  const std::size_t k = simplex.size() - 1;
  if (k == 0) return f(simplex[0]);
  std::vector<double> gn, gw;
  gauss_legendre(order, gn, gw);
  std::vector<double> t1, w1;
  for (std::size_t p = 0; p < panels; ++p) {
    for (std::size_t i = 0; i < order; ++i) {
      t1.push_back((static_cast<double>(p) + gn[i]) / static_cast<double>(panels));
      w1.push_back(gw[i] / static_cast<double>(panels));
    }
  }
  // Scale: |det| of edge matrix equals k! vol.
  std::vector<std::vector<double>> edges(k, std::vector<double>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) edges[i][j] = simplex[i + 1][j] - simplex[0][j];
  }
  double det = 1;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < k; ++r) {
      if (std::fabs(edges[r][c]) > std::fabs(edges[p][c])) p = r;
    }
    if (edges[p][c] == 0) return 0;
    std::swap(edges[p], edges[c]);
    det *= edges[c][c];
    for (std::size_t r = c + 1; r < k; ++r) {
      double fct = edges[r][c] / edges[c][c];
      for (std::size_t j = c; j < k; ++j) edges[r][j] -= fct * edges[c][j];
    }
  }
  det = std::fabs(det);
  const std::size_t m = t1.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= m;
  std::vector<double> x(k);
  std::vector<std::size_t> idx(k, 0);
  double sum = 0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    for (std::size_t a = 0; a < k; ++a) {
      idx[a] = r % m;
      r /= m;
    }
    double rest = 1, jac = 1;
    std::fill(x.begin(), x.end(), 0.0);
    double lam0 = 1;
    for (std::size_t j = 0; j < k; ++j) {
      double t = t1[idx[j]];
      double lam = rest * t;
      jac *= w1[idx[j]] * std::pow(1 - t, static_cast<double>(k - 1 - j));
      for (std::size_t c = 0; c < k; ++c) x[c] += lam * simplex[j + 1][c];
      rest *= 1 - t;
      lam0 -= lam;
    }
    for (std::size_t c = 0; c < k; ++c) x[c] += lam0 * simplex[0][c];
    sum += jac * f(x);
  }
  return sum * det;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0;
  do {
    u1 = uniform();
  } while (u1 <= 0);
  double u2 = uniform();
  double r = std::sqrt(-2 * std::log(u1));
  spare_ = r * std::sin(2 * M_PI * u2);
  has_spare_ = true;
  return r * std::cos(2 * M_PI * u2);
}

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
  auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return lo + static_cast<std::int64_t>(r % span);
}

namespace {

std::atomic<std::size_t> g_workers{0};

std::size_t default_workers() {
  if (const char* env = std::getenv("TORICHEIGHTS_WORKERS")) {
    long v = std::atol(env);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

}  // namespace

void set_worker_count(std::size_t workers) { g_workers = workers; }

std::size_t worker_count() {
  std::size_t w = g_workers;
  return w == 0 ? default_workers() : w;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::size_t w = std::min(worker_count(), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < w; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < n; i = next++) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double harmonic(std::size_t n) {
  double h = 0;
  for (std::size_t l = n; l >= 1; --l) h += 1.0 / static_cast<double>(l);
  return h;
}

double log_binomial(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
         std::lgamma(static_cast<double>(n - k) + 1);
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace th
