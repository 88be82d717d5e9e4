#include "toricheights/mahler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "toricheights/detail/lattice.hpp"
#include "toricheights/detail/roots.hpp"

namespace th {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

PolyC::PolyC(std::vector<std::size_t> partition, const std::map<std::vector<int>, ComplexQ>& terms)
    : partition_(std::move(partition)) {
  for (std::size_t m : partition_) {
    if (m == 0) fail_validation("polynomial: empty variable group");
    n_vars_ += m;
  }
  degrees_.assign(partition_.size(), 0);
  for (const auto& [e, c] : terms) {
    if (c.is_zero()) continue;
    if (e.size() != n_vars_) fail_validation("polynomial: exponent length does not match the partition");
    std::size_t off = 0;
    for (std::size_t g = 0; g < partition_.size(); ++g) {
      int deg = 0;
      for (std::size_t k = 0; k < partition_[g]; ++k) {
        if (e[off + k] < 0) fail_validation("polynomial: negative exponent");
        deg += e[off + k];
      }
      degrees_[g] = std::max(degrees_[g], deg);
      off += partition_[g];
    }
    terms_.emplace(e, c);
    coef_.push_back(c.value());
    exps_.push_back(e);
  }
  if (terms_.empty()) fail_validation("polynomial: zero polynomial");
}

PolyC PolyC::from_laurent(const LaurentPolynomial& f, std::vector<std::size_t> partition) {
  if (partition.empty()) partition = {f.n_vars()};
  std::map<std::vector<int>, ComplexQ> terms;
  for (const auto& [e, c] : f.terms()) {
    std::vector<int> ex(e.begin(), e.end());
    terms[ex] = ComplexQ{c, 0};
  }
  return PolyC(std::move(partition), terms);
}

int PolyC::total_degree() const {
  int d = 0;
  for (const auto& e : exps_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

bool PolyC::is_constant() const { return terms_.size() == 1 && total_degree() == 0; }

std::complex<double> PolyC::evaluate(const std::vector<std::complex<double>>& z) const {
  if (z.size() != n_vars_) fail_validation("polynomial: point dimension mismatch");
  std::complex<double> s = 0;
  for (std::size_t t = 0; t < coef_.size(); ++t) {
    std::complex<double> v = coef_[t];
    for (std::size_t k = 0; k < n_vars_; ++k) {
      for (int j = 0; j < exps_[t][k]; ++j) v *= z[k];
    }
    s += v;
  }
  return s;
}

PolyC PolyC::operator*(const PolyC& o) const {
  if (o.partition_ != partition_) fail_validation("polynomial: partitions differ");
  std::map<std::vector<int>, ComplexQ> out;
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      std::vector<int> e(ea.size());
      for (std::size_t k = 0; k < e.size(); ++k) e[k] = ea[k] + eb[k];
      auto& slot = out[e];
      slot.re += ca.re * cb.re - ca.im * cb.im;
      slot.im += ca.re * cb.im + ca.im * cb.re;
    }
  }
  return PolyC(partition_, out);
}

PolyC PolyC::regroup(std::vector<std::size_t> partition) const { return PolyC(std::move(partition), terms_); }

Rational norm_inf_squared(const PolyC& p) {
  Rational m = 0;
  for (const auto& [e, c] : p.terms()) m = std::max(m, c.norm_squared());
  return m;
}

double norm_inf(const PolyC& p) { return std::sqrt(to_double(norm_inf_squared(p))); }

namespace {

// Runs independent batches; body returns (sum, count) of accepted samples.
EstimateResult run_batches(const QuadratureConfig& cfg, const std::string& what,
                           const std::function<std::pair<double, std::size_t>(std::size_t)>& body) {
  cfg.validate();
  const std::size_t B = cfg.batches;
  std::vector<double> means(B, 0.0);
  std::vector<std::size_t> counts(B, 0);
  parallel_for(B, [&](std::size_t b) {
    auto [sum, count] = body(b);
    counts[b] = count;
    means[b] = count ? sum / static_cast<double>(count) : 0.0;
  });
  EstimateResult r;
  r.seed = cfg.seed;
  for (std::size_t b = 0; b < B; ++b) {
    if (counts[b] == 0) fail_numeric(what + ": every sample hit a zero");
    r.samples += counts[b];
    r.value += means[b];
  }
  r.value /= static_cast<double>(B);
  double var = 0;
  for (double m : means) var += (m - r.value) * (m - r.value);
  var /= static_cast<double>(B - 1) * static_cast<double>(B);
  r.stderr_ = std::sqrt(var);
  if (r.stderr_ > cfg.max_stderr) {
    fail_numeric(what + ": variance target unmet (standard error " + format_real(r.stderr_) + ")");
  }
  return r;
}

EstimateResult exact_constant(const PolyC& p, const QuadratureConfig& cfg) {
  EstimateResult r;
  r.value = std::log(std::abs(p.terms().begin()->second.value()));
  r.seed = cfg.seed;
  r.samples = 1;
  return r;
}

// Mean of g(P) over a randomly shifted rank-1 lattice on the torus.
template <class G>
EstimateResult torus_average(const PolyC& p, const QuadratureConfig& cfg, const std::string& what, G g) {
  const std::size_t n = p.n_vars(), N = detail::lattice_size(cfg.per_batch());
  auto gen = detail::lattice_generator(N, n);
  return run_batches(cfg, what, [&](std::size_t b) {
    Rng rng(derive_seed(cfg.seed, 0x70000 + b));
    std::vector<double> shift(n), t;
    for (auto& s : shift) s = rng.uniform();
    std::vector<std::complex<double>> z(n);
    double sum = 0;
    std::size_t used = 0;
    for (std::size_t j = 0; j < N; ++j) {
      detail::lattice_point(gen, N, j, shift, t);
      for (std::size_t k = 0; k < n; ++k) z[k] = std::polar(1.0, kTwoPi * t[k]);
      double v = g(p.evaluate(z));
      if (!std::isfinite(v)) continue;
      sum += v;
      ++used;
    }
    return std::make_pair(sum, used);
  });
}

// Jensen: log|lead| + sum log+|root|, read from whichever end has the larger
// coefficient so that a vanishing leading term does not blow up the roots.
double jensen(std::vector<std::complex<double>> c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  if (c.empty()) return -std::numeric_limits<double>::infinity();
  std::size_t lo = 0;
  while (c[lo] == 0.0) ++lo;
  c.erase(c.begin(), c.begin() + static_cast<long>(lo));
  if (c.size() == 1) return std::log(std::abs(c[0]));
  if (std::abs(c.front()) > std::abs(c.back())) std::reverse(c.begin(), c.end());
  double v = std::log(std::abs(c.back()));
  for (const auto& r : detail::polynomial_roots(c)) v += std::max(0.0, std::log(std::abs(r)));
  return v;
}

}  // namespace

// One variable is integrated exactly by Jensen's formula; the remaining average
// has a continuous integrand, which the shifted lattice handles far better than
// the logarithmic singularities of log|P| itself.
EstimateResult mahler_torus(const PolyC& p, const QuadratureConfig& cfg) {
  if (p.is_constant()) return exact_constant(p, cfg);
  const std::size_t n = p.n_vars();
  if (n == 1) {
    cfg.validate();
    auto e = mahler_univariate_exact(p);
    EstimateResult r;
    r.value = e.value;
    r.stderr_ = e.error / 3;
    r.samples = 1;
    r.seed = cfg.seed;
    return r;
  }
  // Condition on the variable of largest degree.
  std::size_t k = 0;
  int best = -1;
  for (std::size_t i = 0; i < n; ++i) {
    int d = 0;
    for (const auto& [e, c] : p.terms()) d = std::max(d, e[i]);
    if (d > best) {
      best = d;
      k = i;
    }
  }
  struct Term {
    std::size_t power;
    std::complex<double> coef;
    std::vector<int> rest;
  };
  std::vector<Term> terms;
  for (const auto& [e, c] : p.terms()) {
    std::vector<int> rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != k) rest.push_back(e[i]);
    }
    terms.push_back({static_cast<std::size_t>(e[k]), c.value(), rest});
  }
  const std::size_t m = n - 1, N = detail::lattice_size(cfg.per_batch());
  auto gen = detail::lattice_generator(N, m);
  return run_batches(cfg, "mahler_torus", [&](std::size_t b) {
    Rng rng(derive_seed(cfg.seed, 0x70000 + b));
    std::vector<double> shift(m), t;
    for (auto& s : shift) s = rng.uniform();
    std::vector<std::complex<double>> z(m), c(static_cast<std::size_t>(best) + 1);
    double sum = 0;
    std::size_t used = 0;
    for (std::size_t j = 0; j < N; ++j) {
      detail::lattice_point(gen, N, j, shift, t);
      for (std::size_t i = 0; i < m; ++i) z[i] = std::polar(1.0, kTwoPi * t[i]);
      std::fill(c.begin(), c.end(), 0.0);
      for (const auto& term : terms) {
        std::complex<double> v = term.coef;
        for (std::size_t i = 0; i < m; ++i) {
          for (int q = 0; q < term.rest[i]; ++q) v *= z[i];
        }
        c[term.power] += v;
      }
      double v = jensen(c);
      if (!std::isfinite(v)) continue;
      sum += v;
      ++used;
    }
    return std::make_pair(sum, used);
  });
}

Estimate mahler_univariate_exact(const PolyC& p) {
  if (p.n_vars() != 1) fail_validation("mahler_univariate_exact: polynomial must have one variable");
  int deg = p.total_degree();
  if (deg < 1) fail_validation("mahler_univariate_exact: degree must be >= 1");
  std::vector<std::complex<double>> c(static_cast<std::size_t>(deg) + 1, 0.0);
  for (const auto& [e, q] : p.terms()) c[static_cast<std::size_t>(e[0])] = q.value();
  std::size_t lo = 0;
  while (c[lo] == std::complex<double>(0)) ++lo;
  std::vector<std::complex<double>> q(c.begin() + static_cast<long>(lo), c.end());
  double value = std::log(std::abs(q.back()));
  double err = 0;
  if (q.size() > 1) {
    auto roots = detail::polynomial_roots(q);
    for (const auto& a : roots) {
      // Newton step size as the uncertainty of each root.
      std::complex<double> pv = 0, dv = 0;
      for (std::size_t k = q.size(); k-- > 0;) {
        dv = dv * a + pv;
        pv = pv * a + q[k];
      }
      double step = std::abs(dv) > 0 ? std::abs(pv) / std::abs(dv) : std::numeric_limits<double>::infinity();
      if (!std::isfinite(step) || step > 0.5 * std::max(std::abs(a), 1e-300)) {
        // Clustered roots: fall back to the discriminant-free bound |delta| ~ (|P|/|lead|)^(1/deg).
        step = std::pow(std::abs(pv) / std::abs(q.back()), 1.0 / static_cast<double>(q.size() - 1));
      }
      if (!std::isfinite(step)) fail_numeric("mahler_univariate_exact: root refinement failed to certify");
      double r = std::abs(a);
      value += std::max(0.0, std::log(r));
      if (r + step >= 1) err += std::log1p(step / std::max(r - step, 1e-300)) + 0.0;
    }
  }
  err += 4 * std::numeric_limits<double>::epsilon() * (1 + std::abs(value));
  return {value, err};
}

EstimateResult mahler_multisphere(const PolyC& p, const std::vector<std::size_t>& partition, const QuadratureConfig& cfg) {
  std::size_t total = std::accumulate(partition.begin(), partition.end(), std::size_t(0));
  if (total != p.n_vars()) fail_validation("mahler_multisphere: partition does not match the variable count");
  if (p.is_constant()) return exact_constant(p, cfg);
  const std::size_t N = cfg.per_batch();
  return run_batches(cfg, "mahler_sphere", [&](std::size_t b) {
    Rng rng(derive_seed(cfg.seed, 0x5f000 + b));
    std::vector<std::complex<double>> z(total);
    double sum = 0;
    std::size_t used = 0;
    for (std::size_t j = 0; j < N; ++j) {
      std::size_t off = 0;
      for (std::size_t g : partition) {
        double nrm = 0;
        for (std::size_t k = 0; k < g; ++k) {
          z[off + k] = {rng.normal(), rng.normal()};
          nrm += std::norm(z[off + k]);
        }
        nrm = std::sqrt(nrm);
        for (std::size_t k = 0; k < g; ++k) z[off + k] /= nrm;
        off += g;
      }
      double v = std::log(std::abs(p.evaluate(z)));
      if (!std::isfinite(v)) continue;
      sum += v;
      ++used;
    }
    return std::make_pair(sum, used);
  });
}

EstimateResult mahler_sphere(const PolyC& p, const QuadratureConfig& cfg) {
  return mahler_multisphere(p, {p.n_vars()}, cfg);
}

bool SupEstimate::ok() const {
  const double tol = 1e-12;
  return norm <= upper * (1 + tol) && lower <= upper * (1 + tol) && lower <= binomial_bound * (1 + tol);
}

SupEstimate sup_polydisc(const PolyC& p, const QuadratureConfig& cfg) {
  cfg.validate();
  SupEstimate out;
  out.norm = norm_inf(p);
  for (const auto& [e, c] : p.terms()) out.upper += std::abs(c.value());
  const std::size_t n = p.n_vars();
  int d = p.total_degree();
  out.binomial_bound = std::exp(log_binomial(n + static_cast<std::size_t>(d), n)) * out.norm;
  if (n == 0 || p.is_constant()) {
    out.lower = out.norm;
    return out;
  }
  // Maximum modulus: the supremum over the polydisc is attained on the torus.
  auto value_at = [&](const std::vector<double>& th) {
    std::vector<std::complex<double>> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = std::polar(1.0, th[k]);
    return std::abs(p.evaluate(z));
  };
  const std::size_t N = std::max<std::size_t>(cfg.budget, 16);
  auto gen = detail::lattice_generator(N, n);
  Rng rng(derive_seed(cfg.seed, 0x50b));
  std::vector<double> shift(n), t;
  for (auto& s : shift) s = rng.uniform();
  std::vector<std::pair<double, std::vector<double>>> best;
  for (std::size_t j = 0; j < N; ++j) {
    detail::lattice_point(gen, N, j, shift, t);
    std::vector<double> th(n);
    for (std::size_t k = 0; k < n; ++k) th[k] = kTwoPi * t[k];
    best.emplace_back(value_at(th), th);
  }
  std::partial_sort(best.begin(), best.begin() + static_cast<long>(std::min<std::size_t>(8, best.size())), best.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  best.resize(std::min<std::size_t>(8, best.size()));
  for (auto& [v, th] : best) {
    // Coordinate ascent with shrinking steps.
    for (double h = 0.2; h > 1e-10; h *= 0.5) {
      bool moved = true;
      while (moved) {
        moved = false;
        for (std::size_t k = 0; k < n; ++k) {
          for (double s : {h, -h}) {
            th[k] += s;
            double w = value_at(th);
            if (w > v) {
              v = w;
              moved = true;
            } else {
              th[k] -= s;
            }
          }
        }
      }
    }
    out.lower = std::max(out.lower, v);
  }
  return out;
}

bool ParsevalReport::ok() const {
  return std::abs(estimate - exact) <= 3 * stderr_ + 1e-9 * std::max(1.0, exact);
}

ParsevalReport parseval_check(const PolyC& p, const QuadratureConfig& cfg) {
  ParsevalReport r;
  for (const auto& [e, c] : p.terms()) r.exact += to_double(c.norm_squared());
  // |P|^2 lives on the scale of the exact value, so the spread guard does too.
  QuadratureConfig c = cfg;
  c.max_stderr = cfg.max_stderr * std::max(1.0, r.exact);
  auto est = torus_average(p, c, "parseval_check", [](std::complex<double> v) { return std::norm(v); });
  r.estimate = est.value;
  r.stderr_ = est.stderr_;
  double diff = r.estimate - r.exact;
  if (r.stderr_ > 0) {
    r.z = diff / r.stderr_;
  } else {
    r.z = std::abs(diff) <= 1e-9 * std::max(1.0, r.exact) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return r;
}

bool BoundReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.violations == 0; });
}

namespace {

std::vector<int> random_composition(Rng& rng, std::size_t parts, int total) {
  std::vector<int> e(parts, 0);
  for (int k = 0; k < total; ++k) e[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(parts) - 1))]++;
  return e;
}

PolyC corpus_polynomial(Rng& rng, bool homogeneous) {
  std::size_t groups = static_cast<std::size_t>(rng.integer(1, 3));
  std::vector<std::size_t> part(groups);
  std::vector<int> deg(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    part[g] = static_cast<std::size_t>(rng.integer(1, 3));
    deg[g] = static_cast<int>(rng.integer(0, 4));
  }
  if (std::all_of(deg.begin(), deg.end(), [](int d) { return d == 0; })) deg[0] = 1;
  std::size_t nv = std::accumulate(part.begin(), part.end(), std::size_t(0));
  std::map<std::vector<int>, ComplexQ> terms;
  std::size_t count = static_cast<std::size_t>(rng.integer(1, 6));
  for (std::size_t t = 0; t < count; ++t) {
    std::vector<int> e;
    e.reserve(nv);
    for (std::size_t g = 0; g < groups; ++g) {
      int total = homogeneous ? deg[g] : static_cast<int>(rng.integer(0, deg[g]));
      auto c = random_composition(rng, part[g], total);
      e.insert(e.end(), c.begin(), c.end());
    }
    long v = 0;
    while (v == 0) v = static_cast<long>(rng.integer(-9, 9));
    terms[e] = ComplexQ{Rational(v), 0};
  }
  return PolyC(part, terms);
}

double log_multinomial(int d, const std::vector<int>& k) {
  double r = std::lgamma(d + 1.0);
  int rest = d;
  for (int x : k) {
    r -= std::lgamma(x + 1.0);
    rest -= x;
  }
  return r - std::lgamma(rest + 1.0);
}

struct Tally {
  BoundCheck c;
  explicit Tally(std::string name) { c.name = std::move(name); }
  void add(double gap, double bound, double margin) { add(gap, bound, margin, bound > 0 ? gap / bound : 0.0); }
  void add(double gap, double bound, double margin, double ratio) {
    ++c.checks;
    if (gap > bound + margin + 1e-12) ++c.violations;
    c.max_ratio = std::max(c.max_ratio, ratio);
  }
};

}  // namespace

PolyC random_corpus_polynomial(Rng& rng) { return corpus_polynomial(rng, false); }

BoundReport bound_suite(std::size_t corpus, std::uint64_t seed, const QuadratureConfig& cfg) {
  if (corpus < 1) fail_validation("bound_suite: corpus size must be >= 1");
  cfg.validate();
  BoundReport rep;
  rep.corpus = corpus;
  rep.seed = seed;
  Tally coeff("coefficient bound"), torus("torus vs norm"), torus_flat("torus vs norm, one group"),
      sphere("sphere vs norm"), mixed("mixed sphere vs norm"), homog("homogeneous torus vs norm");
  Rng rng(derive_seed(seed, 0xb0));
  for (std::size_t i = 0; i < corpus; ++i) {
    bool hom = i % 4 == 3;
    PolyC p = corpus_polynomial(rng, hom);
    QuadratureConfig c = cfg;
    c.seed = derive_seed(seed, i + 1);
    double lognorm = 0.5 * std::log(to_double(norm_inf_squared(p)));
    auto m = mahler_torus(p, c);
    const auto& part = p.partition();
    const auto& deg = p.group_degrees();
    std::size_t nv = p.n_vars();
    int d = p.total_degree();

    // |a_k| <= prod_i multinomial(d_i; k_i) exp(m(P))
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& [e, a] : p.terms()) {
      double lm = 0;
      std::size_t off = 0;
      for (std::size_t g = 0; g < part.size(); ++g) {
        std::vector<int> k(e.begin() + static_cast<long>(off), e.begin() + static_cast<long>(off + part[g]));
        lm += log_multinomial(deg[g], k);
        off += part[g];
      }
      worst = std::max(worst, std::log(std::abs(a.value())) - lm - m.value);
    }
    // ratio: largest |a_k| / (C(d;k) e^m)
    coeff.add(std::max(worst, 0.0), 0.0, m.error(), std::exp(worst));

    double b_torus = 0, b_mixed = 0, b_hom = 0;
    for (std::size_t g = 0; g < part.size(); ++g) {
      double mi = static_cast<double>(part[g]);
      b_torus += deg[g] * std::log(mi + 1);
      b_mixed += deg[g] * (std::log(mi + 1) + 0.5 * (part[g] >= 1 ? harmonic(part[g] - 1) : 0.0));
      b_hom += deg[g] * std::log(mi);
    }
    torus.add(std::abs(m.value - lognorm), b_torus, m.error());
    torus_flat.add(std::abs(m.value - lognorm), d * std::log(static_cast<double>(nv) + 1), m.error());
    if (hom) homog.add(std::abs(m.value - lognorm), b_hom, m.error());

    auto s = mahler_sphere(p, c);
    sphere.add(std::abs(s.value - lognorm), 2.0 * d * std::log(static_cast<double>(nv) + 1), s.error());
    auto mm = mahler_multisphere(p, part, c);
    mixed.add(std::abs(mm.value - lognorm), b_mixed, mm.error());
  }
  for (auto* t : {&coeff, &torus, &torus_flat, &sphere, &mixed, &homog}) rep.checks.push_back(t->c);
  return rep;
}

}  // namespace th
