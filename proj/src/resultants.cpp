#include "toricheights/resultants.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "toricheights/heights.hpp"

namespace th {

MultiForm::MultiForm(std::vector<FormGroup> groups, std::map<std::vector<int>, Integer> terms)
    : groups_(std::move(groups)) {
  std::size_t nv = 0;
  for (const auto& g : groups_) {
    if (g.size == 0) fail_validation("multiform: empty group");
    nv += g.size;
  }
  for (auto& [e, c] : terms) {
    if (c == 0) continue;
    if (e.size() != nv) fail_validation("multiform: exponent length mismatch");
    std::size_t off = 0;
    for (const auto& g : groups_) {
      long deg = 0;
      for (std::size_t k = 0; k < g.size; ++k) {
        if (e[off + k] < 0) fail_validation("multiform: negative exponent");
        deg += e[off + k];
      }
      if (deg != static_cast<long>(g.degree)) fail_validation("multiform: term is not of the declared multidegree");
      off += g.size;
    }
    mpz_gcd(content_.get_mpz_t(), content_.get_mpz_t(), c.get_mpz_t());
    terms_.emplace(e, c);
  }
}

std::size_t MultiForm::n_vars() const {
  std::size_t nv = 0;
  for (const auto& g : groups_) nv += g.size;
  return nv;
}

Integer MultiForm::max_abs_coefficient() const {
  Integer m = 0;
  for (const auto& [e, c] : terms_) {
    if (abs(c) > m) m = abs(c);
  }
  return m;
}

Integer MultiForm::evaluate(const std::vector<Integer>& x) const {
  if (x.size() != n_vars()) fail_validation("multiform: point dimension mismatch");
  Integer s = 0;
  for (const auto& [e, c] : terms_) {
    Integer t = c;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      Integer p;
      mpz_pow_ui(p.get_mpz_t(), x[k].get_mpz_t(), static_cast<unsigned long>(e[k]));
      t *= p;
    }
    s += t;
  }
  return s;
}

std::complex<double> MultiForm::evaluate(const std::vector<std::complex<double>>& z) const {
  if (z.size() != n_vars()) fail_validation("multiform: point dimension mismatch");
  std::complex<double> s = 0;
  for (const auto& [e, c] : terms_) {
    std::complex<double> t = c.get_d();
    for (std::size_t k = 0; k < e.size(); ++k) {
      for (int j = 0; j < e[k]; ++j) t *= z[k];
    }
    s += t;
  }
  return s;
}

namespace {

using Key = std::uint64_t;
using SparsePoly = std::unordered_map<Key, std::int64_t>;

void accumulate(SparsePoly& into, const SparsePoly& from, Key shift, bool negate) {
  for (const auto& [k, c] : from) {
    std::int64_t v = negate ? -c : c;
    auto& slot = into[k + shift];
    if (__builtin_add_overflow(slot, v, &slot)) fail_numeric("sylvester: coefficient overflow");
  }
}

}  // namespace

MultiForm sylvester_resultant_form(std::size_t n) {
  if (n < 1 || n > kSylvesterCap) {
    fail_validation("sylvester_resultant_form: n must lie in [1, " + std::to_string(kSylvesterCap) + "]");
  }
  const std::size_t rows = 2 * n, nv = 2 * (n + 1);
  // Row r < n carries a_j at column r + j; row n + i carries b_j at column i + j.
  auto var_at = [&](std::size_t r, std::size_t c) -> int {
    std::size_t start = r < n ? r : r - n;
    if (c < start || c > start + n) return -1;
    return static_cast<int>((r < n ? 0 : n + 1) + (c - start));
  };
  // Column-by-column Laplace expansion over the set of rows already used.
  std::unordered_map<std::uint32_t, SparsePoly> level;
  level[0][0] = 1;
  for (std::size_t c = 0; c < rows; ++c) {
    std::unordered_map<std::uint32_t, SparsePoly> next;
    for (const auto& [mask, poly] : level) {
      for (std::size_t r = 0; r < rows; ++r) {
        if (mask & (1u << r)) continue;
        int v = var_at(r, c);
        if (v < 0) continue;
        std::uint32_t nm = mask | (1u << r);
        // Rows whose band ends at column c must be used by now.
        bool dead = false;
        for (std::size_t q = 0; q < rows && !dead; ++q) {
          std::size_t start = q < n ? q : q - n;
          if (!(nm & (1u << q)) && start + n <= c) dead = true;
        }
        if (dead) continue;
        bool negate = __builtin_popcount(mask >> (r + 1)) % 2 == 1;
        accumulate(next[nm], poly, Key(1) << (4 * v), negate);
      }
    }
    level = std::move(next);
  }
  std::map<std::vector<int>, Integer> terms;
  for (const auto& [mask, poly] : level) {
    for (const auto& [k, c] : poly) {
      if (c == 0) continue;
      std::vector<int> e(nv);
      for (std::size_t v = 0; v < nv; ++v) e[v] = static_cast<int>((k >> (4 * v)) & 15);
      terms[e] += Integer(static_cast<long>(c));
    }
  }
  return MultiForm({{n + 1, n}, {n + 1, n}}, std::move(terms));
}

namespace {

void monomials(std::size_t vars, std::size_t deg, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (cur.size() + 1 == vars) {
    cur.push_back(static_cast<int>(deg));
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t k = deg + 1; k-- > 0;) {
    cur.push_back(static_cast<int>(k));
    monomials(vars, deg - k, cur, out);
    cur.pop_back();
  }
}

}  // namespace

MultiForm point_resultant_form(const std::vector<Integer>& p, std::size_t n) {
  if (p.empty()) fail_validation("point_resultant_form: empty point");
  if (n < 1 || n > 64) fail_validation("point_resultant_form: n must lie in [1, 64]");
  Integer g = 0;
  for (const auto& x : p) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g == 0) fail_validation("point_resultant_form: zero point");
  if (g != 1) fail_validation("point_resultant_form: coordinates must be coprime");
  std::vector<std::vector<int>> mons;
  std::vector<int> cur;
  monomials(p.size(), n, cur, mons);
  if (mons.size() > 200000) fail_validation("point_resultant_form: too many monomials");
  std::map<std::vector<int>, Integer> terms;
  for (std::size_t k = 0; k < mons.size(); ++k) {
    Integer c = 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
      Integer t;
      mpz_pow_ui(t.get_mpz_t(), p[i].get_mpz_t(), static_cast<unsigned long>(mons[k][i]));
      c *= t;
    }
    if (c == 0) continue;
    std::vector<int> e(mons.size(), 0);
    e[k] = 1;
    terms.emplace(std::move(e), c);
  }
  return MultiForm({{mons.size(), 1}}, std::move(terms));
}

namespace {

double log_integer(const Integer& x) {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return std::log(std::abs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace

double form_height(const MultiForm& r) {
  if (r.is_zero()) fail_validation("form_height: zero form");
  return log_integer(r.max_abs_coefficient()) - log_integer(r.content());
}

double fs_comparison_bound(const MultiForm& r) {
  double b = 0;
  for (const auto& g : r.groups()) {
    std::size_t ri = g.size - 1;
    b += static_cast<double>(g.degree) * (std::log(static_cast<double>(ri + 1)) + (ri >= 1 ? harmonic(ri - 1) : 0.0));
  }
  return b;
}

FsEstimate fs_height_estimate(const MultiForm& r, const QuadratureConfig& cfg) {
  cfg.validate();
  if (r.is_zero()) fail_validation("fs_height_estimate: zero form");
  FsEstimate out;
  out.finite = -log_integer(r.content());
  for (const auto& g : r.groups()) out.correction += 0.5 * static_cast<double>(g.degree) * harmonic(g.size - 1);
  const std::size_t B = cfg.batches, N = cfg.per_batch(), nv = r.n_vars();
  std::vector<double> means(B, 0.0);
  std::vector<char> failed(B, 0);
  parallel_for(B, [&](std::size_t b) {
    Rng rng(derive_seed(cfg.seed, 0x5e00 + b));
    std::vector<std::complex<double>> z(nv);
    double acc = 0;
    std::size_t used = 0;
    for (std::size_t j = 0; j < N; ++j) {
      std::size_t off = 0;
      for (const auto& g : r.groups()) {
        double nrm = 0;
        for (std::size_t k = 0; k < g.size; ++k) {
          z[off + k] = {rng.normal(), rng.normal()};
          nrm += std::norm(z[off + k]);
        }
        nrm = std::sqrt(nrm);
        for (std::size_t k = 0; k < g.size; ++k) z[off + k] /= nrm;
        off += g.size;
      }
      double v = std::log(std::abs(r.evaluate(z)));
      if (!std::isfinite(v)) continue;
      acc += v;
      ++used;
    }
    if (used == 0) {
      failed[b] = 1;
      return;
    }
    means[b] = acc / static_cast<double>(used);
  });
  if (std::find(failed.begin(), failed.end(), 1) != failed.end()) fail_numeric("fs_height_estimate: all samples vanished");
  double mean = 0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(B);
  double var = 0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(B - 1) * static_cast<double>(B);
  double se = std::sqrt(var);
  if (se > cfg.max_stderr) fail_numeric("fs_height_estimate: variance target unmet (standard error " + format_real(se) + ")");
  out.sphere = mean;
  out.error = 3 * se;
  return out;
}

bool ConvergenceTable::ok() const {
  for (const auto& r : rows) {
    if (!r.within) return false;
  }
  return true;
}

ConvergenceTable convergence_table_sylvester(std::size_t n_max) {
  if (n_max < 1 || n_max > kSylvesterCap) {
    fail_validation("convergence_table: n_max must lie in [1, " + std::to_string(kSylvesterCap) + "]");
  }
  ConvergenceTable t;
  t.description = "sylvester resultants on P^1, primitive integer normalization, limit 0, normalized = h / n^2";
  std::vector<double> heights(n_max + 1, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) heights[n] = form_height(sylvester_resultant_form(n));
  // Envelope constant fitted at n = 2 (or taken as 0 when the table stops at n = 1).
  t.constant = n_max >= 2 ? heights[2] / 4.0 * 2.0 / std::log(2.0) : 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    ConvergenceRow row;
    row.n = n;
    row.height = heights[n];
    row.normalized = heights[n] / static_cast<double>(n * n);
    row.limit = 0;
    row.envelope = t.constant * std::log(static_cast<double>(n)) / static_cast<double>(n);
    row.within = std::abs(row.normalized - row.limit) <= row.envelope + 1e-12;
    t.rows.push_back(row);
  }
  return t;
}

ConvergenceTable convergence_table_point(const std::vector<Integer>& p, std::size_t n_max) {
  if (n_max < 1 || n_max > 64) fail_validation("convergence_table: n_max must lie in [1, 64]");
  ConvergenceTable t;
  t.description = "point resultants, primitive integer normalization, limit h(p), normalized = h / n";
  RationalVector pq;
  for (const auto& x : p) pq.push_back(Rational(x));
  Integer hp = height_tuple_Q_exp(pq);
  double limit = height_tuple_Q(pq);
  for (std::size_t n = 1; n <= n_max; ++n) {
    auto f = point_resultant_form(p, n);
    ConvergenceRow row;
    row.n = n;
    row.height = form_height(f);
    row.normalized = row.height / static_cast<double>(n);
    row.limit = limit;
    row.envelope = 0;
    Integer pw;
    mpz_pow_ui(pw.get_mpz_t(), hp.get_mpz_t(), n);
    // Exact: max coefficient / content equals H(p)^n.
    row.within = f.max_abs_coefficient() == pw * f.content();
    t.rows.push_back(row);
  }
  return t;
}

double veronese_gap_at(const std::vector<std::complex<double>>& z, std::size_t n) {
  double mx = 0;
  std::vector<double> h(n + 1, 0.0);
  h[0] = 1;
  double scale = 0;
  for (const auto& x : z) scale = std::max(scale, std::abs(x));
  if (scale == 0) fail_validation("veronese_gap: zero point");
  for (const auto& x : z) {
    double a = std::norm(x / scale);
    mx = std::max(mx, std::abs(x));
    for (std::size_t k = 1; k <= n; ++k) h[k] += a * h[k - 1];
  }
  // log sum |z^I|^2 = 2n log(scale) + log h_n(|z/scale|^2)
  double fs = std::log(scale) + std::log(h[n]) / (2.0 * static_cast<double>(n));
  return std::abs(std::log(mx) - fs);
}

VeroneseGap veronese_gap(std::size_t r, std::size_t n, const QuadratureConfig& cfg) {
  if (r < 1) fail_validation("veronese_gap: r must be >= 1");
  if (n < r + 1) fail_validation("veronese_gap: n must be >= r + 1");
  cfg.validate();
  VeroneseGap out;
  out.binomial_bound = (log_binomial(r + n, n)) / (2.0 * static_cast<double>(n));
  out.bound = static_cast<double>(r) * std::log(static_cast<double>(n)) / static_cast<double>(n);
  Rng rng(derive_seed(cfg.seed, 0x7e40));
  std::vector<std::complex<double>> z(r + 1);
  auto consider = [&] {
    out.observed = std::max(out.observed, veronese_gap_at(z, n));
    ++out.samples;
  };
  // Coordinate and equal-modulus points, then random sphere points.
  for (auto& x : z) x = 0;
  z[0] = 1;
  consider();
  for (auto& x : z) x = std::polar(1.0 / std::sqrt(static_cast<double>(r + 1)), 2 * M_PI * rng.uniform());
  consider();
  for (std::size_t s = 0; s < cfg.budget; ++s) {
    for (auto& x : z) x = {rng.normal(), rng.normal()};
    consider();
  }
  return out;
}

}  // namespace th
