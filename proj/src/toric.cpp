#include "toricheights/toric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "toricheights/heights.hpp"

namespace th {

ToricDivisorData::ToricDivisorData(Polytope polytope) : polytope_(std::move(polytope)) {
  if (polytope_.empty()) fail_validation("toric divisor: empty polytope");
}

void ToricDivisorData::set_roof(const PlaceQ& v, ConcaveFunction roof) {
  if (th::ambient_dim(roof) != ambient_dim()) fail_validation("toric divisor: roof dimension mismatch");
  if (!(domain_of(roof) == polytope_)) fail_validation("toric divisor: roof domain differs from the polytope");
  if (auto p = std::get_if<PAConcave>(&roof)) {
    if (!p->bounded()) fail_validation("toric divisor: roof must live on the polytope");
    if (p->is_zero()) {
      roofs_.erase(v);
      return;
    }
  }
  roofs_[v] = std::move(roof);
}

ConcaveFunction ToricDivisorData::roof(const PlaceQ& v) const {
  if (auto it = roofs_.find(v); it != roofs_.end()) return it->second;
  return indicator(polytope_);
}

std::vector<PlaceQ> ToricDivisorData::places() const {
  std::vector<PlaceQ> out;
  for (const auto& [v, r] : roofs_) out.push_back(v);
  return out;
}

bool PushforwardReduction::mi_ok() const {
  if (mi_full.coeff != mi_product.coeff) return false;
  return mi_full.coeff == 0 || mi_full.scale == mi_product.scale;
}

namespace {

double default_mi_step(std::size_t n) { return n <= 1 ? 1e-3 : n == 2 ? 0.01 : 0.05; }

void add_prime_factors(Integer x, std::set<std::uint64_t>& out) {
  x = abs(x);
  for (std::uint64_t p = 2; p < 1000000 && Integer(static_cast<unsigned long>(p)) * p <= x; ++p) {
    if (mpz_divisible_ui_p(x.get_mpz_t(), p) == 0) continue;
    out.insert(p);
    while (mpz_divisible_ui_p(x.get_mpz_t(), p) != 0) x /= static_cast<unsigned long>(p);
  }
  if (x <= 1) return;
  if (mpz_fits_ulong_p(x.get_mpz_t()) != 0 && is_prime(x.get_ui())) {
    out.insert(x.get_ui());
    return;
  }
  fail_validation("coefficient " + x.get_str() + " has no small factorization; relevant places unknown");
}

// log|c|_v
double log_abs_at(const Rational& c, const PlaceQ& v) {
  if (v.is_archimedean()) {
    long e1 = 0, e2 = 0;
    double m1 = mpz_get_d_2exp(&e1, c.get_num_mpz_t()), m2 = mpz_get_d_2exp(&e2, c.get_den_mpz_t());
    return std::log(std::fabs(m1)) - std::log(m2) + static_cast<double>(e1 - e2) * std::log(2.0);
  }
  return -to_double(Rational(v.order(c))) * ValueScale{v.p()}.value();
}

void check_slots(const std::vector<ToricDivisorData>& ds, const std::vector<LaurentPolynomial>& fs) {
  if (ds.empty() && fs.empty()) fail_validation("toric height: no slots");
  const std::size_t n = ds.empty() ? fs[0].n_vars() : ds[0].ambient_dim();
  if (n == 0) fail_validation("toric height: ambient dimension must be positive");
  if (ds.size() + fs.size() != n + 1) {
    fail_validation("toric height: need n+1 slots in dimension " + std::to_string(n) + ", got " +
                    std::to_string(ds.size() + fs.size()));
  }
  for (const auto& d : ds) {
    if (d.ambient_dim() != n) fail_validation("toric height: divisor dimension mismatch");
  }
  for (const auto& f : fs) {
    if (f.is_zero()) fail_validation("toric height: zero polynomial");
    if (f.n_vars() != n) fail_validation("toric height: polynomial dimension mismatch");
  }
}

PlaceContribution evaluate_place(const PlaceQ& v, const std::vector<ToricDivisorData>& ds,
                                 const std::vector<LaurentPolynomial>& fs, const ToricConfig& cfg, double window) {
  const std::size_t n = ds.empty() ? fs[0].n_vars() : ds[0].ambient_dim();
  PlaceContribution out;
  out.place = v;
  // A monomial slot is a point function with value log|c|_v, so the mixed integral
  // collapses to that value times the mixed volume of the other domains.
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (!fs[i].is_monomial()) continue;
    std::vector<Polytope> others;
    for (const auto& d : ds) others.push_back(d.polytope());
    for (std::size_t j = 0; j < fs.size(); ++j) {
      if (j != i) others.push_back(newton_polytope(fs[j]));
    }
    Rational mv = mixed_volume(others);
    const Rational& c = fs[i].terms().begin()->second;
    if (v.is_archimedean()) {
      out.value = log_abs_at(c, v) * to_double(mv);
    } else {
      ScaledRational s{-Rational(v.order(c)) * mv, ValueScale{v.kind() == PlaceQ::Kind::prime ? v.p() : 0}};
      if (s.coeff == 0) s.scale = {};
      out.exact = s;
      out.value = s.value();
    }
    return out;
  }
  std::vector<ConcaveFunction> slots;
  bool all_zero = true;
  for (const auto& d : ds) {
    slots.push_back(d.roof(v));
    if (d.roofs().count(v) != 0) all_zero = false;
  }
  RoofConfig rc = cfg.roof;
  rc.window = window;
  for (const auto& f : fs) {
    slots.push_back(ronkin_roof(f, v, cfg.quadrature, rc));
    auto p = std::get_if<PAConcave>(&slots.back());
    if (p == nullptr || !p->is_zero()) all_zero = false;
  }
  if (all_zero) {
    out.exact = ScaledRational{Rational(0), {}};
    return out;
  }
  NumericConfig nc;
  nc.u_radius = window > 0 ? window : nc.u_radius;
  nc.m_step = cfg.mi_step > 0 ? cfg.mi_step : default_mi_step(n);
  auto r = mixed_integral(slots, nc);
  out.value = r.estimate.value;
  out.error = r.estimate.error;
  out.exact = r.exact;
  return out;
}

}  // namespace

std::vector<PlaceQ> relevant_places(const std::vector<ToricDivisorData>& ds, const std::vector<LaurentPolynomial>& fs) {
  std::set<PlaceQ> places;
  for (const auto& d : ds) {
    for (const auto& v : d.places()) places.insert(v);
  }
  if (!fs.empty()) {
    places.insert(PlaceQ::archimedean());
    std::set<std::uint64_t> primes;
    for (const auto& f : fs) {
      for (const auto& [e, c] : f.terms()) {
        add_prime_factors(c.get_num(), primes);
        add_prime_factors(c.get_den(), primes);
      }
    }
    for (auto p : primes) places.insert(PlaceQ::prime(p));
  }
  return {places.begin(), places.end()};
}

HeightReport gualdi_limit(const std::vector<ToricDivisorData>& ds, const std::vector<LaurentPolynomial>& fs,
                          const ToricConfig& cfg) {
  check_slots(ds, fs);
  cfg.quadrature.validate();
  auto places = relevant_places(ds, fs);
  // One sampling window for every archimedean roof keeps their dual grids aligned.
  double window = 0;
  for (const auto& f : fs) {
    if (!f.is_monomial()) window = std::max(window, ronkin_window(f, cfg.roof.margin));
  }
  if (cfg.roof.window > 0) window = cfg.roof.window;
  HeightReport rep;
  rep.contributions.resize(places.size());
  parallel_for(places.size(), [&](std::size_t i) { rep.contributions[i] = evaluate_place(places[i], ds, fs, cfg, window); });
  for (const auto& c : rep.contributions) {
    rep.total += c.value;
    rep.error += c.error;
  }
  return rep;
}

HeightReport toric_height(const std::vector<ToricDivisorData>& ds, const ToricConfig& cfg) {
  return gualdi_limit(ds, {}, cfg);
}

HeightReport hypersurface_height(const std::vector<ToricDivisorData>& ds, const LaurentPolynomial& f,
                                 const ToricConfig& cfg) {
  return gualdi_limit(ds, {f}, cfg);
}

// ---------------------------------------------------------------------------
// Projection formula

PushforwardReduction pushforward_reduction_check(const PushforwardInstance& inst) {
  const std::size_t n = inst.n, k = inst.k;
  if (n == 0 || k > n) fail_validation("pushforward reduction: need 0 <= k <= n, n >= 1");
  if (inst.deltas.size() != k || inst.gs.size() != n - k + 1) {
    fail_validation("pushforward reduction: need k polytopes and n-k+1 functions");
  }
  for (const auto& d : inst.deltas) {
    if (d.ambient_dim() != n) fail_validation("pushforward reduction: polytope dimension mismatch");
    for (const auto& v : d.vertices()) {
      for (std::size_t a = k; a < n; ++a) {
        if (v[a] != 0) fail_validation("pushforward reduction: polytopes must lie in the first k coordinates");
      }
    }
  }
  for (const auto& g : inst.gs) {
    if (g.ambient_dim() != n || !g.bounded()) fail_validation("pushforward reduction: functions must be bounded on R^n");
  }
  std::vector<RationalVector> to_l, to_p;
  for (std::size_t a = 0; a < n; ++a) {
    RationalVector row(n, Rational(0));
    row[a] = 1;
    (a < k ? to_l : to_p).push_back(row);
  }
  LinearMapQ pl = LinearMapQ::from_rows(to_l, n), pp = LinearMapQ::from_rows(to_p, n);

  PushforwardReduction out;
  Rational mv_l = 1;
  if (k > 0) {
    std::vector<Polytope> ls;
    for (const auto& d : inst.deltas) ls.push_back(project(d, pl));
    mv_l = mixed_volume(ls);
  }
  std::vector<Polytope> full = inst.deltas, projected;
  for (std::size_t i = 0; i + 1 < inst.gs.size(); ++i) {
    full.push_back(inst.gs[i].domain());
    projected.push_back(project(inst.gs[i].domain(), pp));
  }
  out.mv_full = mixed_volume(full);
  out.mv_product = mv_l * (projected.empty() ? Rational(1) : mixed_volume(projected));

  std::vector<PAConcave> slots;
  for (const auto& d : inst.deltas) slots.push_back(indicator(d));
  for (const auto& g : inst.gs) slots.push_back(g);
  out.mi_full = mixed_integral(slots);
  if (n == k) {
    // The quotient is a point and the direct image is the maximum.
    const auto& g = inst.gs[0];
    Rational top = *std::max_element(g.breakpoint_values().begin(), g.breakpoint_values().end());
    out.mi_product = ScaledRational{mv_l * top, g.scale()};
  } else {
    std::vector<PAConcave> images;
    for (const auto& g : inst.gs) images.push_back(direct_image(pp, g));
    ScaledRational r = mixed_integral(images);
    out.mi_product = ScaledRational{mv_l * r.coeff, r.scale};
  }
  return out;
}

PushforwardInstance random_pushforward_instance(std::size_t n, std::size_t k, std::uint64_t seed, bool simplices) {
  if (n == 0 || k > n) fail_validation("pushforward instance: need 0 <= k <= n, n >= 1");
  Rng rng(seed);
  auto small = [&](long lo, long hi, long den) { return make_rational(rng.integer(lo, hi), den); };
  PushforwardInstance inst;
  inst.n = n;
  inst.k = k;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<RationalVector> pts;
    if (simplices) {
      Rational s = small(1, 3, 1);
      RationalVector t(n, Rational(0));
      for (std::size_t a = 0; a < k; ++a) t[a] = small(-2, 2, 2);
      pts.push_back(t);
      for (std::size_t a = 0; a < k; ++a) {
        RationalVector v = t;
        v[a] += s;
        pts.push_back(v);
      }
    } else {
      for (std::size_t j = 0; j < k + 3; ++j) {
        RationalVector v(n, Rational(0));
        for (std::size_t a = 0; a < k; ++a) v[a] = small(-4, 4, 2);
        pts.push_back(v);
      }
    }
    inst.deltas.push_back(convex_hull(std::move(pts), n));
  }
  for (std::size_t i = 0; i < n - k + 1; ++i) {
    std::vector<RationalVector> ms;
    std::vector<Rational> ts;
    if (simplices) {
      // Vertices of (s * simplex in L) x (s' * simplex in P), plus interior lifts.
      Rational s = small(1, 2, 1), s2 = small(1, 2, 1);
      for (std::size_t a = 0; a <= k; ++a) {
        for (std::size_t b = 0; b <= n - k; ++b) {
          RationalVector v(n, Rational(0));
          if (a > 0) v[a - 1] = s;
          if (b > 0) v[k + b - 1] = s2;
          ms.push_back(v);
          ts.push_back(small(-4, 4, 2));
        }
      }
      for (int j = 0; j < 3; ++j) {
        RationalVector v(n, Rational(0));
        Rational left = 1;
        for (std::size_t a = 0; a < n; ++a) {
          Rational w = make_rational(rng.integer(0, 3), 8);
          if (w > left) w = left;
          left -= w;
          v[a] = w * (a < k ? s : s2);
        }
        ms.push_back(v);
        ts.push_back(small(0, 8, 2));
      }
    } else {
      for (std::size_t j = 0; j < n + 4; ++j) {
        RationalVector v(n);
        for (auto& x : v) x = small(-4, 4, 2);
        ms.push_back(v);
        ts.push_back(small(-4, 4, 2));
      }
    }
    inst.gs.push_back(PAConcave::upper_envelope(std::move(ms), std::move(ts), n));
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Torsion translates

namespace {

// Element of Q[Z/N] as exponent -> coefficient.
using GroupElem = std::map<std::uint64_t, Rational>;

GroupElem mul(const GroupElem& a, const GroupElem& b, std::uint64_t N) {
  GroupElem out;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) {
      Rational& slot = out[(ea + eb) % N];
      slot += ca * cb;
    }
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

// Leibniz expansion over permutations.
GroupElem determinant(const std::vector<std::vector<GroupElem>>& m, std::uint64_t N) {
  const std::size_t n = m.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  GroupElem total;
  do {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    }
    GroupElem term{{0, Rational(inversions % 2 == 0 ? 1 : -1)}};
    for (std::size_t i = 0; i < n && !term.empty(); ++i) term = mul(term, m[i][perm[i]], N);
    for (const auto& [e, c] : term) total[e] += c;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

Cyclotomic to_cyclotomic(const GroupElem& g, std::uint64_t N) {
  std::vector<Rational> v(N, Rational(0));
  for (const auto& [e, c] : g) v[e] += c;
  return Cyclotomic(N, std::move(v));
}

}  // namespace

TorsionReport torsion_experiment(const std::vector<LaurentPolynomial>& fs, std::uint64_t N, std::size_t samples,
                                 std::uint64_t seed, double precision) {
  const std::size_t m = fs.size();
  if (m == 0) fail_validation("torsion experiment: no polynomials");
  if (m > 6) fail_validation("torsion experiment: at most 6 equations");
  if (N == 0 || N > 20000) fail_validation("torsion experiment: conductor must lie in [1, 20000]");
  if (samples == 0) fail_validation("torsion experiment: samples must be positive");
  if (!(precision > 0)) fail_validation("torsion experiment: precision must be positive");
  // a[i][j] is the coefficient of x_j in f_i, b[i] the negated constant.
  std::vector<RationalVector> a(m, RationalVector(m, Rational(0)));
  RationalVector b(m, Rational(0));
  for (std::size_t i = 0; i < m; ++i) {
    if (fs[i].n_vars() != m) fail_validation("torsion experiment: need as many variables as equations");
    for (const auto& [e, c] : fs[i].terms()) {
      std::size_t ones = 0, at = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (e[j] == 1) {
          ++ones;
          at = j;
        } else if (e[j] != 0) {
          fail_validation("torsion experiment: polynomials must be affine-linear");
        }
      }
      if (ones > 1) fail_validation("torsion experiment: polynomials must be affine-linear");
      if (ones == 0) {
        b[i] = -c;
      } else {
        a[i][at] = c;
      }
    }
  }
  std::vector<std::uint64_t> units;
  for (std::uint64_t k = 0; k < N; ++k) {
    if (std::gcd(k, N) == 1) units.push_back(k);
  }

  struct Attempt {
    int status = 0;  // 0 valid, 1 singular, 2 boundary
    TorsionDraw draw;
  };
  auto run = [&](std::size_t index) {
    Attempt at;
    at.draw.index = index;
    Rng rng(derive_seed(seed, index));
    std::vector<std::vector<GroupElem>> A(m, std::vector<GroupElem>(m));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        auto k = units[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(units.size()) - 1))];
        at.draw.exponents.push_back(k);
        if (a[i][j] != 0) A[i][j] = GroupElem{{k, a[i][j]}};
      }
    }
    ProjectivePoint P;
    P.conductor = N;
    P.coords.push_back(to_cyclotomic(determinant(A, N), N));
    if (P.coords[0].is_zero()) {
      at.status = 1;
      return at;
    }
    // Cramer: x_j = det(A with column j replaced by b) / det(A).
    for (std::size_t j = 0; j < m; ++j) {
      auto Aj = A;
      for (std::size_t i = 0; i < m; ++i) Aj[i][j] = b[i] == 0 ? GroupElem{} : GroupElem{{0, b[i]}};
      P.coords.push_back(to_cyclotomic(determinant(Aj, N), N));
      if (P.coords.back().is_zero()) {
        at.status = 2;
        return at;
      }
    }
    HeightBreakdown h = projective_height(P, precision);
    at.draw.height = h.total();
    at.draw.error = h.error();
    return at;
  };

  TorsionReport rep;
  rep.conductor = N;
  rep.seed = seed;
  rep.requested = samples;
  const std::size_t cap = 20 * samples;
  while (rep.draws.size() < samples && rep.attempts < cap) {
    std::size_t chunk = std::min(samples - rep.draws.size(), cap - rep.attempts);
    std::vector<Attempt> results(chunk);
    std::size_t base = rep.attempts;
    parallel_for(chunk, [&](std::size_t i) { results[i] = run(base + i); });
    for (auto& r : results) {
      ++rep.attempts;
      if (r.status == 1) {
        ++rep.singular;
      } else if (r.status == 2) {
        ++rep.boundary;
      } else {
        rep.draws.push_back(std::move(r.draw));
      }
    }
  }
  if (!rep.draws.empty()) {
    double sum = 0, sq = 0;
    rep.min = rep.max = rep.draws[0].height;
    for (const auto& d : rep.draws) {
      sum += d.height;
      rep.min = std::min(rep.min, d.height);
      rep.max = std::max(rep.max, d.height);
    }
    const double cnt = static_cast<double>(rep.draws.size());
    rep.mean = sum / cnt;
    for (const auto& d : rep.draws) sq += (d.height - rep.mean) * (d.height - rep.mean);
    rep.stderr_ = rep.draws.size() > 1 ? std::sqrt(sq / (cnt - 1) / cnt) : 0.0;
  }
  return rep;
}

}  // namespace th
