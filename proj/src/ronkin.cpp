#include "toricheights/ronkin.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "toricheights/detail/hull.hpp"
#include "toricheights/detail/lattice.hpp"
#include "toricheights/detail/roots.hpp"

namespace th {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

PlaceQ PlaceQ::prime(std::uint64_t p) {
  if (!is_prime(p)) fail_validation("place: " + std::to_string(p) + " is not prime");
  return PlaceQ(Kind::prime, p);
}

PlaceQ PlaceQ::parse(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "arch" || s == "archimedean") return archimedean();
  if (s == "trivial" || s == "0") return trivial();
  std::uint64_t p = 0;
  for (char c : s) {
    if (c < '0' || c > '9' || p > (1ULL << 40)) fail_validation("place: cannot parse '" + s + "'");
    p = p * 10 + static_cast<std::uint64_t>(c - '0');
  }
  if (s.empty()) fail_validation("place: empty");
  return prime(p);
}

std::string PlaceQ::to_string() const {
  switch (kind_) {
    case Kind::archimedean:
      return "inf";
    case Kind::trivial:
      return "trivial";
    case Kind::prime:
      break;
  }
  return std::to_string(p_);
}

Integer PlaceQ::order(const Rational& c) const {
  if (kind_ != Kind::prime) return 0;
  return p_adic_order(c, p_);
}

void QuadratureConfig::validate() const {
  if (budget < 1) fail_validation("quadrature: budget must be >= 1");
  if (batches < 2) fail_validation("quadrature: batches must be >= 2");
  if (scheme != "rank1-lattice") fail_validation("quadrature: unknown scheme '" + scheme + "'");
  if (!(max_stderr > 0)) fail_validation("quadrature: max_stderr must be positive");
}

LaurentPolynomial pushforward(const LaurentPolynomial& f, const LinearMapQ& gamma) {
  if (gamma.source_dim != f.n_vars()) fail_validation("pushforward: map source dimension mismatch");
  for (const auto& row : gamma.matrix) {
    for (const auto& x : row) {
      if (x.get_den() != 1) fail_validation("pushforward: map must be integral");
    }
  }
  LaurentPolynomial g(gamma.target_dim);
  for (const auto& [e, c] : f.terms()) {
    Exponent img(gamma.target_dim, 0);
    for (std::size_t r = 0; r < gamma.target_dim; ++r) {
      Integer s = 0;
      for (std::size_t k = 0; k < e.size(); ++k) s += gamma.matrix[r][k].get_num() * Integer(static_cast<long>(e[k]));
      if (!s.fits_slong_p()) fail_validation("pushforward: exponent overflow");
      img[r] = s.get_si();
    }
    g.add_term(img, c);
  }
  return g;
}

PAConcave tropical_ronkin(const LaurentPolynomial& f, const PlaceQ& v) {
  if (v.is_archimedean()) fail_validation("tropical_ronkin: archimedean place has no tropical form");
  if (f.is_zero()) fail_validation("tropical_ronkin: zero polynomial");
  std::vector<AffinePiece> pieces;
  for (const auto& [e, c] : f.terms()) {
    RationalVector slope(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) slope[i] = Rational(static_cast<long>(e[i]));
    pieces.push_back({std::move(slope), Rational(v.order(c))});
  }
  ValueScale scale;
  if (v.kind() == PlaceQ::Kind::prime) scale.log_of = v.p();
  return PAConcave::unbounded(f.n_vars(), pieces, scale);
}

double ronkin_window(const LaurentPolynomial& f, double margin) {
  double lo = kInf, hi = -kInf;
  for (const auto& [e, c] : f.terms()) {
    double l = std::log(std::abs(to_double(c)));
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  double gap = kInf;
  for (auto a = f.terms().begin(); a != f.terms().end(); ++a) {
    for (auto b = std::next(a); b != f.terms().end(); ++b) {
      double d = 0;
      for (std::size_t i = 0; i < a->first.size(); ++i)
        d = std::max(d, std::abs(static_cast<double>(a->first[i] - b->first[i])));
      gap = std::min(gap, d);
    }
  }
  if (!std::isfinite(gap)) gap = 1;
  return (hi - lo) / gap + margin;
}

namespace {

// The integrand after integrating the most spread variable by Jensen's formula.
struct Fibered {
  std::size_t n = 0;
  std::size_t last = 0;          // variable integrated exactly
  std::int64_t low = 0;          // minimal exponent of that variable
  std::size_t span = 0;
  std::vector<double> coef;      // per term
  std::vector<std::size_t> slot; // exponent of `last` minus low
  std::vector<std::vector<double>> rest;  // exponents of the other variables

  explicit Fibered(const LaurentPolynomial& f) : n(f.n_vars()) {
    if (f.is_zero()) fail_validation("ronkin: zero polynomial");
    std::vector<std::int64_t> lo(n, std::numeric_limits<std::int64_t>::max()), hi(n, std::numeric_limits<std::int64_t>::min());
    for (const auto& [e, c] : f.terms()) {
      for (std::size_t i = 0; i < n; ++i) {
        lo[i] = std::min(lo[i], e[i]);
        hi[i] = std::max(hi[i], e[i]);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (hi[i] - lo[i] > hi[last] - lo[last]) last = i;
    }
    if (n > 0) {
      low = lo[last];
      span = static_cast<std::size_t>(hi[last] - lo[last]);
    }
    for (const auto& [e, c] : f.terms()) {
      coef.push_back(to_double(c));
      slot.push_back(n > 0 ? static_cast<std::size_t>(e[last] - low) : 0);
      std::vector<double> r;
      for (std::size_t i = 0; i < n; ++i) {
        if (i != last) r.push_back(static_cast<double>(e[i]));
      }
      rest.push_back(std::move(r));
    }
  }

  std::size_t angles() const { return n == 0 ? 0 : n - 1; }
  bool monomial() const { return coef.size() == 1; }

  // -log|f| averaged over the circle in variable `last`, with the other
  // coordinates fixed by `radial` (per-term moduli) and `phase` (per-term unit factors).
  double fiber_value(const std::vector<double>& radial, const std::complex<double>* phase, double log_r,
                     std::vector<std::complex<double>>& work) const {
    work.assign(span + 1, 0.0);
    for (std::size_t t = 0; t < coef.size(); ++t) work[slot[t]] += radial[t] * phase[t];
    double base = static_cast<double>(low) * log_r;
    if (span == 1) {
      double a0 = std::abs(work[0]), a1 = std::abs(work[1]);
      if (a1 == 0) return a0 == 0 ? kInf : -(base + std::log(a0));
      if (a0 == 0) return -(base + std::log(a1) + log_r);
      return -(base + std::log(a1) + std::max(std::log(a0 / a1), log_r));
    }
    return -(base + detail::jensen_mean(work, log_r));
  }
};

void check_u(const Fibered& fb, const std::vector<double>& u) {
  if (u.size() != fb.n) fail_validation("ronkin: point dimension mismatch");
  for (double x : u) {
    if (!std::isfinite(x)) fail_validation("ronkin: non-finite coordinate");
  }
}

}  // namespace

std::vector<Estimate> arch_ronkin_grid(const LaurentPolynomial& f, const Grid& grid, const QuadratureConfig& cfg) {
  cfg.validate();
  Fibered fb(f);
  if (grid.dim() != fb.n) fail_validation("ronkin: grid dimension mismatch");
  const std::size_t nodes = grid.size();
  std::vector<Estimate> out(nodes);
  const std::size_t T = fb.coef.size();
  const std::size_t d = fb.angles();

  // Per-term angular factors for every quadrature point of every batch.
  const std::size_t B = d == 0 ? 1 : cfg.batches;
  const std::size_t N = d == 0 ? 1 : detail::lattice_size(cfg.per_batch());
  std::vector<std::complex<double>> phase(B * N * T, 1.0);
  if (d > 0) {
    auto g = detail::lattice_generator(N, d);
    std::vector<double> theta;
    for (std::size_t b = 0; b < B; ++b) {
      Rng rng(derive_seed(cfg.seed, b));
      std::vector<double> shift(d);
      for (auto& s : shift) s = rng.uniform();
      for (std::size_t j = 0; j < N; ++j) {
        detail::lattice_point(g, N, j, shift, theta);
        for (std::size_t t = 0; t < T; ++t) {
          double ang = 0;
          for (std::size_t i = 0; i < d; ++i) ang += fb.rest[t][i] * theta[i];
          phase[(b * N + j) * T + t] = std::polar(1.0, kTwoPi * ang);
        }
      }
    }
  }

  std::vector<std::string> failure(nodes);
  parallel_for(nodes, [&](std::size_t k) {
    std::vector<double> u = grid.node(k);
    std::vector<double> radial(T);
    for (std::size_t t = 0; t < T; ++t) {
      double s = 0;
      for (std::size_t i = 0, j = 0; i < fb.n; ++i) {
        if (i == fb.last) continue;
        s += fb.rest[t][j++] * u[i];
      }
      radial[t] = fb.coef[t] * std::exp(-s);
    }
    double log_r = fb.n > 0 ? -u[fb.last] : 0.0;
    std::vector<std::complex<double>> work;
    if (fb.monomial() || fb.n == 0) {
      double s = 0;
      if (fb.n > 0) s = static_cast<double>(fb.low) * log_r;
      out[k] = {-(std::log(std::abs(radial[0])) + s), 0.0};
      return;
    }
    std::vector<double> means(B, 0.0);
    for (std::size_t b = 0; b < B; ++b) {
      double acc = 0;
      std::size_t used = 0;
      for (std::size_t j = 0; j < N; ++j) {
        double v = fb.fiber_value(radial, &phase[(b * N + j) * T], log_r, work);
        if (!std::isfinite(v)) continue;  // exact zero of the fiber polynomial
        acc += v;
        ++used;
      }
      if (used == 0) {
        failure[k] = "ronkin: every quadrature point hit a zero of f";
        return;
      }
      means[b] = acc / static_cast<double>(used);
    }
    double mean = 0;
    for (double m : means) mean += m;
    mean /= static_cast<double>(B);
    double var = 0;
    if (B > 1) {
      for (double m : means) var += (m - mean) * (m - mean);
      var /= static_cast<double>(B - 1) * static_cast<double>(B);
    }
    double se = std::sqrt(var);
    if (se > cfg.max_stderr) {
      failure[k] = "ronkin: unstable variance (standard error " + format_real(se) + ") after the sample budget";
      return;
    }
    out[k] = {mean, 3 * se};
  });
  for (const auto& msg : failure) {
    if (!msg.empty()) fail_numeric(msg);
  }
  return out;
}

Estimate arch_ronkin_value(const LaurentPolynomial& f, const std::vector<double>& u, const QuadratureConfig& cfg) {
  Fibered fb(f);
  check_u(fb, u);
  Grid g{u, std::vector<double>(u.size(), 1.0), std::vector<std::size_t>(u.size(), 1)};
  return arch_ronkin_grid(f, g, cfg)[0];
}

Estimate arch_ronkin_value(const LaurentPolynomial& f, const RationalVector& u, const QuadratureConfig& cfg) {
  std::vector<double> x;
  for (const auto& q : u) x.push_back(to_double(q));
  return arch_ronkin_value(f, x, cfg);
}

namespace {

double default_u_step(std::size_t n) { return n <= 1 ? 1e-3 : n == 2 ? 0.02 : 0.1; }
double default_m_step(std::size_t n) { return n <= 1 ? 1e-3 : n == 2 ? 0.01 : 0.05; }

}  // namespace

ConcaveFunction ronkin_roof(const LaurentPolynomial& f, const PlaceQ& v, const QuadratureConfig& cfg,
                            const RoofConfig& roof) {
  if (f.is_zero()) fail_validation("ronkin_roof: zero polynomial");
  if (!v.is_archimedean()) return legendre_dual(tropical_ronkin(f, v));
  cfg.validate();
  const std::size_t n = f.n_vars();
  if (n == 0) fail_validation("ronkin_roof: polynomial in zero variables");
  Polytope np = newton_polytope(f);
  double R = roof.window > 0 ? roof.window : ronkin_window(f, roof.margin);
  double hu = roof.u_step > 0 ? roof.u_step : default_u_step(n);
  double hm = roof.m_step > 0 ? roof.m_step : default_m_step(n);
  Grid ugrid = Grid::covering(std::vector<double>(n, -R), std::vector<double>(n, R), hu, 0);
  auto est = arch_ronkin_grid(f, ugrid, cfg);
  std::vector<double> rho(est.size());
  double err = 0;
  for (std::size_t k = 0; k < est.size(); ++k) {
    rho[k] = est[k].value;
    err = std::max(err, est[k].error);
  }
  double lip = 0;
  for (const auto& vert : np.vertices()) {
    double s = 0;
    for (const auto& x : vert) s += std::abs(to_double(x));
    lip = std::max(lip, s);
  }
  SampledConcave rs(ugrid, std::move(rho), box_polytope(ugrid), lip, err);
  std::vector<double> lo(n, kInf), hi(n, -kInf);
  for (const auto& vert : np.vertices()) {
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = std::min(lo[i], to_double(vert[i]));
      hi[i] = std::max(hi[i], to_double(vert[i]));
    }
  }
  Grid mgrid = Grid::covering(lo, hi, hm, 1);
  return dual_sampled(rs, mgrid, np);
}

bool PushforwardReport::ok() const {
  for (const auto& e : entries) {
    if (!e.values_ok || !e.roof_ok) return false;
  }
  return true;
}

PushforwardReport pushforward_check(const LaurentPolynomial& f, const LinearMapQ& gamma, const std::vector<PlaceQ>& places,
                                    const QuadratureConfig& cfg, std::size_t points) {
  PushforwardReport rep;
  rep.image = pushforward(f, gamma);
  const std::size_t b = gamma.target_dim;
  LinearMapQ dual = gamma.transpose();
  bool merged = rep.image.terms().size() != f.terms().size();
  bool injective = detail::rank(gamma.matrix) == gamma.source_dim;
  Rng rng(derive_seed(cfg.seed, 0x9e37));
  std::vector<RationalVector> us;
  for (std::size_t k = 0; k < points; ++k) {
    RationalVector u(b);
    for (auto& x : u) x = make_rational(rng.integer(-12, 12), 4);
    us.push_back(std::move(u));
  }
  for (const auto& v : places) {
    PushforwardEntry e;
    e.place = v;
    e.points = us.size();
    if (merged) e.note = "distinct exponents of f collide under the map; the identity is not expected";
    if (rep.image.is_zero()) {
      e.values_ok = false;
      e.note = "image polynomial vanishes";
      rep.entries.push_back(e);
      continue;
    }
    if (!v.is_archimedean()) {
      auto rf = tropical_ronkin(f, v);
      auto rg = tropical_ronkin(rep.image, v);
      // Cores compare at rescaled points, which is the same identity.
      for (const auto& u : us) {
        if (rg.core_value(u) != rf.core_value(dual.apply(u))) e.values_ok = false;
      }
      e.roof_checked = true;
      e.roof_ok = legendre_dual(rg) == direct_image(gamma, legendre_dual(rf));
    } else {
      if (!injective && e.note.empty()) e.note = "map is not injective; the fiber measure is not pushed to Haar measure";
      for (const auto& u : us) {
        auto a = arch_ronkin_value(rep.image, u, cfg);
        auto c = arch_ronkin_value(f, dual.apply(u), cfg);
        double dev = std::abs(a.value - c.value);
        double tol = a.error + c.error + 1e-9 * (1 + std::abs(a.value));
        e.max_deviation = std::max(e.max_deviation, dev);
        e.max_error = std::max(e.max_error, tol);
        if (dev > tol) e.values_ok = false;
      }
    }
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace th
