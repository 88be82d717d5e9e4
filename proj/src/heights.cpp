#include "toricheights/heights.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>

#include "toricheights/detail/hull.hpp"
#include "toricheights/numeric.hpp"

namespace th {

namespace {

using Poly = std::vector<Rational>;

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

std::vector<Integer> poly_div_exact(std::vector<Integer> num, const std::vector<Integer>& den) {
  std::vector<Integer> q(num.size() - den.size() + 1);
  for (std::size_t k = q.size(); k-- > 0;) {
    Integer t = num[k + den.size() - 1] / den.back();
    q[k] = t;
    for (std::size_t i = 0; i < den.size(); ++i) num[k + i] -= t * den[i];
  }
  return q;
}

// r = a mod b, q = a div b over Q.
void poly_divmod(const Poly& a, const Poly& b, Poly& q, Poly& r) {
  r = a;
  trim(r);
  q.assign(r.size() >= b.size() ? r.size() - b.size() + 1 : 0, Rational(0));
  while (r.size() >= b.size()) {
    std::size_t shift = r.size() - b.size();
    Rational t = r.back() / b.back();
    q[shift] = t;
    for (std::size_t i = 0; i < b.size(); ++i) r[shift + i] -= t * b[i];
    trim(r);
  }
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  Poly c(std::max(a.size(), b.size()), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) c[i] -= b[i];
  trim(c);
  return c;
}

Poly phi_poly(std::uint64_t n) {
  const auto& z = cyclotomic_polynomial(n);
  Poly p;
  for (const auto& c : z) p.push_back(Rational(c));
  return p;
}

// Reduce modulo the monic polynomial phi into exactly deg(phi) coefficients.
std::vector<Rational> reduce(std::vector<Rational> v, const std::vector<Integer>& phi) {
  const std::size_t d = phi.size() - 1;
  for (std::size_t k = v.size(); k-- > d;) {
    if (v[k] == 0) continue;
    Rational t = v[k];
    for (std::size_t i = 0; i <= d; ++i) v[k - d + i] -= t * phi[i];
  }
  v.resize(d, Rational(0));
  return v;
}

std::uint64_t lcm_u(std::uint64_t a, std::uint64_t b) { return a / std::gcd(a, b) * b; }

// Polynomials over Z/m, constant term first, trimmed.
using u64 = std::uint64_t;
using u128 = unsigned __int128;
using ModPoly = std::vector<u64>;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  for (; e; e >>= 1, a = mulmod(a, a, m)) {
    if (e & 1) r = mulmod(r, a, m);
  }
  return r;
}

void trim_mod(ModPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

ModPoly to_mod(const std::vector<Integer>& a, u64 m) {
  ModPoly p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = mpz_fdiv_ui(a[i].get_mpz_t(), m);
  trim_mod(p);
  return p;
}

// a <- a mod b for a prime modulus; b nonzero.
void rem_mod(ModPoly& a, const ModPoly& b, u64 m) {
  u64 inv = powmod(b.back(), m - 2, m);
  while (a.size() >= b.size()) {
    std::size_t shift = a.size() - b.size();
    u64 t = mulmod(a.back(), inv, m);
    for (std::size_t i = 0; i < b.size(); ++i) {
      a[shift + i] = (a[shift + i] + m - mulmod(t, b[i], m)) % m;
    }
    trim_mod(a);
  }
}

u64 resultant_mod(ModPoly a, ModPoly b, u64 m) {
  if (b.empty()) return 0;
  u64 res = 1;
  while (b.size() > 1) {
    std::size_t da = a.size() - 1, db = b.size() - 1;
    ModPoly r = a;
    rem_mod(r, b, m);
    if (r.empty()) return 0;
    std::size_t dr = r.size() - 1;
    if ((da * db) % 2 == 1) res = (m - res) % m;
    res = mulmod(res, powmod(b.back(), da - dr, m), m);
    a = std::move(b);
    b = std::move(r);
  }
  return mulmod(res, powmod(b[0], a.size() - 1, m), m);
}

ModPoly gcd_mod(ModPoly a, ModPoly b, u64 m) {
  while (!b.empty()) {
    rem_mod(a, b, m);
    std::swap(a, b);
  }
  return a;
}

const std::vector<u64>& crt_primes(std::size_t count) {
  static std::mutex mu;
  static std::vector<u64> primes;
  std::lock_guard<std::mutex> lock(mu);
  u64 c = primes.empty() ? (u64{1} << 61) : primes.back() - 2;
  if (primes.empty()) c -= 1;
  while (primes.size() < count) {
    if (is_prime(c)) primes.push_back(c);
    c -= 2;
  }
  return primes;
}

// Upper bound on log2 |Res(phi_n, a)| from the complex embeddings of a.
double log2_norm_bound(const std::vector<Integer>& a, u64 n) {
  double sum_abs = 0;
  std::vector<double> ad(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    ad[j] = a[j].get_d();
    sum_abs += std::fabs(ad[j]);
  }
  std::vector<double> cs(n), sn(n);
  for (u64 r = 0; r < n; ++r) {
    double ang = 2 * M_PI * static_cast<double>(r) / static_cast<double>(n);
    cs[r] = std::cos(ang);
    sn[r] = std::sin(ang);
  }
  double err = sum_abs * (16.0 + 16.0 * static_cast<double>(a.size())) * std::ldexp(1.0, -52);
  double bits = 0;
  for (u64 k = 1; k <= n; ++k) {
    if (std::gcd(k, n) != 1) continue;
    double re = 0, im = 0;
    for (std::size_t j = 0; j < ad.size(); ++j) {
      if (ad[j] == 0) continue;
      u64 r = (j * k) % n;
      re += ad[j] * cs[r];
      im += ad[j] * sn[r];
    }
    bits += std::log2(std::hypot(re, im) + err);
  }
  return bits;
}

// Norm of the integral element with coefficient vector a, by CRT over word primes.
Integer integer_norm(const std::vector<Integer>& a, u64 n) {
  const auto& phi = cyclotomic_polynomial(n);
  double bits = std::max(0.0, log2_norm_bound(a, n)) + 4;
  std::size_t count = static_cast<std::size_t>(std::ceil(bits / 60.0));
  const auto& primes = crt_primes(count);
  Integer X = 0, M = 1;
  for (std::size_t i = 0; i < count; ++i) {
    u64 m = primes[i];
    u64 r = resultant_mod(to_mod(phi, m), to_mod(a, m), m);
    u64 x = mpz_fdiv_ui(X.get_mpz_t(), m);
    u64 minv = powmod(mpz_fdiv_ui(M.get_mpz_t(), m), m - 2, m);
    u64 t = mulmod((r + m - x) % m, minv, m);
    X += M * Integer(static_cast<unsigned long>(t));
    M *= Integer(static_cast<unsigned long>(m));
  }
  if (2 * X > M) X -= M;
  return X;
}

std::vector<Integer> numerators(const std::vector<Rational>& c) {
  std::vector<Integer> a;
  for (const auto& q : c) a.push_back(q.get_num());
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}


}  // namespace

std::size_t euler_phi(std::uint64_t n) {
  if (n == 0) fail_validation("euler_phi: zero");
  std::uint64_t r = n, m = n;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    while (m % p == 0) m /= p;
    r -= r / p;
  }
  if (m > 1) r -= r / m;
  return static_cast<std::size_t>(r);
}

const std::vector<Integer>& cyclotomic_polynomial(std::uint64_t n) {
  if (n == 0 || n > 100000) fail_validation("cyclotomic polynomial: conductor out of range");
  static std::mutex mu;
  static std::map<std::uint64_t, std::vector<Integer>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  std::vector<Integer> p(n + 1, Integer(0));
  p[0] = -1;
  p[n] = 1;
  for (std::uint64_t d = 1; d < n; ++d) {
    if (n % d == 0) p = poly_div_exact(p, cyclotomic_polynomial(d));
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(n, std::move(p)).first->second;
}

Cyclotomic::Cyclotomic(std::uint64_t conductor) : n_(conductor) {
  if (conductor == 0) fail_validation("cyclotomic: conductor must be >= 1");
  c_.assign(euler_phi(conductor), Rational(0));
}

Cyclotomic::Cyclotomic(std::uint64_t conductor, std::vector<Rational> coeffs) : n_(conductor) {
  if (conductor == 0) fail_validation("cyclotomic: conductor must be >= 1");
  for (auto& q : coeffs) q.canonicalize();
  c_ = reduce(std::move(coeffs), cyclotomic_polynomial(conductor));
}

Cyclotomic Cyclotomic::rational(std::uint64_t conductor, const Rational& q) { return Cyclotomic(conductor, {q}); }

Cyclotomic Cyclotomic::zeta(std::uint64_t conductor, std::int64_t power) {
  auto n = static_cast<std::int64_t>(conductor);
  if (n <= 0) fail_validation("cyclotomic: conductor must be >= 1");
  std::int64_t k = ((power % n) + n) % n;
  std::vector<Rational> v(static_cast<std::size_t>(k) + 1, Rational(0));
  v[static_cast<std::size_t>(k)] = 1;
  return Cyclotomic(conductor, std::move(v));
}

bool Cyclotomic::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Rational& q) { return q == 0; });
}

bool Cyclotomic::is_integral() const {
  return std::all_of(c_.begin(), c_.end(), [](const Rational& q) { return q.get_den() == 1; });
}

Integer Cyclotomic::denominator() const {
  Integer d = 1;
  for (const auto& q : c_) mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), q.get_den_mpz_t());
  return d;
}

Cyclotomic Cyclotomic::embed(std::uint64_t m) const {
  if (m == 0 || m % n_ != 0) fail_validation("cyclotomic: target conductor must be a multiple");
  if (m == n_) return *this;
  std::uint64_t step = m / n_;
  std::vector<Rational> v(c_.empty() ? 1 : (c_.size() - 1) * step + 1, Rational(0));
  for (std::size_t j = 0; j < c_.size(); ++j) v[j * step] = c_[j];
  return Cyclotomic(m, std::move(v));
}

Cyclotomic Cyclotomic::operator+(const Cyclotomic& o) const {
  std::uint64_t l = lcm_u(n_, o.n_);
  Cyclotomic a = embed(l), b = o.embed(l);
  for (std::size_t i = 0; i < a.c_.size(); ++i) a.c_[i] += b.c_[i];
  return a;
}

Cyclotomic Cyclotomic::operator-() const {
  Cyclotomic a = *this;
  for (auto& q : a.c_) q = -q;
  return a;
}

Cyclotomic Cyclotomic::operator-(const Cyclotomic& o) const { return *this + (-o); }

Cyclotomic Cyclotomic::operator*(const Cyclotomic& o) const {
  std::uint64_t l = lcm_u(n_, o.n_);
  Cyclotomic a = embed(l), b = o.embed(l);
  return Cyclotomic(l, poly_mul(a.c_, b.c_));
}

Cyclotomic Cyclotomic::inverse() const {
  if (is_zero()) fail_validation("cyclotomic: division by zero");
  // Extended Euclid: s * x + t * phi = g, g constant.
  Poly phi = phi_poly(n_);
  Poly r0 = phi, r1 = c_;
  trim(r1);
  Poly s0, s1{Rational(1)};
  while (r1.size() > 1) {
    Poly q, r;
    poly_divmod(r0, r1, q, r);
    Poly s = poly_sub(s0, poly_mul(q, s1));
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s);
  }
  if (r1.empty() || r1[0] == 0) fail_numeric("cyclotomic: element not invertible (internal error)");
  for (auto& q : s1) q /= r1[0];
  return Cyclotomic(n_, s1);
}

Cyclotomic Cyclotomic::operator/(const Cyclotomic& o) const {
  std::uint64_t l = lcm_u(n_, o.n_);
  return embed(l) * o.embed(l).inverse();
}

bool Cyclotomic::operator==(const Cyclotomic& o) const {
  if (n_ == o.n_) return c_ == o.c_;
  std::uint64_t l = lcm_u(n_, o.n_);
  return embed(l).c_ == o.embed(l).c_;
}

std::complex<double> Cyclotomic::embedding(std::uint64_t k) const {
  std::complex<double> s = 0;
  for (std::size_t j = 0; j < c_.size(); ++j) {
    if (c_[j] == 0) continue;
    double ang = 2 * M_PI * static_cast<double>((j * k) % n_) / static_cast<double>(n_);
    s += to_double(c_[j]) * std::polar(1.0, ang);
  }
  return s;
}

std::vector<RationalVector> Cyclotomic::multiplication_matrix() const {
  std::vector<RationalVector> rows;
  Cyclotomic cur = *this, z = zeta(n_, 1);
  for (std::size_t j = 0; j < c_.size(); ++j) {
    rows.push_back(cur.c_);
    cur = cur * z;
  }
  return rows;
}

Rational Cyclotomic::norm() const {
  if (is_zero()) return 0;
  Integer den = denominator();
  std::vector<Rational> scaled = c_;
  for (auto& q : scaled) q *= den;
  Rational out(integer_norm(numerators(scaled), n_));
  Integer dd;
  mpz_pow_ui(dd.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(c_.size()));
  out /= Rational(dd);
  return out;
}

std::string Cyclotomic::to_string() const {
  std::string s;
  for (std::size_t j = 0; j < c_.size(); ++j) {
    if (c_[j] == 0) continue;
    std::string term = th::to_string(c_[j]);
    if (j > 0) term += "*z^" + std::to_string(j);
    s += s.empty() ? term : " + " + term;
  }
  return s.empty() ? "0" : s;
}

namespace {

// Index of the lattice spanned by the x_i * zeta^j and D * Z[zeta] inside Z[zeta].
Integer lattice_index_mod(const std::vector<Cyclotomic>& ys, const Integer& D) {
  const std::size_t d = ys[0].degree();
  std::vector<std::vector<Integer>> pool;
  for (const auto& y : ys) {
    for (const auto& row : y.multiplication_matrix()) {
      std::vector<Integer> r(d);
      for (std::size_t c = 0; c < d; ++c) {
        mpz_fdiv_r(r[c].get_mpz_t(), row[c].get_num_mpz_t(), D.get_mpz_t());
      }
      pool.push_back(std::move(r));
    }
  }
  Integer index = 1;
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<Integer> extra(d, Integer(0));
    extra[c] = D;
    pool.push_back(std::move(extra));
    // Euclidean elimination on column c.
    for (;;) {
      std::size_t piv = pool.size();
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool[i][c] == 0) continue;
        if (piv == pool.size() || abs(pool[i][c]) < abs(pool[piv][c])) piv = i;
      }
      bool done = true;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (i == piv || pool[i][c] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), pool[i][c].get_mpz_t(), pool[piv][c].get_mpz_t());
        for (std::size_t k = c; k < d; ++k) {
          pool[i][k] -= q * pool[piv][k];
          if (k > c) mpz_fdiv_r(pool[i][k].get_mpz_t(), pool[i][k].get_mpz_t(), D.get_mpz_t());
        }
        if (pool[i][c] != 0) done = false;
      }
      if (done) {
        index *= abs(pool[piv][c]);
        pool.erase(pool.begin() + static_cast<long>(piv));
        break;
      }
    }
    pool.erase(std::remove_if(pool.begin(), pool.end(),
                              [](const std::vector<Integer>& r) {
                                return std::all_of(r.begin(), r.end(), [](const Integer& x) { return x == 0; });
                              }),
               pool.end());
  }
  return index;
}

// Norm of I + pZ[zeta] for a prime p: Z[zeta]/p is F_p[X]/(phi), a principal ideal
// ring, so the ideal is generated by the gcd of the reductions.
Integer prime_part(const std::vector<Cyclotomic>& ys, u64 p) {
  ModPoly g = to_mod(cyclotomic_polynomial(ys[0].conductor()), p);
  for (const auto& y : ys) {
    g = gcd_mod(std::move(g), to_mod(numerators(y.coeffs()), p), p);
    if (g.size() <= 1) return 1;
  }
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), p, g.size() - 1);
  return out;
}

}  // namespace

Integer content_norm(const std::vector<Cyclotomic>& xs) {
  if (xs.empty()) fail_validation("content_norm: empty input");
  std::uint64_t l = 1;
  for (const auto& x : xs) l = lcm_u(l, x.conductor());
  std::vector<Cyclotomic> ys;
  for (const auto& x : xs) {
    if (!x.is_integral()) fail_validation("content_norm: entries must be integral");
    if (!x.is_zero()) ys.push_back(x.embed(l));
  }
  if (ys.empty()) fail_validation("content_norm: all entries are zero");
  // Every norm lies in the ideal, so their gcd g does too and the quotient splits
  // over the coprime factors of g.
  Integer g = 0;
  for (const auto& y : ys) {
    Integer ny = abs(integer_norm(numerators(y.coeffs()), l));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), ny.get_mpz_t());
    if (g == 1) return 1;
  }
  if (ys.size() == 1) return g;
  Integer index = 1;
  for (u64 p = 2; p < 65536 && Integer(static_cast<unsigned long>(p * p)) <= g; ++p) {
    if (!is_prime(p) || mpz_divisible_ui_p(g.get_mpz_t(), p) == 0) continue;
    Integer pe = 1;
    while (mpz_divisible_ui_p(g.get_mpz_t(), p) != 0) {
      g /= static_cast<unsigned long>(p);
      pe *= static_cast<unsigned long>(p);
    }
    index *= pe == static_cast<unsigned long>(p) ? prime_part(ys, p) : lattice_index_mod(ys, pe);
  }
  if (g > 1) {
    bool small_prime = mpz_fits_ulong_p(g.get_mpz_t()) != 0 && is_prime(g.get_ui());
    index *= small_prime ? prime_part(ys, g.get_ui()) : lattice_index_mod(ys, g);
  }
  return index;
}

ProjectivePoint ProjectivePoint::from_rationals(const RationalVector& xs, std::uint64_t conductor) {
  ProjectivePoint p;
  p.conductor = conductor;
  for (const auto& x : xs) p.coords.push_back(Cyclotomic::rational(conductor, x));
  return p;
}

double HeightBreakdown::finite() const {
  if (is_zero_point) return 0;
  // log of a big integer without overflow
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, content.get_mpz_t());
  return -(std::log(mant) + static_cast<double>(exp) * std::log(2.0)) / static_cast<double>(degree);
}

namespace {

struct Mpfr {
  mpfr_t v;
  explicit Mpfr(mpfr_prec_t p) { mpfr_init2(v, p); }
  ~Mpfr() { mpfr_clear(v); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
};

// cos and sin of 2 pi r / n for r < n.
struct AngleTable {
  mpfr_prec_t prec;
  std::vector<mpfr_t> cs, sn;
  AngleTable(std::uint64_t n, mpfr_prec_t p) : prec(p), cs(n), sn(n) {
    Mpfr pi(p), ang(p);
    mpfr_const_pi(pi.v, MPFR_RNDN);
    for (std::uint64_t r = 0; r < n; ++r) {
      mpfr_init2(cs[r], p);
      mpfr_init2(sn[r], p);
      mpfr_mul_ui(ang.v, pi.v, 2 * r, MPFR_RNDN);
      mpfr_div_ui(ang.v, ang.v, n, MPFR_RNDN);
      mpfr_sin_cos(sn[r], cs[r], ang.v, MPFR_RNDN);
    }
  }
  ~AngleTable() {
    for (std::size_t r = 0; r < cs.size(); ++r) {
      mpfr_clear(cs[r]);
      mpfr_clear(sn[r]);
    }
  }
  AngleTable(const AngleTable&) = delete;
  AngleTable& operator=(const AngleTable&) = delete;
};

// Bounds on log max_i |sigma_k(x_i)|; false if precision is insufficient. All x_i
// share the table's conductor.
bool embedding_log_bounds(const std::vector<Cyclotomic>& xs, std::uint64_t k, const AngleTable& tab, double& lo,
                          double& hi) {
  const mpfr_prec_t prec = tab.prec;
  lo = hi = -std::numeric_limits<double>::infinity();
  Mpfr re(prec), im(prec), coef(prec), mod(prec), t(prec);
  for (const auto& x : xs) {
    if (x.is_zero()) continue;
    const std::uint64_t n = x.conductor();
    mpfr_set_zero(re.v, 1);
    mpfr_set_zero(im.v, 1);
    double sum_abs = 0;
    for (std::size_t j = 0; j < x.degree(); ++j) {
      const Rational& q = x.coeffs()[j];
      if (q == 0) continue;
      sum_abs += std::abs(to_double(q));
      std::uint64_t r = (j * (k % n)) % n;
      if (q.get_den() == 1 && mpz_fits_slong_p(q.get_num_mpz_t())) {
        long c = q.get_num().get_si();
        mpfr_mul_si(t.v, tab.cs[r], c, MPFR_RNDN);
        mpfr_add(re.v, re.v, t.v, MPFR_RNDN);
        mpfr_mul_si(t.v, tab.sn[r], c, MPFR_RNDN);
        mpfr_add(im.v, im.v, t.v, MPFR_RNDN);
      } else {
        mpfr_set_q(coef.v, q.get_mpq_t(), MPFR_RNDN);
        mpfr_fma(re.v, coef.v, tab.cs[r], re.v, MPFR_RNDN);
        mpfr_fma(im.v, coef.v, tab.sn[r], im.v, MPFR_RNDN);
      }
    }
    mpfr_hypot(mod.v, re.v, im.v, MPFR_RNDN);
    // Generous a priori bound on the accumulated rounding error.
    double err = sum_abs * 1.01 * (16.0 + 16.0 * static_cast<double>(x.degree())) * std::ldexp(1.0, -static_cast<int>(prec));
    mpfr_sub_d(t.v, mod.v, err, MPFR_RNDD);
    if (mpfr_cmp_d(t.v, 2 * err) <= 0) return false;
    mpfr_log(t.v, t.v, MPFR_RNDD);
    lo = std::max(lo, mpfr_get_d(t.v, MPFR_RNDD));
    mpfr_add_d(t.v, mod.v, err, MPFR_RNDU);
    mpfr_log(t.v, t.v, MPFR_RNDU);
    hi = std::max(hi, mpfr_get_d(t.v, MPFR_RNDU));
  }
  return true;
}

}  // namespace

HeightBreakdown projective_height(const ProjectivePoint& p, double target) {
  if (p.coords.empty()) fail_validation("projective_height: no coordinates");
  if (!(target > 0)) fail_validation("projective_height: precision target must be positive");
  std::uint64_t l = p.conductor == 0 ? 1 : p.conductor;
  for (const auto& x : p.coords) l = lcm_u(l, x.conductor());
  std::vector<Cyclotomic> xs;
  Integer den = 1;
  for (const auto& x : p.coords) {
    xs.push_back(x.embed(l));
    Integer d = xs.back().denominator();
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
  }
  HeightBreakdown hb;
  hb.degree = euler_phi(l);
  if (std::all_of(xs.begin(), xs.end(), [](const Cyclotomic& x) { return x.is_zero(); })) {
    hb.is_zero_point = true;
    hb.archimedean = -std::numeric_limits<double>::infinity();
    return hb;
  }
  Cyclotomic scale = Cyclotomic::rational(l, Rational(den));
  for (auto& x : xs) x = x * scale;
  hb.content = content_norm(xs);
  std::vector<std::uint64_t> ks;
  for (std::uint64_t k = 1; k <= l; ++k) {
    if (std::gcd(k, l) == 1) ks.push_back(k);
  }
  for (mpfr_prec_t prec = 64; prec <= 16384; prec *= 2) {
    std::vector<double> lo(ks.size()), hi(ks.size());
    std::vector<char> good(ks.size());
    AngleTable tab(l, prec);
    parallel_for(ks.size(), [&](std::size_t i) { good[i] = embedding_log_bounds(xs, ks[i], tab, lo[i], hi[i]); });
    if (std::find(good.begin(), good.end(), 0) != good.end()) continue;
    double slo = 0, shi = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      slo += lo[i];
      shi += hi[i];
    }
    double deg = static_cast<double>(hb.degree);
    hb.archimedean = (slo + shi) / 2 / deg;
    hb.archimedean_error = (shi - slo) / 2 / deg;
    hb.precision_bits = static_cast<unsigned>(prec);
    if (hb.archimedean_error <= target) return hb;
  }
  fail_numeric("projective_height: precision target unattainable within the iteration cap");
}

Integer height_tuple_Q_exp(const RationalVector& x) {
  if (x.empty()) fail_validation("height_tuple_Q: empty tuple");
  Integer den = lcm_of_denominators(x);
  Integer g = 0, best = 0;
  for (const auto& q : x) {
    Integer v = abs(Integer(q * Rational(den)));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    if (v > best) best = v;
  }
  if (g == 0) return 0;
  return best / g;
}

double height_tuple_Q(const RationalVector& x) {
  Integer h = height_tuple_Q_exp(x);
  if (h == 0) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, h.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

bool GvfReport::ok() const {
  return std::all_of(axioms.begin(), axioms.end(), [](const AxiomResult& a) { return a.ok(); });
}

namespace {

struct Recorder {
  AxiomResult r;
  explicit Recorder(std::string name) { r.name = std::move(name); }
  void check(double violation, double bound) {
    ++r.checks;
    if (std::isnan(violation)) violation = std::numeric_limits<double>::infinity();
    violation = std::max(violation, 0.0);
    r.max_violation = std::max(r.max_violation, violation);
    r.bound = std::max(r.bound, bound);
    if (violation > bound) ++r.failures;
  }
};

struct CycTuple {
  std::uint64_t n;
  std::vector<Cyclotomic> xs;
};

struct H {
  double value;
  double error;
};

H cyc_height(const std::vector<Cyclotomic>& xs) {
  ProjectivePoint p;
  p.coords = xs;
  auto hb = projective_height(p);
  if (hb.is_zero_point) return {-std::numeric_limits<double>::infinity(), 0};
  return {hb.total(), hb.error()};
}

std::vector<Cyclotomic> segre(const std::vector<Cyclotomic>& a, const std::vector<Cyclotomic>& b) {
  std::vector<Cyclotomic> out;
  for (const auto& x : a) {
    for (const auto& y : b) out.push_back(x * y);
  }
  return out;
}

RationalVector segre_q(const RationalVector& a, const RationalVector& b) {
  RationalVector out;
  for (const auto& x : a) {
    for (const auto& y : b) out.push_back(x * y);
  }
  return out;
}

}  // namespace

GvfReport gvf_axiom_suite(std::uint64_t seed, std::size_t samples) {
  Rng rng(derive_seed(seed, 0x6776));
  const std::uint64_t conductors[] = {3, 4, 5, 7, 8, 9, 12};
  const double e = std::log(2.0);  // archimedean error of the standard structure on Q
  const double fp = 1e-12;

  auto rat = [&](long span) {
    Rational q = make_rational(rng.integer(-span, span), rng.integer(1, 4));
    return q;
  };
  auto qtuple = [&](std::size_t len) {
    RationalVector v(len);
    for (auto& q : v) q = rat(30);
    return v;
  };
  auto cyc = [&](std::uint64_t n) {
    std::vector<Rational> c(euler_phi(n));
    for (auto& q : c) q = make_rational(rng.integer(-3, 3), rng.integer(1, 2));
    return Cyclotomic(n, c);
  };
  auto ctuple = [&](std::uint64_t n, std::size_t len) {
    std::vector<Cyclotomic> v;
    for (std::size_t i = 0; i < len; ++i) v.push_back(cyc(n));
    return v;
  };
  auto all_zero_q = [](const RationalVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
  };

  Recorder zero("height of zero"), one("height of one"), inv("invariance"), add("additivity"), mono("monotonicity"),
      tri("triangle inequality"), prod("product formula"), nonneg("nonnegativity");

  zero.check(std::isinf(height_tuple_Q({0, 0})) && height_tuple_Q({0, 0}) < 0 ? 0 : 1, 0);
  one.check(height_tuple_Q({1, 1}) == 0 ? 0 : std::abs(height_tuple_Q({1, 1})), 0);
  for (std::uint64_t n : conductors) {
    auto h1 = cyc_height({Cyclotomic::rational(n, 1), Cyclotomic::rational(n, 1)});
    one.check(std::abs(h1.value), h1.error);
    auto hz = cyc_height({Cyclotomic(n), Cyclotomic(n)});
    zero.check(std::isinf(hz.value) && hz.value < 0 ? 0 : 1, 0);
  }

  // Rational tuples: exact integer bookkeeping.
  for (std::size_t s = 0; s < samples; ++s) {
    auto x = qtuple(1 + static_cast<std::size_t>(rng.integer(0, 3)));
    auto y = qtuple(x.size());
    auto hx = height_tuple_Q_exp(x), hy = height_tuple_Q_exp(y);
    if (hx == 0) {
      zero.check(all_zero_q(x) ? 0 : 1, 0);
      continue;
    }
    zero.check(all_zero_q(x) ? 1 : 0, 0);
    auto px = x;
    for (std::size_t i = px.size(); i > 1; --i) std::swap(px[i - 1], px[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i) - 1))]);
    inv.check(height_tuple_Q_exp(px) == hx ? 0 : 1, 0);
    if (hy != 0) add.check(height_tuple_Q_exp(segre_q(x, y)) == hx * hy ? 0 : 1, 0);
    RationalVector xy = x;
    xy.insert(xy.end(), y.begin(), y.end());
    mono.check(hx <= height_tuple_Q_exp(xy) ? 0 : 1, 0);
    RationalVector sum(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sum[i] = x[i] + y[i];
    if (!all_zero_q(sum)) tri.check(height_tuple_Q(sum) - height_tuple_Q(xy) - e, fp);
    nonneg.check(-height_tuple_Q(x), 0);
    // Product formula: |x|_inf * prod_p |x|_p == 1 exactly.
    const Rational& a = x[0];
    if (a != 0) {
      Rational pr = abs(a);
      Integer m = abs(a.get_num()) * a.get_den();
      for (unsigned long p = 2; m > 1; ++p) {
        if (m % p != 0) continue;
        while (m % p == 0) m /= p;
        Integer ord = p_adic_order(a, p);
        Rational pa = 1;
        for (Integer k = 0; k < abs(ord); ++k) pa *= Rational(static_cast<long>(p));
        pr *= ord > 0 ? 1 / pa : pa;  // |x|_p = p^-ord
      }
      prod.check(pr == 1 ? 0 : 1, 0);
    }
  }

  // Cyclotomic tuples: certified numeric bounds.
  std::size_t csamples = std::max<std::size_t>(samples / 5, 4);
  for (std::size_t s = 0; s < csamples; ++s) {
    std::uint64_t n = conductors[static_cast<std::size_t>(rng.integer(0, 6))];
    std::size_t len = 1 + static_cast<std::size_t>(rng.integer(0, 2));
    auto x = ctuple(n, len), y = ctuple(n, len);
    auto hx = cyc_height(x), hy = cyc_height(y);
    if (std::isinf(hx.value) || std::isinf(hy.value)) continue;
    auto px = x;
    std::reverse(px.begin(), px.end());
    auto hp = cyc_height(px);
    inv.check(std::abs(hp.value - hx.value), hp.error + hx.error + fp);
    auto hs = cyc_height(segre(x, y));
    add.check(std::abs(hs.value - hx.value - hy.value), hs.error + hx.error + hy.error + fp);
    auto xy = x;
    xy.insert(xy.end(), y.begin(), y.end());
    auto hxy = cyc_height(xy);
    mono.check(hx.value - hxy.value, hx.error + hxy.error + fp);
    std::vector<Cyclotomic> sum;
    for (std::size_t i = 0; i < len; ++i) sum.push_back(x[i] + y[i]);
    auto hsum = cyc_height(sum);
    if (!std::isinf(hsum.value)) tri.check(hsum.value - hxy.value - e, hsum.error + hxy.error + fp);
    nonneg.check(-hx.value, hx.error + fp);
    for (const auto& c : x) {
      if (c.is_zero()) continue;
      auto h = cyc_height({c});
      prod.check(std::abs(h.value), h.error + fp);
    }
  }

  GvfReport rep;
  for (auto* r : {&zero, &one, &inv, &add, &mono, &tri, &prod, &nonneg}) rep.axioms.push_back(r->r);
  return rep;
}

}  // namespace th
