#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace th {

using Integer = mpz_class;
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

// Error categories surface as CLI exit codes and C API status values.
enum class ErrorKind { validation, numeric, internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_validation(const std::string& msg) {
  throw Error(ErrorKind::validation, msg);
}
[[noreturn]] inline void fail_numeric(const std::string& msg) {
  throw Error(ErrorKind::numeric, msg);
}

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Accepts "p", "p/q", and finite decimals such as "-1.25" or "3e-2".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
std::string to_string(const RationalVector& v);

double to_double(const Rational& q);

// Lexicographic comparison; vectors of different length compare by length first.
bool lex_less(const RationalVector& a, const RationalVector& b);

Rational dot(const RationalVector& a, const RationalVector& b);

Integer lcm_of_denominators(const RationalVector& v);

// Scales v to a primitive integer vector with the same direction.
std::vector<Integer> primitive_integer(const RationalVector& v);

// Exact factorial as an Integer.
Integer factorial(unsigned n);

bool is_prime(std::uint64_t n);
// p-adic order of a nonzero rational.
Integer p_adic_order(const Rational& c, std::uint64_t p);

}  // namespace th
