#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace filterlab {

using Nat = std::uint64_t;

/// Exact arbitrary-precision rational. All certificate arithmetic uses it.
using Rational = mpq_class;

/// Raised for every contract violation the library reports. `code()` is a
/// short machine-readable tag such as "invalid-blocking" or "invalid-chain".
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

/// Parses "p", "-p", "p/q". Throws Error("invalid-rational") otherwise.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& value);

inline Rational rational(long num, unsigned long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}
inline Rational abs_value(const Rational& value) { return value < 0 ? Rational(-value) : value; }
inline Rational from_nat(Nat n) {
  mpz_class z;
  mpz_import(z.get_mpz_t(), 1, 1, sizeof(n), 0, 0, &n);
  return Rational(z);
}

/// Smallest integer >= value.
mpz_class ceil(const Rational& value);

/// floor(n^(1/k)) for k >= 1.
Nat iroot(Nat n, unsigned k);
Nat isqrt(Nat n);

} // namespace filterlab
