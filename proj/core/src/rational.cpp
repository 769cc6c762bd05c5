#include "filterlab/rational.hpp"

#include <cmath>
#include <limits>

namespace filterlab {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&] { return Error("invalid-rational", "not a rational number: '" + s + "'"); };
  if (s.empty())
    throw bad();
  auto slash = s.find('/');
  auto digits_ok = [](std::string_view part, bool allow_sign) {
    if (part.empty())
      return false;
    std::size_t i = 0;
    if (allow_sign && (part[0] == '-' || part[0] == '+'))
      i = 1;
    if (i == part.size())
      return false;
    for (; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9')
        return false;
    return true;
  };
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!digits_ok(num, true) || !digits_ok(den, false))
    throw bad();
  if (num[0] == '+')
    num.erase(0, 1);
  mpz_class n(num, 10), d(den, 10);
  if (d == 0)
    throw bad();
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& value) { return value.get_str(); }

mpz_class ceil(const Rational& value) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q;
}

Nat iroot(Nat n, unsigned k) {
  if (k <= 1 || n <= 1)
    return n;
  auto guess = static_cast<Nat>(std::pow(static_cast<long double>(n), 1.0L / k));
  auto pow_le = [&](Nat base) {
    // base^k <= n without overflow
    unsigned __int128 acc = 1;
    for (unsigned i = 0; i < k; ++i) {
      acc *= base;
      if (acc > n)
        return false;
    }
    return true;
  };
  while (guess > 0 && !pow_le(guess))
    --guess;
  while (pow_le(guess + 1))
    ++guess;
  return guess;
}

Nat isqrt(Nat n) { return iroot(n, 2); }

} // namespace filterlab
