#include <doctest.h>

#include <random>

#include "filterlab/l1seq.hpp"
#include "support/oracles.hpp"

using namespace filterlab;

TEST_CASE("vector arithmetic and norms") {
  L1Vec v = L1Vec::unit(3, rational(-1, 2));
  v.set(7, rational(2, 3));
  CHECK(norm1(v) == rational(7, 6));
  CHECK(squared_norm1(v) == rational(49, 36));
  CHECK(tail_mass(v, 4) == rational(2, 3));
  CHECK(head_mass(v, 3) == rational(1, 2));
  const L1Vec w = v - v;
  CHECK(w.empty());
  CHECK((rational(2) * v).coord(7) == rational(4, 3));
  CHECK(L1Vec::from_json(v.to_json()) == v);

  L1Vec s = L1Vec::unit(1, 1);
  s.set(2, -1);
  s.scale_sqrt_half = true;
  CHECK(squared_norm1(s) == 2);
  CHECK_THROWS_AS(norm1(s), Error);
  CHECK_THROWS_AS(s + v, Error);
}

TEST_CASE("test functionals") {
  const auto f = TestFunctional::signs({1, -1}, {rational(1, 2)});
  CHECK(f.at(1) == 1);
  CHECK(f.at(2) == -1);
  CHECK(f.at(9) == rational(1, 2));
  L1Vec v = L1Vec::unit(1);
  v.set(2, 3);
  v.set(10, 4);
  CHECK(apply(f, v) == 1 - 3 + 2);
  CHECK(apply(TestFunctional::summing(), v) == 8);
  CHECK_THROWS_AS(TestFunctional::signs({2}, {0}), Error);

  const auto b = TestFunctional::blocks({{2, 5, rational(-1, 4)}});
  CHECK(apply(b, v) == rational(-3, 4));
  CHECK(TestFunctional::from_json(b.to_json()).to_json() == b.to_json());
}

TEST_CASE("named sequences") {
  CHECK(canonical_basis().at(7) == L1Vec::unit(7));
  const L1Vec p = perturbed_basis().at(4);
  CHECK(p.coord(1) == rational(1, 4));
  CHECK(p.coord(5) == 1);
  CHECK(norm1(p) == rational(5, 4));

  const auto cells = oracle::cantor_cells(5000);
  const SeqGen r = remark_sequence();
  for (Nat n = 1; n <= 5000; ++n) {
    const Nat m = cells[n].second;
    const L1Vec x = r.at(n);
    if (m == n) {
      REQUIRE(x.coord(n) == 2);
      REQUIRE(x.coords.size() == 1);
    } else {
      REQUIRE(x.coord(n) == 1);
      REQUIRE(x.coord(m) == 1);
      REQUIRE(x.coords.size() == 2);
    }
  }
  CHECK(alternating().value(3) == -1);
  CHECK(square_indicator().value(49) == 1);
  CHECK(square_indicator().value(50) == 0);
  CHECK(harmonic(2, 3).value(6) == rational(5, 2));
}

TEST_CASE("cesaro means") {
  L1Vec v = L1Vec::unit(2, 3);
  CHECK(cesaro_means(constant_vector(v), 17) == v);
  const L1Vec m = cesaro_means(canonical_basis(), 4);
  for (Nat k = 1; k <= 4; ++k)
    CHECK(m.coord(k) == rational(1, 4));
  CHECK(norm1(m) == 1);

  // v off the squares, e_n on the squares: each square moves the mean by at most (|v|+1)/n
  const L1Vec u = L1Vec::unit(2);
  const SeqGen g = user_defined("squares-perturbed", [u](Nat n) {
    const Nat r = oracle::count_squares(n);
    return r * r == n ? L1Vec::unit(n) : u;
  });
  const L1Vec mean = cesaro_means(g, 10000);
  CHECK(norm1(mean - u) <= rational(2, 100));
}

TEST_CASE("mixtures are reproducible and bounded") {
  for (Nat seed = 0; seed < 20; ++seed) {
    const SeqGen a = mixture(seed), b = mixture(seed);
    REQUIRE(a.meta().bound);
    for (Nat n = 1; n <= 200; ++n) {
      REQUIRE(a.value(n) == b.value(n));
      REQUIRE(abs_value(a.value(n)) <= *a.meta().bound);
    }
  }
}

TEST_CASE("declared bad sets match pointwise evaluation") {
  const SeqGen h = harmonic(1, 1);
  const auto bad = h.meta().scalar_bad(1, rational(1, 10));
  REQUIRE(bad);
  for (Nat n = 1; n <= 200; ++n)
    REQUIRE(member(*bad, n) == (abs_value(h.value(n) - 1) >= rational(1, 10)));
}
