#include <doctest.h>

#include <random>
#include <set>

#include "filterlab/setalg.hpp"
#include "support/oracles.hpp"

using namespace filterlab;

namespace {

// A sampled set together with a membership rule that does not use SetExpr.
struct Sampled {
  SetExpr expr;
  std::function<bool(Nat)> in;
};

Sampled sample_set(std::mt19937_64& rng) {
  switch (rng() % 4) {
  case 0: {
    std::set<Nat> s;
    for (int i = 0; i < 12; ++i)
      s.insert(1 + rng() % 300);
    return {SetExpr::finite({s.begin(), s.end()}), [s](Nat n) { return s.count(n) > 0; }};
  }
  case 1: {
    const Nat step = 1 + rng() % 7, first = 1 + rng() % step;
    return {SetExpr::progression(first, step), [=](Nat n) { return n >= first && n % step == first % step; }};
  }
  case 2: {
    const Nat k = rng() % 200;
    return {SetExpr::tail(k), [=](Nat n) { return n > k; }};
  }
  default:
    return {SetExpr::powers(2), [](Nat n) {
              Nat r = oracle::count_squares(n);
              return r * r == n;
            }};
  }
}

} // namespace

TEST_CASE("pairing follows the diagonal enumeration") {
  const auto cells = oracle::cantor_cells(100000);
  for (Nat n = 1; n <= 100000; ++n) {
    const Cell c = unpair(n);
    REQUIRE(c.row == cells[n].first);
    REQUIRE(c.column == cells[n].second);
    REQUIRE(pair_index(c.row, c.column) == n);
  }
  CHECK(unpair(2) == Cell{2, 1});
  CHECK(unpair(3) == Cell{1, 2});
}

TEST_CASE("membership basics") {
  CHECK(member(SetExpr::progression(0, 2), 4));
  CHECK_FALSE(member(~SetExpr::finite({1, 2, 3}), 2));
  const SetExpr sel = SetExpr::selector(Blocking::dyadic(), SelectRule::Min);
  const auto minima = oracle::dyadic_minima(10000);
  const std::set<Nat> mins(minima.begin(), minima.end());
  for (Nat n = 1; n <= 10000; ++n)
    REQUIRE(member(sel, n) == (mins.count(n) > 0));
  CHECK(member(sel, 3));
  CHECK_FALSE(member(sel, 4));
}

TEST_CASE("counting against brute force") {
  CHECK(counting(SetExpr::progression(0, 2), 100) == 50);
  CHECK(counting(SetExpr::powers(2), 1000000) == oracle::count_squares(1000000));
  CHECK(counting(SetExpr::powers(3), 1000000) == oracle::count_powers(1000000, 3));
  const SetExpr sel = SetExpr::selector(Blocking::dyadic(), SelectRule::Min);
  CHECK(counting(sel, Nat{1} << 20) == oracle::dyadic_minima(Nat{1} << 20).size());
}

TEST_CASE("density reports") {
  const DensityReport evens = density(SetExpr::progression(0, 2), 1000);
  REQUIRE(evens.exact);
  CHECK(*evens.value == rational(1, 2));

  const SetExpr sel = SetExpr::selector(Blocking::dyadic(), SelectRule::Min);
  const Nat h = Nat{1} << 20;
  const DensityReport s = density(sel, h);
  CHECK_FALSE(s.exact);
  CHECK(s.upper <= rational(22, h));
  CHECK(s.certified_upper == 0);
  const DensityReport c = density(~sel, h);
  CHECK(c.lower >= 1 - rational(22, h));
}

TEST_CASE("normalization of periodic combinations") {
  auto all = normalize(SetExpr::progression(0, 2) | SetExpr::progression(1, 2));
  REQUIRE(all);
  CHECK(all->canonical().is_all());

  auto six = normalize(SetExpr::progression(0, 2) & SetExpr::progression(0, 3));
  REQUIRE(six);
  CHECK(six->canonical().period().size() == 6);
  for (Nat n = 1; n <= 10000; ++n)
    REQUIRE(six->contains(n) == (n % 6 == 0));

  CHECK_FALSE(normalize(SetExpr::columns(SetExpr::all(), ColumnRule::subsample(1, 2))));
}

TEST_CASE("boolean operations agree with pointwise logic") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const Sampled a = sample_set(rng), b = sample_set(rng);
    const SetExpr u = a.expr | b.expr, i = a.expr & b.expr, d = a.expr - b.expr, c = ~a.expr;
    const auto bits = materialize(u, 1500);
    for (Nat n = 1; n <= 1500; ++n) {
      REQUIRE(bits[n] == (a.in(n) || b.in(n)));
      REQUIRE(member(i, n) == (a.in(n) && b.in(n)));
      REQUIRE(member(d, n) == (a.in(n) && !b.in(n)));
      REQUIRE(member(c, n) == !a.in(n));
    }
    Nat brute = 0;
    for (Nat n = 1; n <= 1500; ++n)
      brute += a.in(n) && b.in(n);
    REQUIRE(counting(i, 1500) == brute);
  }
}

TEST_CASE("enumerate and select") {
  const SetExpr s = SetExpr::progression(3, 5);
  const auto e = enumerate(s, 30);
  CHECK(e == std::vector<Nat>{3, 8, 13, 18, 23, 28});
  CHECK(select(s, 4, 1000) == 18);
  CHECK_FALSE(select(SetExpr::finite({2}), 2, 1000));
}

TEST_CASE("blockings") {
  const Blocking ex = Blocking::explicit_boundaries({2, 4, 8});
  CHECK(ex.piece(1) == std::vector<Nat>{1, 2});
  CHECK(ex.piece(2) == std::vector<Nat>{3, 4});
  CHECK(ex.piece(3) == std::vector<Nat>{5, 6, 7, 8});
  CHECK(ex.piece(4) == std::vector<Nat>{9, 10, 11, 12});
  CHECK_THROWS_AS(Blocking::explicit_boundaries({3, 3}), Error);

  const Blocking d = Blocking::dyadic();
  for (Nat n = 1; n <= 10000; ++n)
    REQUIRE(d.piece_of(n) == oracle::dyadic_piece(n));
  CHECK(d.piece(1) == std::vector<Nat>{1});
  CHECK(d.piece(3) == std::vector<Nat>{3, 4});
  CHECK(d.pieces_meeting(Nat{1} << 20) == 21);

  const SetExpr evens = SetExpr::progression(2, 2);
  const Blocking r = Blocking::restricted(evens, d);
  CHECK(r.piece(4) == std::vector<Nat>{6, 8});
}

TEST_CASE("json round trips") {
  const SetExpr s = (SetExpr::progression(1, 3) | SetExpr::finite({2, 8})) - SetExpr::powers(2);
  const SetExpr back = SetExpr::from_json(s.to_json());
  for (Nat n = 1; n <= 2000; ++n)
    REQUIRE(member(back, n) == member(s, n));
  const Blocking b = Blocking::restricted(SetExpr::progression(1, 2), Blocking::dyadic());
  CHECK(Blocking::from_json(b.to_json()).to_json() == b.to_json());
  CHECK_THROWS_AS(SetExpr::from_json(json{{"gen", "nope"}}), Error);
}

TEST_CASE("standard map sends column m to the m-th used column") {
  const SetExpr J = SetExpr::columns(SetExpr::progression(2, 2), ColumnRule::cofinite());
  const StandardMap s(J);
  for (Nat n = 1; n <= 2000; ++n) {
    const Cell c = unpair(n);
    const Cell img = unpair(s.forward(n));
    REQUIRE(img.column == 2 * c.column);
    REQUIRE(img.row == c.row);
    REQUIRE(s.inverse(s.forward(n)) == n);
  }
  CHECK_THROWS_AS(StandardMap(SetExpr::column(1)), Error);
}

TEST_CASE("column sets materialize cell by cell") {
  const SetExpr s = SetExpr::columns(SetExpr::progression(1, 3), ColumnRule::subsample(2, 3),
                                     {{4, ColumnRule::finite({1, 5})}, {2, ColumnRule::cofinite(4)}});
  const Nat h = 5000;
  const auto cells = oracle::cantor_cells(h);
  const auto bits = materialize(s, h);
  for (Nat n = 1; n <= h; ++n) {
    const auto [row, col] = cells[n];
    bool expect;
    if (col == 4)
      expect = row == 1 || row == 5;
    else if (col == 2)
      expect = row >= 4;
    else
      expect = col % 3 == 1 && row >= 2 && (row - 2) % 3 == 0;
    REQUIRE(bits[n] == expect);
  }
}
