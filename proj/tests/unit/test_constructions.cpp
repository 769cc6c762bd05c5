#include <doctest.h>

#include <algorithm>
#include <random>

#include "filterlab/constructions.hpp"
#include "support/oracles.hpp"

using namespace filterlab;

namespace {

Rational q_of(const json& s) { return parse_rational(s.get<std::string>()); }

// ||x_n restricted outside [lo, hi]|| for x_n = (1/n) e_1 + e_(n+1).
Rational perturbed_outside(Nat n, Nat lo, Nat hi) {
  Rational out = 0;
  if (1 < lo || 1 > hi)
    out += Rational(1, n);
  if (n + 1 < lo || n + 1 > hi)
    out += 1;
  return out;
}

} // namespace

TEST_CASE("delta schedules") {
  const DeltaSchedule s = DeltaSchedule::geometric(rational(1, 2), rational(1, 32), rational(1, 2));
  CHECK(s.at(1) == rational(1, 32));
  CHECK(s.at(4) == rational(1, 256));
  CHECK(s.total() == rational(1, 16));
  CHECK_THROWS_AS(DeltaSchedule::geometric(rational(1, 2), rational(1, 8), rational(1, 2)), Error);
  CHECK(DeltaSchedule::from_json(s.to_json()).to_json() == s.to_json());
}

TEST_CASE("perturbation of a block basis") {
  std::vector<L1Vec> ys;
  std::vector<CoordBlock> blocks;
  for (Nat n = 1; n <= 20; ++n) {
    L1Vec v = L1Vec::unit(2 * n);
    v.set(2 * n + 1, rational(1, 8));
    ys.push_back(v);
    blocks.push_back({2 * n, 2 * n});
  }
  const PerturbationReport ok = perturbation_check(ys, blocks, rational(1, 2), 1, 1000, 7);
  CHECK(ok.accepted);
  CHECK(ok.bounds_hold);
  CHECK(ok.c1 == rational(1, 2));
  CHECK(ok.worst_ratio >= ok.c1);
  CHECK(ok.worst_ratio <= 1);

  ys[3].set(9, rational(1, 4)); // perturbation exactly eps/2
  const PerturbationReport edge = perturbation_check(ys, blocks, rational(1, 2), 1, 10, 7);
  CHECK_FALSE(edge.accepted);
  REQUIRE(edge.offending);
  CHECK(*edge.offending == 4);

  std::vector<CoordBlock> overlap = {{1, 3}, {3, 4}};
  std::vector<L1Vec> two = {L1Vec::unit(1), L1Vec::unit(4)};
  CHECK_FALSE(perturbation_check(two, overlap, rational(1, 2), 1, 10, 7).accepted);
}

TEST_CASE("gliding hump on the perturbed basis") {
  const auto sch = DeltaSchedule::geometric(rational(1, 2), rational(1, 32), rational(1, 2));
  const ExtractionResult e = extract_basic_subsequence(FilterHandle::frechet(), perturbed_basis(), SetExpr::all(), sch, 2000);
  REQUIRE(e.verdict.is_proved());
  REQUIRE(e.kept.size() >= 2);
  CHECK(std::is_sorted(e.selected.begin(), e.selected.end()));

  int perturbations = 0;
  for (const auto& c : e.certificate.at("checks")) {
    const json& ev = c.at("eval");
    const Nat n = ev.at("n");
    const Rational lhs = q_of(c.at("lhs")), rhs = q_of(c.at("rhs"));
    const std::string fn = ev.at("fn");
    Rational expect;
    if (fn == "perturbation") {
      expect = perturbed_outside(n, ev.at("lo"), ev.at("hi"));
      CHECK(rhs <= 2 * sch.at(1));
      ++perturbations;
    } else if (fn == "tail_mass") {
      const Nat m = ev.at("m");
      expect = (m <= 1 ? Rational(1, n) : Rational(0)) + (n + 1 >= m ? 1 : 0);
    } else {
      const Nat m = ev.at("m");
      expect = (m >= 1 ? Rational(1, n) : Rational(0)) + (n + 1 <= m ? 1 : 0);
    }
    REQUIRE(lhs == expect);
    REQUIRE(relation_holds(lhs, c.at("relation").get<std::string>(), rhs));
  }
  CHECK(perturbations == static_cast<int>(e.kept.size()));
  REQUIRE(e.perturbation);
  CHECK(e.perturbation->bounds_hold);
}

TEST_CASE("canonical basis extracts with zero perturbation") {
  const auto sch = DeltaSchedule::standard(rational(1, 2));
  const ExtractionResult e = extract_basic_subsequence(FilterHandle::frechet(), canonical_basis(), SetExpr::all(), sch, 1000);
  REQUIRE(e.verdict.is_proved());
  for (const auto& c : e.certificate.at("checks"))
    if (c.at("eval").at("fn") == "perturbation")
      CHECK(q_of(c.at("lhs")) == 0);
}

TEST_CASE("extraction preconditions") {
  const auto sch = DeltaSchedule::standard(rational(1, 2));
  const SetExpr J = SetExpr::columns(SetExpr::progression(2, 2), ColumnRule::subsample(1, 2));
  try {
    extract_basic_subsequence(FilterHandle::trace(FilterHandle::column_fd_tails(), J), remark_sequence(), J, sch, 5000);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.code() == "precondition");
  }
}

TEST_CASE("triangular column extraction") {
  const auto sch = DeltaSchedule::geometric(rational(1, 2), rational(1, 32), rational(1, 2));
  const SeqGen basis = canonical_basis();
  const ClaimResult plain = extract_fd_claim(basis, sch, 6, 10000);
  CHECK(plain.perturbation.accepted);
  CHECK(plain.columns == std::vector<Nat>{1, 1, 2, 1, 2, 3});
  const auto cells = oracle::cantor_cells(plain.picks.back());
  for (std::size_t i = 0; i < plain.picks.size(); ++i)
    CHECK(cells[plain.picks[i]].second == plain.columns[i]);

  const SeqGen rho = user_defined("shifted", [](Nat n) {
    L1Vec v = L1Vec::unit(n);
    v.set(1, v.coord(1) + Rational(1) / from_nat(n));
    return v;
  });
  const ClaimResult c = extract_fd_claim(rho, sch, 10, 100000);
  CHECK(c.perturbation.accepted);
  CHECK(c.perturbation.bounds_hold);

  const SeqGen stuck = user_defined("column-constant", [](Nat n) { return L1Vec::unit(unpair(n).column); });
  CHECK_THROWS_AS(extract_fd_claim(stuck, sch, 10, 100000), Error);
}

TEST_CASE("Walsh systems") {
  CHECK(walsh_abs_sum({1, 1}) == 4);
  CHECK(walsh_abs_sum({1, 0}) == 4);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<long long> a(1 + rng() % 12);
    for (auto& x : a)
      x = static_cast<long long>(rng() % 41) - 20;
    REQUIRE(walsh_abs_sum(a) == oracle::walsh_abs_sum(a));
  }
  const WalshSystem w = walsh_system(3);
  CHECK(w.vectors.size() == 3);
  for (const auto& v : w.vectors) {
    CHECK(v.coords.size() == 8);
    CHECK(squared_norm1(v) == 2);
  }
  CHECK(w.verify(100, 1).is_proved());
  CHECK_THROWS_AS(walsh_system(17), Error);
  CHECK_THROWS_AS(walsh_system(0), Error);
}

TEST_CASE("block counterexample") {
  const auto cx = build_block_counterexample(FilterHandle::statistical(), SetExpr::all(), Blocking::dyadic(),
                                             rational(1, 2), 1 << 16);
  CHECK(cx.d_max == 8);
  for (Nat n = 1; n <= cx.covered_upto; ++n)
    REQUIRE(squared_norm1(cx.seq.at(n)) == 2);
  const auto one = build_block_counterexample(FilterHandle::statistical(), SetExpr::all(), Blocking::dyadic(), 1, 1 << 16);
  CHECK(one.d_max == 2);
  CHECK_THROWS_AS(build_block_counterexample(FilterHandle::frechet(), SetExpr::all(), Blocking::dyadic(),
                                             rational(1, 2), 1 << 16),
                  Error);
  CHECK(validate_weak_certificate(cx, 20, 9).is_proved());
  for (Nat v : block_violations(cx, TestFunctional::summing()))
    CHECK(v <= cx.d_max);
}

TEST_CASE("oscillation functional") {
  const SetExpr alt = SetExpr::columns(SetExpr::all(), ColumnRule::periodic({true, false}));
  const OscillationReport r = oscillation_functional(canonical_basis(), alt, 10000);
  CHECK(r.refutes);
  for (const auto& c : r.columns)
    CHECK(q_of(c.at("oscillation")) == 2);

  const OscillationReport flat = oscillation_functional(canonical_basis(), SetExpr::all(), 10000);
  CHECK_FALSE(flat.refutes);
  for (const auto& c : flat.columns)
    CHECK(q_of(c.at("oscillation")) == 0);

  const SeqGen doubled = user_defined("doubled", [](Nat n) { return L1Vec::unit(n, 2); });
  const OscillationReport big = oscillation_functional(doubled, alt, 10000);
  for (const auto& c : big.columns)
    CHECK(q_of(c.at("oscillation")) >= 4);

  CHECK_THROWS_AS(oscillation_functional(constant_vector(L1Vec::unit(1)), alt, 10), Error);
}
