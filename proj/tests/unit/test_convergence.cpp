#include <doctest.h>

#include "filterlab/constructions.hpp"
#include "filterlab/convergence.hpp"
#include "support/oracles.hpp"

using namespace filterlab;

namespace {

ConvergenceQuery scalar_query(FilterHandle f, SeqGen s, Rational limit, Rational eps, Nat horizon = 4096) {
  ConvergenceQuery q;
  q.filter = std::move(f);
  q.seq = std::move(s);
  q.mode = Mode::Scalar;
  q.scalar_limit = std::move(limit);
  q.eps = std::move(eps);
  q.horizon = horizon;
  return q;
}

} // namespace

TEST_CASE("scalar limits") {
  CHECK(f_limit(scalar_query(FilterHandle::frechet(), harmonic(0, 1), 0, rational(1, 100))).is_proved());
  CHECK(f_limit(scalar_query(FilterHandle::statistical(), square_indicator(), 0, rational(1, 2))).is_proved());
  CHECK(f_limit(scalar_query(FilterHandle::frechet(), square_indicator(), 0, rational(1, 2))).is_refuted());
  CHECK(f_limit(scalar_query(FilterHandle::statistical(), alternating(), 1, rational(1, 2))).is_refuted());
}

TEST_CASE("pattern detection on undeclared sequences") {
  const SeqGen every_third = user_defined_scalar("every-third", [](Nat n) { return Rational(n % 3 == 0 ? 1 : 0); });
  const Verdict v = f_limit(scalar_query(FilterHandle::frechet(), every_third, 0, rational(1, 2)));
  CHECK(v.is_refuted());
  const Verdict s = f_limit(scalar_query(FilterHandle::statistical(), every_third, 0, rational(1, 2)));
  CHECK(s.is_refuted());
}

TEST_CASE("cluster refuter") {
  auto q = scalar_query(FilterHandle::frechet(), alternating(), 1, rational(1, 2));
  const auto r = cluster_refuter(q);
  REQUIRE(r);
  CHECK(r->stationary.is_proved());
  for (Nat n = 1; n <= 1000; ++n)
    REQUIRE(member(r->bad, n) == (n % 2 == 1));

  q = scalar_query(FilterHandle::statistical(), identity_scalar(), 0, 1);
  const auto id = cluster_refuter(q);
  REQUIRE(id);
  CHECK(id->stationary.is_proved());
  CHECK(counting(id->bad, 1000) >= 999);

  CHECK_FALSE(cluster_refuter(scalar_query(FilterHandle::frechet(), harmonic(0, 1), 0, rational(1, 10))));
}

TEST_CASE("coordinatewise limits of the column sequence") {
  ConvergenceQuery q;
  q.seq = remark_sequence();
  q.mode = Mode::Coordinatewise;
  q.eps = rational(1, 2);
  q.horizon = 100000;
  q.filter = FilterHandle::column_fd_tails();
  CHECK(f_limit(q).is_proved());
  CHECK_FALSE(cluster_refuter(q));
  q.filter = FilterHandle::frechet();
  CHECK(f_limit(q).is_refuted());
}

TEST_CASE("norm and weak limits") {
  ConvergenceQuery q;
  q.filter = FilterHandle::statistical();
  q.seq = canonical_basis();
  q.mode = Mode::Norm;
  q.eps = rational(1, 2);
  CHECK(f_limit(q).is_refuted());

  q.mode = Mode::Weak;
  q.family = {TestFunctional::summing()};
  CHECK(f_limit(q).is_refuted());
  q.family = {TestFunctional::signs({1, 1, 1}, {0})};
  CHECK(f_limit(q).is_proved());

  q.mode = Mode::Norm;
  q.seq = walsh_block_sequence(SetExpr::all(), Blocking::dyadic());
  q.horizon = 32;
  CHECK(f_limit(q).is_refuted());
}

TEST_CASE("query validation and json") {
  ConvergenceQuery q;
  q.mode = Mode::Weak;
  CHECK_THROWS_AS(q.validate(), Error);
  q = scalar_query(FilterHandle::statistical(), harmonic(1, 2), 1, rational(1, 3));
  const ConvergenceQuery back = ConvergenceQuery::from_json(q.to_json());
  CHECK(back.to_json() == q.to_json());
  CHECK(mode_from_string(to_string(Mode::Coordinatewise)) == Mode::Coordinatewise);
}

TEST_CASE("almost Schur") {
  CHECK(almost_schur_check(FilterHandle::statistical(), inverse_unit(), rational(1, 10), 100, 10000).is_proved());
  CHECK(almost_schur_check(FilterHandle::statistical(), canonical_basis(), rational(1, 10), 100, 10000).is_refuted());
  CHECK(almost_schur_check(FilterHandle::statistical(), walsh_block_sequence(SetExpr::all(), Blocking::dyadic()),
                           rational(1, 2), 4, 32)
            .is_refuted());
}

TEST_CASE("strong Cesaro averages") {
  const CesaroReport sq = strong_cesaro(square_indicator(), 0, 1000000);
  const CesaroCheckpoint& last = sq.checkpoints.back();
  REQUIRE(last.n == 1000000);
  REQUIRE(last.exact);
  CHECK(last.average == rational(static_cast<long>(oracle::count_squares(1000000)), 1000000));
  CHECK(last.average == rational(1, 1000));

  for (const auto& c : strong_cesaro(alternating(), rational(1, 3), 10000).checkpoints)
    CHECK(c.lower >= 1);
  for (const auto& c : strong_cesaro(constant_scalar(5), 5, 10000).checkpoints)
    CHECK(c.upper == 0);
}

TEST_CASE("statistical and Cesaro diagnostics") {
  CHECK(stat_vs_cesaro(square_indicator(), 0, 1000000, rational(1, 100)).is_proved());
  const Verdict alt = stat_vs_cesaro(alternating(), 0, 10000, rational(1, 100));
  CHECK(alt.is_proved());
  CHECK(alt.certificate.at("statisticallyConvergent") == false);
  CHECK(alt.certificate.at("cesaroConvergent") == false);
  CHECK_THROWS_AS(stat_vs_cesaro(identity_scalar(), 0, 100, rational(1, 100)), Error);
}
