#include <doctest.h>

#include <map>

#include "filterlab/filters.hpp"
#include "support/oracles.hpp"

using namespace filterlab;

namespace {

const json& check_by_id(const json& cert, const std::string& id) {
  for (const auto& c : cert.at("checks"))
    if (c.at("id") == id)
      return c;
  FAIL("missing check " << id);
  static const json none;
  return none;
}

} // namespace

TEST_CASE("membership examples") {
  const auto st = FilterHandle::statistical();
  CHECK(contains(st, ~SetExpr::progression(0, 2), 1000).is_refuted());
  CHECK(contains(st, ~SetExpr::selector(Blocking::dyadic(), SelectRule::Min), 1 << 20).is_proved());
  CHECK(contains(st, ~SetExpr::powers(2), 1000).is_proved());

  const auto fr = FilterHandle::frechet();
  CHECK(contains(fr, ~SetExpr::finite({1, 5, 9}), 100).is_proved());
  CHECK(contains(fr, SetExpr::progression(0, 2), 100).is_refuted());

  // B_{3,C}: columns from 3 on, first two rows removed
  const SetExpr b3 = SetExpr::columns(SetExpr::tail(2), ColumnRule::cofinite(3));
  CHECK(contains(FilterHandle::column_fd_tails(), b3, 1000).is_proved());
  CHECK(contains(FilterHandle::column_fd_tails(), SetExpr::column(1), 1000).is_refuted());
}

TEST_CASE("stationarity examples") {
  CHECK(is_stationary(FilterHandle::statistical(), SetExpr::progression(0, 2), 1000).is_proved());
  CHECK(is_stationary(FilterHandle::statistical(), SetExpr::powers(2), 1000).is_refuted());
  const auto fd = FilterHandle::column_fd_tails();
  CHECK(is_stationary(fd, SetExpr::column(1), 1000).is_refuted());
  const SetExpr standard = SetExpr::columns(SetExpr::progression(2, 2), ColumnRule::subsample(1, 2));
  CHECK(is_stationary(fd, standard, 1000).is_proved());
  CHECK(is_stationary(FilterHandle::column_fd_all(), SetExpr::column(1), 1000).is_proved());
}

TEST_CASE("trace rejects non-stationary sets") {
  try {
    FilterHandle::trace(FilterHandle::statistical(), SetExpr::powers(2));
    FAIL("expected invalid-trace");
  } catch (const Error& e) {
    CHECK(e.code() == "invalid-trace");
  }
}

TEST_CASE("statistical filter is not block-respecting for dyadic blocks") {
  const Nat h = Nat{1} << 20;
  const Verdict v = block_respecting_check(FilterHandle::statistical(), SetExpr::all(), Blocking::dyadic(), h);
  REQUIRE(v.is_refuted());
  const json& count = check_by_id(v.certificate, "selector-count");
  const Nat minima = oracle::dyadic_minima(h).size();
  CHECK(count.at("lhs") == std::to_string(minima));
  CHECK(parse_rational(count.at("rhs").get<std::string>()) <= 21);
  const json& dens = check_by_id(v.certificate, "density-bound");
  CHECK(parse_rational(dens.at("lhs").get<std::string>()) == rational(static_cast<long>(minima), h));
  CHECK(parse_rational(dens.at("lhs").get<std::string>()) < Rational(21, 1000000));
}

TEST_CASE("block-respecting positives") {
  const SetExpr evens = SetExpr::progression(2, 2);
  CHECK(block_respecting_check(FilterHandle::frechet(), evens, Blocking::dyadic(), 1000).is_proved());
  const SetExpr standard = SetExpr::columns(SetExpr::progression(2, 2), ColumnRule::subsample(1, 2));
  CHECK(block_respecting_check(FilterHandle::column_fd_tails(), standard, Blocking::dyadic(), 1 << 16).is_proved());
}

TEST_CASE("diagonality") {
  CHECK(diagonal_check(FilterHandle::column_fd_tails(), BaseChain::column_tails(), SetExpr::all(), 1000).is_refuted());
  CHECK(diagonal_check(FilterHandle::frechet(), BaseChain::tails(), SetExpr::progression(2, 2), 1000).is_proved());
  CHECK(diagonal_check(FilterHandle::countable_base_tails(), BaseChain::tails(3), SetExpr::all(), 1000).is_proved());
}

TEST_CASE("strongly diagonal witness for the tails base") {
  const Verdict v =
      strongly_diagonal_witness(FilterHandle::countable_base_tails(), BaseChain::tails(2), SetExpr::all(), 2000);
  REQUIRE(v.is_proved());
  const auto J = v.certificate.at("witness").get<std::vector<Nat>>();
  REQUIRE(J.size() >= 2000);
  // j ∈ A_n \ A_(n+1) iff 2n < j <= 2n + 2
  std::map<Nat, int> layers;
  for (Nat j : J)
    if (j > 2)
      ++layers[(j - 1) / 2];
  for (const auto& [n, c] : layers)
    REQUIRE(c <= 1);
  for (Nat k = 1; k <= 100; ++k)
    REQUIRE(std::any_of(J.begin(), J.end(), [k](Nat j) { return j > k; }));
}

TEST_CASE("strongly diagonal witness inside one column") {
  const Verdict v = strongly_diagonal_witness(FilterHandle::column_fd_all(), BaseChain::column_rows(),
                                              SetExpr::column(1), 500);
  REQUIRE(v.is_proved());
  const auto J = v.certificate.at("witness").get<std::vector<Nat>>();
  CHECK(J.size() >= 500);
  const auto cells = oracle::cantor_cells(J.back());
  for (Nat j : J)
    REQUIRE(cells[j].second == 1);
}

TEST_CASE("degenerate constant chain") {
  const Verdict v = strongly_diagonal_witness(FilterHandle::countable_base_tails(),
                                              BaseChain::constant(SetExpr::all()), SetExpr::all(), 100);
  CHECK(v.is_proved());
}

TEST_CASE("chains must decrease") {
  CHECK_THROWS_AS(BaseChain::explicit_list({SetExpr::progression(2, 2), SetExpr::all()}), Error);
}

TEST_CASE("splitting stationary sets") {
  const SetExpr evens = SetExpr::progression(2, 2);
  const SplitResult fr = split_stationary(FilterHandle::frechet(), evens, 1000);
  CHECK(fr.first_stationary.is_proved());
  CHECK(fr.second_stationary.is_proved());
  for (Nat n = 1; n <= 1000; ++n) {
    const bool a = member(fr.first, n), b = member(fr.second, n);
    REQUIRE_FALSE((a && b));
    REQUIRE((a || b) == (n % 2 == 0));
  }

  const SplitResult st = split_stationary(FilterHandle::statistical(), evens, 1000000);
  CHECK(st.first_stationary.is_proved());
  CHECK(st.second_stationary.is_proved());
  CHECK(counting(st.first, 1000000) * 4 >= 1000000 - 4);
  CHECK(counting(st.second, 1000000) * 4 >= 1000000 - 4);

  const SetExpr standard = SetExpr::columns(SetExpr::progression(1, 2), ColumnRule::cofinite());
  const SplitResult fd = split_stationary(FilterHandle::column_fd_tails(), standard, 1000);
  CHECK(fd.first_stationary.is_proved());
  CHECK(fd.second_stationary.is_proved());
}

TEST_CASE("standard embedding") {
  const SetExpr even_cols = SetExpr::columns(SetExpr::progression(2, 2), ColumnRule::cofinite());
  const EmbeddingReport r = standard_embedding(FilterHandle::column_fd_tails(), even_cols, 20, 5, 10000);
  CHECK(r.property.is_proved());
  CHECK_THROWS_AS(standard_embedding(FilterHandle::column_fd_tails(), SetExpr::column(1), 5, 5, 1000), Error);
}

TEST_CASE("filter json round trip") {
  const FilterHandle f = FilterHandle::sum(FilterHandle::frechet(), SetExpr::progression(1, 2),
                                           FilterHandle::statistical(), SetExpr::progression(2, 2));
  const FilterHandle back = FilterHandle::from_json(f.to_json());
  CHECK(back.to_json() == f.to_json());
  CHECK(FilterHandle::from_json("statistical").kind() == FilterHandle::Kind::Statistical);
  CHECK_THROWS_AS(FilterHandle::from_name("ultra"), Error);
}
