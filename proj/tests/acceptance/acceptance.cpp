// Runs the nine acceptance criteria and prints one PASS/FAIL line each.
// Exit status is the number of failing criteria.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "filterlab/certificate.hpp"
#include "filterlab/constructions.hpp"
#include "support/oracles.hpp"

using namespace filterlab;

namespace {

// Pinned tolerances and budgets.
constexpr double kWalshBudgetSec = 60;
constexpr double kBlockBudgetSec = 10;
constexpr double kWeakBudgetSec = 120;
constexpr double kHumpBudgetSec = 30;
constexpr double kDiagonalBudgetSec = 10;
constexpr double kColumnBudgetSec = 30;
constexpr double kCesaroBudgetSec = 60;
constexpr double kClusterBudgetSec = 30;
constexpr double kAxiomBudgetSec = 30;

constexpr unsigned kWalshMaxDim = 16;
constexpr Nat kWalshSamples = 1000;
constexpr unsigned kWalshOracleMaxDim = 10;
constexpr Nat kBlockHorizon = Nat{1} << 20;
constexpr Nat kSelectorCountBound = 21;
constexpr double kDensityCeiling = 2.1e-5;
constexpr Nat kWeakFunctionals = 200;
constexpr Nat kWeakHorizon = Nat{1} << 16;
constexpr Nat kHumpSamples = 1000;
constexpr Nat kDiagonalHorizon = 10000;
constexpr Nat kBaseSetsMet = 100;
constexpr Nat kColumnSets = 10;
constexpr Nat kColumnHorizon = 100000;
constexpr Nat kColumnMinIndices = 100;
constexpr Nat kCesaroSeqs = 20;
constexpr Nat kCesaroHorizon = 1000000;
constexpr Nat kClusterTriples = 50;
constexpr Nat kAxiomHorizon = 10000;
constexpr Nat kAxiomSamples = 60;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond && pass) {
      pass = false;
      detail << "violated: " << what << "; ";
    }
  }
};

Rational q_of(const json& s) { return parse_rational(s.get<std::string>()); }

const json* find_check(const json& cert, const std::string& id) {
  for (const auto& c : cert.at("checks"))
    if (c.at("id") == id)
      return &c;
  return nullptr;
}

Rational rand_rational(std::mt19937_64& rng) {
  return rational(static_cast<long>(rng() % 41) - 20, 1 + rng() % 12);
}

// ---------------------------------------------------------------------------

void walsh_exactness(Outcome& o) {
  // d = 2 extremes, through the oracle and through the materialized system.
  const Rational lower_at = 8 * Rational(2), upper_at = 16 * Rational(1);
  const auto s11 = oracle::walsh_abs_sum({1, 1}), s10 = oracle::walsh_abs_sum({1, 0});
  o.require(Rational(static_cast<long>(s11 * s11)) == lower_at && lower_at == 16, "lower bound attained at (1,1)");
  o.require(Rational(static_cast<long>(s10 * s10)) == upper_at && upper_at == 16, "upper bound attained at (1,0)");
  o.require(walsh_abs_sum({1, 1}) == s11 && walsh_abs_sum({1, 0}) == s10, "exact sum matches enumeration");
  const WalshSystem w2 = walsh_system(2);
  const L1Vec both = w2.vectors[0] + w2.vectors[1];
  o.require(squared_norm1(both) * 8 == 16, "squared norm of x_1 + x_2");

  std::mt19937_64 rng(20240601);
  Nat violations = 0, checked = 0;
  for (unsigned d = 1; d <= kWalshMaxDim; ++d) {
    const WalshSystem w = walsh_system(d);
    o.require(w.verify(kWalshSamples, d).is_proved(), "sampled bounds d=" + std::to_string(d));
    if (d > kWalshOracleMaxDim)
      continue;
    // rational coefficients, cleared to integers by the common denominator
    for (Nat s = 0; s < kWalshSamples; ++s) {
      std::vector<Rational> a(d);
      mpz_class den = 1;
      for (auto& x : a) {
        x = rand_rational(rng);
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
      }
      std::vector<long long> ints(d);
      Rational sumsq = 0;
      for (unsigned r = 0; r < d; ++r) {
        const Rational scaled = a[r] * den;
        ints[r] = scaled.get_num().get_si();
        sumsq += scaled * scaled;
      }
      const long long s1 = oracle::walsh_abs_sum(ints);
      const Rational sq = Rational(static_cast<long>(s1)) * static_cast<long>(s1);
      const Rational base = Rational(mpz_class(1) << (2 * d - 1)) * sumsq;
      ++checked;
      if (sq < base || sq > 2 * base)
        ++violations;
    }
  }
  o.require(violations == 0, "oracle bounds");
  o.detail << "d<=" << kWalshMaxDim << " x " << kWalshSamples << " samples, oracle re-check " << checked
           << " vectors, violations " << violations;
}

void statistical_blocks(Outcome& o) {
  const Verdict v = block_respecting_check(FilterHandle::statistical(), SetExpr::all(), Blocking::dyadic(), kBlockHorizon);
  o.require(v.is_refuted(), "verdict Refuted");
  const json* count = find_check(v.certificate, "selector-count");
  const json* dens = find_check(v.certificate, "density-bound");
  o.require(count && dens, "counting and density records present");
  if (!count || !dens)
    return;
  const Nat minima = oracle::dyadic_minima(kBlockHorizon).size();
  o.require(q_of(count->at("lhs")) == Rational(minima) && minima <= kSelectorCountBound, "counting(J, 2^20) <= 21");
  const Rational d = q_of(dens->at("lhs"));
  o.require(d <= rational(kSelectorCountBound, kBlockHorizon) && d.get_d() < kDensityCeiling, "density bound");
  o.require(v.certificate.contains("bound") && v.certificate.at("bound").at("logCoef") == 1,
            "logarithmic bound for arbitrary selectors");
  o.require(verify_certificate(v.certificate).valid, "certificate re-verifies");
  o.detail << "counting " << minima << ", density " << d.get_str();
}

void weak_certificate(Outcome& o) {
  const Rational eps = rational(1, 2);
  const Counterexample cx = build_block_counterexample(FilterHandle::statistical(), SetExpr::all(), Blocking::dyadic(), eps, kWeakHorizon);
  const Nat expected = ceil(Rational(2) / (eps * eps)).get_ui();
  o.require(cx.d_max == expected && expected == 8, "per-block bound 8");
  const Verdict v = validate_weak_certificate(cx, kWeakFunctionals, 7);
  o.require(v.is_proved(), "200 functionals within the bound");

  // Independent recount for sign functionals: f(x_n) >= 1/2 iff raw >= 0 and raw^2 >= 1/2
  // where raw = Σ f(k) c_k uses the unscaled coordinates.
  std::mt19937_64 rng(99);
  Nat worst = 0;
  for (int t = 0; t < 40; ++t) {
    std::vector<Rational> period(1 + rng() % 16);
    for (auto& p : period)
      p = rational(static_cast<long>(rng() % 17) - 8, 8);
    const TestFunctional f = TestFunctional::signs({}, period);
    std::map<Nat, Nat> per_piece;
    for (Nat n = 1; n <= cx.covered_upto; ++n) {
      Rational raw = 0;
      for (const auto& [k, c] : cx.seq.at(n).coords)
        raw += f.at(k) * c;
      if (raw >= 0 && 2 * raw * raw >= 1)
        ++per_piece[oracle::dyadic_piece(n)];
    }
    for (const auto& [k, c] : per_piece)
      worst = std::max(worst, c);
  }
  o.require(worst <= cx.d_max, "independent recount");
  o.detail << "dMax " << cx.d_max << ", covered pieces " << cx.covered_pieces << " (n <= " << cx.covered_upto
           << "), recount max " << worst;
}

void gliding_hump(Outcome& o) {
  const Rational eps = rational(1, 2);
  const auto sch = DeltaSchedule::geometric(eps, rational(1, 32), rational(1, 2));
  o.require(sch.total() == rational(1, 16), "schedule sum 1/16");
  const ExtractionResult e = extract_basic_subsequence(FilterHandle::frechet(), perturbed_basis(), SetExpr::all(), sch, 2000);
  o.require(e.verdict.is_proved(), "extraction Proved");
  o.require(verify_certificate(e.certificate).valid, "certificate re-verifies");

  std::map<Nat, std::pair<Nat, Nat>> blocks;
  Nat records = 0;
  for (const auto& c : e.certificate.at("checks")) {
    const json& ev = c.at("eval");
    const Nat n = ev.at("n");
    const std::string fn = ev.at("fn");
    Rational expect = 0;
    if (fn == "perturbation") {
      const Nat lo = ev.at("lo"), hi = ev.at("hi");
      blocks[n] = {lo, hi};
      if (1 < lo || 1 > hi)
        expect += Rational(1, n);
      if (n + 1 < lo || n + 1 > hi)
        expect += 1;
      o.require(q_of(c.at("rhs")) <= 2 * sch.at(1), "perturbation <= 2 delta");
    } else {
      const Nat m = ev.at("m");
      const bool tail = fn == "tail_mass";
      if (tail ? m <= 1 : m >= 1)
        expect += Rational(1, n);
      if (tail ? n + 1 >= m : n + 1 <= m)
        expect += 1;
    }
    ++records;
    o.require(q_of(c.at("lhs")) == expect, "recorded mass matches direct evaluation");
    o.require(relation_holds(q_of(c.at("lhs")), c.at("relation").get<std::string>(), q_of(c.at("rhs"))),
              "block inequality " + c.at("id").get<std::string>());
  }

  // c1 = 1 - eps/eps0 with eps0 the least kept norm; ||Σ a_i x_(n_i)|| = |Σ a_i / n_i| + Σ |a_i|.
  const auto& kept = e.kept;
  o.require(kept.size() >= 2, "at least two kept indices");
  Rational eps0 = -1;
  for (Nat n : kept) {
    const Rational norm = 1 + Rational(1, n);
    if (eps0 < 0 || norm < eps0)
      eps0 = norm;
  }
  const Rational c1 = 1 - eps / eps0;
  std::mt19937_64 rng(4);
  Nat violations = 0;
  for (Nat s = 0; s < kHumpSamples; ++s) {
    Rational head = 0, weights = 0, lower = 0;
    for (Nat n : kept) {
      const Rational a = rand_rational(rng);
      head += a / n;
      weights += abs_value(a);
      lower += abs_value(a) * (1 + Rational(1, n));
    }
    const Rational norm = abs_value(head) + weights;
    if (norm < c1 * lower || norm > lower)
      ++violations;
  }
  o.require(violations == 0, "lower and upper bounds on sampled coefficients");

  std::vector<L1Vec> ys;
  std::vector<CoordBlock> bl;
  for (Nat n : kept) {
    ys.push_back(perturbed_basis().at(n));
    bl.push_back({blocks[n].first, blocks[n].second});
  }
  const PerturbationReport rep = perturbation_check(ys, bl, eps, eps0, kHumpSamples, 11);
  o.require(rep.accepted && rep.bounds_hold && rep.c1 == c1, "library perturbation check agrees");
  o.detail << records << " inequalities, kept " << kept.size() << ", c1 " << c1.get_str() << ", violations " << violations;
}

void strongly_diagonal(Outcome& o) {
  const Verdict v = strongly_diagonal_witness(FilterHandle::countable_base_tails(), BaseChain::tails(2), SetExpr::all(),
                                              kDiagonalHorizon);
  o.require(v.is_proved(), "tails witness Proved");
  const auto J = v.certificate.at("witness").get<std::vector<Nat>>();
  std::map<Nat, Nat> layers; // j ∈ A_n \ A_(n+1) iff 2n < j <= 2n + 2
  for (Nat j : J)
    if (j > 2)
      ++layers[(j - 1) / 2];
  for (const auto& [n, c] : layers)
    if (n <= kDiagonalHorizon)
      o.require(c <= 1, "layer bound (tails)");
  for (Nat k = 1; k <= kBaseSetsMet; ++k)
    o.require(std::any_of(J.begin(), J.end(), [k](Nat j) { return j > k; }), "meets base set");

  const Verdict w = strongly_diagonal_witness(FilterHandle::column_fd_all(), BaseChain::column_rows(), SetExpr::column(1),
                                              kDiagonalHorizon);
  o.require(w.is_proved(), "column witness Proved");
  const auto K = w.certificate.at("witness").get<std::vector<Nat>>();
  o.require(K.size() >= kDiagonalHorizon, "column witness size");
  std::map<Nat, Nat> rows; // A_n = rows > n, so the layer of j is row(j) - 1
  const auto cells = oracle::cantor_cells(K.empty() ? 1 : K.back());
  for (Nat j : K) {
    o.require(cells[j].second == 1, "witness inside the first column");
    ++rows[cells[j].first];
  }
  for (const auto& [r, c] : rows)
    o.require(c <= 1, "layer bound (columns)");
  o.detail << "tails witness " << J.size() << " picks, column witness " << K.size() << " picks";
}

void column_filter(Outcome& o) {
  o.require(diagonal_check(FilterHandle::column_fd_tails(), BaseChain::column_tails(), SetExpr::all(), 1000).is_refuted(),
            "not diagonal");
  ConvergenceQuery q;
  q.seq = remark_sequence();
  q.mode = Mode::Coordinatewise;
  q.eps = rational(1, 2);
  q.horizon = kColumnHorizon;
  q.filter = FilterHandle::column_fd_tails();
  o.require(f_limit(q).is_proved(), "whole filter coordinatewise Proved");

  const auto cells = oracle::cantor_cells(kColumnHorizon);
  std::mt19937_64 rng(5);
  Nat fewest = ~Nat{0};
  for (Nat t = 0; t < kColumnSets; ++t) {
    const Nat step = 1 + rng() % 4, first = 1 + rng() % step;
    const Nat row_first = 1 + rng() % 3, row_step = 1 + rng() % 3;
    const SetExpr J = SetExpr::columns(SetExpr::progression(first, step), ColumnRule::subsample(row_first, row_step));
    auto in_J = [&](Nat n) {
      const auto [r, c] = cells[n];
      return c >= first && c % step == first % step && r >= row_first && (r - row_first) % row_step == 0;
    };
    q.filter = FilterHandle::trace(FilterHandle::frechet(), J);
    o.require(f_limit(q).is_refuted(), "along a standard set Refuted");
    const auto r = cluster_refuter(q);
    o.require(r.has_value(), "refuter present");
    if (!r)
      continue;
    const Nat k = r->context.at("coordinate");
    Nat stuck = 0;
    for (Nat n = 1; n <= kColumnHorizon; ++n)
      if (in_J(n) && cells[n].second == k && n != k && q.seq.at(n).coord(k) == 1)
        ++stuck;
    o.require(stuck >= kColumnMinIndices, "at least 100 stuck indices");
    o.require(counting(r->bad & J, kColumnHorizon) >= stuck, "refuter covers the stuck indices");
    fewest = std::min(fewest, stuck);
  }
  o.detail << kColumnSets << " standard sets, fewest stuck indices " << fewest;
}

void cesaro_agreement(Outcome& o) {
  const Rational tol = rational(1, 100);
  Nat agree = 0;
  for (Nat seed = 0; seed < kCesaroSeqs; ++seed) {
    const SeqGen g = mixture(seed);
    const Rational candidate = g.value(1000003); // a generic late term
    const Verdict v = stat_vs_cesaro(g, candidate, kCesaroHorizon, tol);
    o.require(v.is_proved(), "diagnostics agree for seed " + std::to_string(seed));
    agree += v.is_proved();
  }
  const Verdict sq = stat_vs_cesaro(square_indicator(), 0, kCesaroHorizon, tol);
  o.require(sq.is_proved(), "square indicator agreement");
  const CesaroReport rep = strong_cesaro(square_indicator(), 0, kCesaroHorizon);
  const auto& last = rep.checkpoints.back();
  o.require(last.n == kCesaroHorizon && last.exact, "exact checkpoint at 10^6");
  o.require(last.average == rational(static_cast<long>(oracle::count_squares(kCesaroHorizon)), kCesaroHorizon) &&
                last.average == rational(1, 1000),
            "average exactly 1/1000");
  o.detail << agree << "/" << kCesaroSeqs << " mixtures agree, squares average " << last.average.get_str();
}

void cluster_refuter_stationary(Outcome& o) {
  const std::vector<FilterHandle> filters = {FilterHandle::frechet(), FilterHandle::statistical(),
                                             FilterHandle::countable_base_tails(), FilterHandle::column_fd_tails(),
                                             FilterHandle::column_fd_all()};
  std::mt19937_64 rng(8);
  Nat triples = 0, tried = 0;
  while (triples < kClusterTriples && tried < 2000) {
    ++tried;
    ConvergenceQuery q;
    q.filter = filters[rng() % filters.size()];
    q.mode = Mode::Scalar;
    q.horizon = 4096;
    q.eps = rng() % 2 ? rational(1, 2) : rational(1, 4);
    switch (rng() % 5) {
    case 0:
      q.seq = alternating();
      q.scalar_limit = rational(static_cast<long>(rng() % 3) - 1);
      break;
    case 1:
      q.seq = mixture(rng() % 1000);
      q.scalar_limit = rational(static_cast<long>(rng() % 9) - 4, 2);
      break;
    case 2:
      q.seq = square_indicator();
      q.scalar_limit = 1;
      break;
    case 3:
      q.seq = identity_scalar();
      q.scalar_limit = 0;
      break;
    default:
      q.seq = harmonic(1, 1);
      q.scalar_limit = 2;
      break;
    }
    if (!f_limit(q).is_refuted())
      continue;
    ++triples;
    const auto r = cluster_refuter(q);
    o.require(r.has_value(), "refuter present");
    if (r)
      o.require(!is_stationary(q.filter, r->bad, q.horizon).is_refuted(), "refuter set never non-stationary");
  }
  o.require(triples == kClusterTriples, "enough refuted triples");
  o.detail << triples << " refuted triples from " << tried << " draws";
}

// Sampled sets for the axiom suite; `normal` marks sets usable as rectangle factors.
SetExpr axiom_set(std::mt19937_64& rng, bool normal) {
  const unsigned kinds = normal ? 4 : 7;
  switch (rng() % kinds) {
  case 0: {
    std::vector<Nat> e;
    for (int i = 0; i < 6; ++i)
      e.push_back(1 + rng() % 200);
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return rng() % 2 ? SetExpr::finite(e) : ~SetExpr::finite(e);
  }
  case 1: {
    const Nat step = 1 + rng() % 6;
    return SetExpr::progression(1 + rng() % step, step);
  }
  case 2:
    return SetExpr::tail(rng() % 100);
  case 3:
    return SetExpr::all();
  case 4:
    return rng() % 2 ? SetExpr::powers(2) : ~SetExpr::powers(2);
  case 5:
    return SetExpr::columns(SetExpr::tail(rng() % 4), ColumnRule::cofinite(1 + rng() % 3));
  default:
    return ~SetExpr::selector(Blocking::dyadic(), SelectRule::Min);
  }
}

void axioms_and_algebra(Outcome& o) {
  const SetExpr odds = SetExpr::progression(1, 2), evens = SetExpr::progression(2, 2);
  const FilterHandle fr = FilterHandle::frechet(), st = FilterHandle::statistical();
  const std::vector<FilterHandle> filters = {fr, st, FilterHandle::countable_base_tails(), FilterHandle::column_fd_tails(),
                                             FilterHandle::column_fd_all(), FilterHandle::trace(st, evens),
                                             FilterHandle::sum(fr, odds, st, evens), FilterHandle::product(fr, st)};
  const Nat h = kAxiomHorizon;
  std::mt19937_64 rng(13);
  Nat checks = 0, decided = 0;
  auto both_definite = [](const Verdict& a, Status b) { return !a.is_consistent() && b != Status::Consistent; };

  for (const FilterHandle& f : filters) {
    o.require(contains(f, SetExpr::all(), h).is_proved(), f.name() + " contains N");
    o.require(contains(f, SetExpr::empty(), h).is_refuted(), f.name() + " excludes the empty set");
    for (Nat s = 0; s < kAxiomSamples; ++s) {
      const SetExpr a = axiom_set(rng, false), b = axiom_set(rng, false);
      const Verdict va = contains(f, a, h), vb = contains(f, b, h);
      ++checks;
      if (va.is_proved() && vb.is_proved())
        o.require(!contains(f, a & b, h).is_refuted(), f.name() + " closed under intersection");
      if (va.is_proved())
        o.require(!contains(f, a | b, h).is_refuted(), f.name() + " closed upward");
      o.require(!(va.is_proved() && contains(f, ~a, h).is_proved()), f.name() + " proper");
      decided += !va.is_consistent();
    }
  }

  // trace: A ∈ F(I) iff A ∪ (N \ I) ∈ F
  const FilterHandle tr = FilterHandle::trace(st, evens);
  // sum: A ∈ F iff A ∪ (N \ N1) ∈ F1 and A ∪ (N \ N2) ∈ F2 (N1 ∪ N2 = N)
  const FilterHandle sm = FilterHandle::sum(fr, odds, st, evens);
  // product: R1 × R2 ∈ F1 ⊗ F2 iff R1 ∈ F1 and R2 ∈ F2 (both nonempty)
  const FilterHandle pr = FilterHandle::product(fr, st);
  Nat cross = 0;
  for (Nat s = 0; s < kAxiomSamples; ++s) {
    const SetExpr a = axiom_set(rng, false);
    const Verdict t1 = contains(tr, a, h), t2 = contains(st, a | ~evens, h);
    if (both_definite(t1, t2.status)) {
      o.require(t1.status == t2.status, "trace cross-check");
      ++cross;
    }
    const Verdict s1 = contains(sm, a, h);
    const Verdict s2 = verdict_all({contains(fr, a | ~odds, h), contains(st, a | ~evens, h)}, "", h);
    if (both_definite(s1, s2.status)) {
      o.require(s1.status == s2.status, "sum cross-check");
      ++cross;
    }
    const SetExpr r1 = axiom_set(rng, true), r2 = axiom_set(rng, true);
    if (counting(r1, h) == 0 || counting(r2, h) == 0)
      continue;
    const Verdict p1 = contains(pr, SetExpr::rect(r1, r2), h);
    const Verdict p2 = verdict_all({contains(fr, r1, h), contains(st, r2, h)}, "", h);
    if (both_definite(p1, p2.status)) {
      o.require(p1.status == p2.status, "product cross-check");
      ++cross;
    }
  }
  o.require(decided > 0 && cross > 0, "non-vacuous sampling");
  o.detail << checks << " axiom samples (" << decided << " decided), " << cross << " definitional cross-checks";
}

} // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"walsh-exactness", kWalshBudgetSec, walsh_exactness},
      {"statistical-not-block-respecting", kBlockBudgetSec, statistical_blocks},
      {"weak-convergence-certificate", kWeakBudgetSec, weak_certificate},
      {"gliding-hump-extraction", kHumpBudgetSec, gliding_hump},
      {"strongly-diagonal-witness", kDiagonalBudgetSec, strongly_diagonal},
      {"column-filter-not-diagonal", kColumnBudgetSec, column_filter},
      {"statistical-cesaro-agreement", kCesaroBudgetSec, cesaro_agreement},
      {"cluster-refuter-stationary", kClusterBudgetSec, cluster_refuter_stationary},
      {"filter-axioms-and-algebra", kAxiomBudgetSec, axioms_and_algebra},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (sec > c.budget) {
      o.pass = false;
      o.detail << "; over budget " << c.budget << "s";
    }
    failures += !o.pass;
    std::printf("[%s] %d %s (%.2fs) %s\n", o.pass ? "PASS" : "FAIL", index, c.name, sec, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures;
}
