#include <algorithm>
#include <functional>

#include "cli.hpp"

namespace filterlab::cli {

namespace {

struct Step {
  std::string id;
  Status expected;
  std::function<Verdict()> run;
};

struct Demo {
  std::string name;
  std::string description;
  std::vector<Step> steps;
};

Verdict claim_verdict(const ClaimResult& c) {
  const bool ok = c.perturbation.accepted && c.perturbation.bounds_hold;
  return ok ? Verdict::proved(c.certificate) : Verdict::refuted(c.certificate);
}

Verdict oscillation_verdict(const OscillationReport& r, Nat horizon) {
  return r.refutes ? Verdict::proved(r.to_json(), horizon) : Verdict::consistent(r.to_json(), horizon);
}

ConvergenceQuery coordinatewise(FilterHandle f, SeqGen seq, Nat horizon) {
  ConvergenceQuery q;
  q.filter = std::move(f);
  q.seq = std::move(seq);
  q.mode = Mode::Coordinatewise;
  q.eps = rational(1, 2);
  q.horizon = horizon;
  return q;
}

// Standard set used along the column demos: every other row of the even columns.
SetExpr standard_sample() { return SetExpr::columns(SetExpr::progression(2, 2), ColumnRule::subsample(1, 2)); }

Demo schur_iff_block(Nat horizon, Nat seed, Nat samples) {
  const Nat h = std::min<Nat>(horizon, Nat{1} << 20);
  const Rational eps = rational(1, 2);
  return {"theorem2",
          "Frechet is block-respecting and extracts a weighted basis; the statistical filter is not, "
          "and its Walsh block sequence is weakly null but not norm null",
          {{"frechet-block-respecting", Status::Proved,
            [=] { return block_respecting_check(FilterHandle::frechet(), SetExpr::all(), Blocking::dyadic(), h); }},
           {"frechet-extraction", Status::Proved,
            [=] {
              auto sch = DeltaSchedule::geometric(eps, rational(1, 32), rational(1, 2));
              return extract_basic_subsequence(FilterHandle::frechet(), perturbed_basis(), SetExpr::all(), sch,
                                               std::min<Nat>(h, 2000))
                  .verdict;
            }},
           {"statistical-block-respecting", Status::Refuted,
            [=] {
              return block_respecting_check(FilterHandle::statistical(), SetExpr::all(), Blocking::dyadic(), h);
            }},
           {"statistical-counterexample-weak", Status::Proved,
            [=] {
              auto cx = build_block_counterexample(FilterHandle::statistical(), SetExpr::all(), Blocking::dyadic(),
                                                   eps, h);
              return validate_weak_certificate(cx, std::min<Nat>(samples, 200), seed);
            }},
           {"statistical-counterexample-norm", Status::Refuted,
            [=] {
              ConvergenceQuery q;
              q.filter = FilterHandle::statistical();
              q.seq = walsh_block_sequence(SetExpr::all(), Blocking::dyadic());
              q.mode = Mode::Norm;
              q.eps = eps;
              q.horizon = std::min<Nat>(h, 32);
              return f_limit(q);
            }},
           {"walsh-d2", Status::Proved, [=] { return walsh_system(2).verify(samples, seed); }}}};
}

Demo column_claim(Nat horizon, Nat seed, Nat samples) {
  (void)seed;
  (void)samples;
  const Nat h = std::min<Nat>(horizon, 100000);
  return {"theorem4",
          "The column filter is not diagonal, yet a triangular pick over its columns gives a block "
          "basis, and a sign functional splits every column",
          {{"columnFD-diagonal", Status::Refuted,
            [=] {
              return diagonal_check(FilterHandle::column_fd_tails(), BaseChain::column_tails(), SetExpr::all(),
                                    std::min<Nat>(h, 1000));
            }},
           {"column-claim-extraction", Status::Proved,
            [=] {
              auto sch = DeltaSchedule::geometric(rational(1, 2), rational(1, 32), rational(1, 2));
              return claim_verdict(extract_fd_claim(perturbed_basis(), sch, 10, h));
            }},
           {"sign-functional-oscillation", Status::Proved,
            [=] {
              const SetExpr positive = SetExpr::columns(SetExpr::all(), ColumnRule::periodic({true, false}));
              const Nat n = std::min<Nat>(h, 10000);
              return oscillation_verdict(oscillation_functional(canonical_basis(), positive, n), n);
            }}}};
}

Demo statistical_blocks(Nat horizon, Nat, Nat) {
  const Nat h = std::min<Nat>(horizon, Nat{1} << 20);
  return {"theorem13",
          "The statistical filter is not block-respecting for the dyadic blocking; the min-selector "
          "has counting at most log2(n) + 1",
          {{"statistical-block-respecting", Status::Refuted, [=] {
              return block_respecting_check(FilterHandle::statistical(), SetExpr::all(), Blocking::dyadic(), h);
            }}}};
}

Demo sum_filter(Nat horizon, Nat, Nat) {
  const Nat h = horizon;
  const SetExpr n1 = SetExpr::progression(1, 2);
  const SetExpr n2 = SetExpr::progression(2, 2);
  const FilterHandle f = FilterHandle::sum(FilterHandle::frechet(), n1, FilterHandle::statistical(), n2);
  return {"theorem15",
          "F = Frechet on the odds plus statistical on the evens: F fails block-respecting through the "
          "even part while its trace on the odds passes",
          {{"sum-block-respecting", Status::Refuted,
            [=] { return block_respecting_check(f, n2, Blocking::dyadic(), h); }},
           {"trace-odds-block-respecting", Status::Proved, [=] {
              return block_respecting_check(FilterHandle::trace(f, n1), n1, Blocking::dyadic(), h);
            }}}};
}

Demo column_sequence(Nat horizon, Nat, Nat) {
  const Nat h = std::min<Nat>(horizon, 100000);
  return {"remark5",
          "x_n = e_n + e_column(n) converges coordinate-wise to 0 for the column filter but not along a "
          "standard set, where one column coordinate stays at 1",
          {{"columnFD-coordinatewise", Status::Proved,
            [=] { return f_limit(coordinatewise(FilterHandle::column_fd_tails(), remark_sequence(), h)); }},
           {"along-standard-set-coordinatewise", Status::Refuted, [=] {
              const FilterHandle along = FilterHandle::trace(FilterHandle::frechet(), standard_sample());
              return f_limit(coordinatewise(along, remark_sequence(), h));
            }}}};
}

} // namespace

const std::vector<std::string>& demo_names() {
  static const std::vector<std::string> names = {"remark5", "theorem13", "theorem15", "theorem2", "theorem4"};
  return names;
}

void run_demo(const std::string& name, Report& report, Nat horizon, Nat seed, Nat samples) {
  Demo demo;
  if (name == "theorem2")
    demo = schur_iff_block(horizon, seed, samples);
  else if (name == "theorem4")
    demo = column_claim(horizon, seed, samples);
  else if (name == "theorem13")
    demo = statistical_blocks(horizon, seed, samples);
  else if (name == "theorem15")
    demo = sum_filter(horizon, seed, samples);
  else if (name == "remark5")
    demo = column_sequence(horizon, seed, samples);
  else
    throw UsageError("unknown demo '" + name + "'");

  json expectations = json::array();
  bool mismatch = false, open = false;
  for (const Step& s : demo.steps) {
    const Verdict v = s.run();
    report.add(s.id, v);
    const bool met = v.status == s.expected;
    mismatch = mismatch || (!met && !v.is_consistent());
    open = open || (!met && v.is_consistent());
    expectations.push_back({{"id", s.id}, {"expected", to_string(s.expected)}, {"actual", to_string(v.status)}, {"met", met}});
  }
  std::sort(expectations.begin(), expectations.end(),
            [](const json& a, const json& b) { return a.at("id") < b.at("id"); });
  report.note("demo", {{"name", demo.name}, {"description", demo.description}, {"expectations", expectations}});
  report.set_status(mismatch ? Status::Refuted : open ? Status::Consistent : Status::Proved);
}

} // namespace filterlab::cli
