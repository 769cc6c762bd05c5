#include "filterlab/constructions.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace filterlab {

// ---------------------------------------------------------------------------
// DeltaSchedule

DeltaSchedule DeltaSchedule::geometric(Rational eps, Rational first, Rational ratio) {
  if (eps <= 0 || first <= 0 || ratio <= 0 || ratio >= 1)
    throw Error("invalid-argument", "need eps > 0, first > 0 and 0 < ratio < 1");
  DeltaSchedule s;
  s.eps_ = std::move(eps);
  s.first_ = std::move(first);
  s.ratio_ = std::move(ratio);
  if (s.total() > s.eps_ / 8)
    throw Error("invalid-argument", "schedule sum " + to_string(s.total()) + " exceeds eps/8");
  return s;
}

DeltaSchedule DeltaSchedule::standard(Rational eps) {
  Rational first = eps / 32;
  return geometric(std::move(eps), first, rational(1, 2));
}

Rational DeltaSchedule::at(Nat k) const {
  if (k == 0) throw Error("invalid-argument", "schedule indices start at 1");
  Rational r = first_;
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), ratio_.get_num_mpz_t(), k - 1);
  mpz_pow_ui(den.get_mpz_t(), ratio_.get_den_mpz_t(), k - 1);
  r *= Rational(num, den);
  r.canonicalize();
  return r;
}

Rational DeltaSchedule::total() const { return first_ / (1 - ratio_); }

json DeltaSchedule::to_json() const {
  return {{"eps", filterlab::to_string(eps_)},
          {"first", filterlab::to_string(first_)},
          {"ratio", filterlab::to_string(ratio_)},
          {"sum", filterlab::to_string(total())}};
}

DeltaSchedule DeltaSchedule::from_json(const json& j) {
  try {
    Rational eps = parse_rational(j.at("eps").get<std::string>());
    if (!j.contains("first")) return standard(eps);
    return geometric(eps, parse_rational(j.at("first").get<std::string>()),
                     parse_rational(j.at("ratio").get<std::string>()));
  } catch (const json::exception& e) {
    throw Error("invalid-argument", std::string("bad schedule: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Perturbation of a block basis

json PerturbationReport::to_json() const {
  json j{{"accepted", accepted},
         {"eps", filterlab::to_string(eps)},
         {"eps0", filterlab::to_string(eps0)},
         {"c1", filterlab::to_string(c1)},
         {"c1StatementForm", filterlab::to_string(c1_statement_form)},
         {"c1Note", "the lower constant 1 - eps/eps0 follows from the triangle-inequality chain; "
                    "1 - eps0/eps is negative whenever eps < eps0"},
         {"samples", samples},
         {"checks", checks}};
  if (!accepted) {
    j["reason"] = reason;
    if (offending) j["offending"] = *offending;
  } else {
    j["worstRatio"] = filterlab::to_string(worst_ratio);
    j["boundsHold"] = bounds_hold;
  }
  return j;
}

namespace {

Rational block_mass(const L1Vec& v, const CoordBlock& b) {
  Rational s = 0;
  if (b.lo > b.hi) return s;
  for (auto it = v.coords.lower_bound(b.lo); it != v.coords.end() && it->first <= b.hi; ++it)
    s += abs_value(it->second);
  return s;
}

} // namespace

PerturbationReport perturbation_check(const std::vector<L1Vec>& ys,
                                      const std::vector<CoordBlock>& blocks, const Rational& eps,
                                      const Rational& eps0, Nat samples, Nat seed) {
  if (ys.size() != blocks.size()) throw Error("invalid-argument", "one block per vector is required");
  if (ys.empty()) throw Error("invalid-argument", "no vectors");
  PerturbationReport r;
  r.eps = eps;
  r.eps0 = eps0;
  r.samples = samples;
  auto reject = [&](std::string why, std::optional<Nat> at) {
    r.accepted = false;
    r.reason = std::move(why);
    r.offending = at;
    return r;
  };
  if (!(eps > 0 && eps0 > eps)) return reject("need eps0 > eps > 0", std::nullopt);
  r.c1 = 1 - eps / eps0;
  r.c1_statement_form = 1 - eps0 / eps;

  std::vector<Rational> norms;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (ys[i].scale_sqrt_half && !ys[i].empty())
      return reject("scaled vectors are not supported", i + 1);
    Rational nrm = norm1(ys[i]);
    if (nrm < eps0) return reject("norm below eps0", i + 1);
    Rational pert = nrm - block_mass(ys[i], blocks[i]);
    if (!(pert < eps / 2)) return reject("perturbation not strictly below eps/2", i + 1);
    if (i < 64) {
      r.checks.push_back(inequality("norm:" + std::to_string(i + 1), nrm, ">=", eps0));
      r.checks.push_back(inequality("perturbation:" + std::to_string(i + 1), pert, "<", eps / 2));
    }
    norms.push_back(std::move(nrm));
  }
  std::vector<std::size_t> order(blocks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return blocks[a].lo < blocks[b].lo; });
  Nat reach = 0;
  for (auto i : order) {
    if (blocks[i].lo > blocks[i].hi) continue;
    if (blocks[i].lo <= reach) return reject("blocks overlap", i + 1);
    reach = blocks[i].hi;
  }

  std::mt19937_64 rng(seed);
  bool first = true;
  r.bounds_hold = true;
  for (Nat s = 0; s < samples; ++s) {
    std::map<Nat, Rational> sum;
    Rational weighted = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (rng() % 10 < 3) continue;
      Rational a(static_cast<long>(rng() % 21) - 10, static_cast<unsigned long>(1 + rng() % 4));
      a.canonicalize();
      if (a == 0) continue;
      weighted += abs_value(a) * norms[i];
      for (const auto& [k, x] : ys[i].coords) sum[k] += a * x;
    }
    if (weighted == 0) continue;
    Rational lhs = 0;
    for (const auto& [k, x] : sum) lhs += abs_value(x);
    bool ok = r.c1 * weighted <= lhs && lhs <= weighted;
    r.bounds_hold = r.bounds_hold && ok;
    Rational ratio = lhs / weighted;
    if (first || ratio < r.worst_ratio) r.worst_ratio = ratio;
    first = false;
    if (s < 8 || !ok) {
      r.checks.push_back(inequality("lower:" + std::to_string(s), lhs, ">=", r.c1 * weighted));
      r.checks.push_back(inequality("upper:" + std::to_string(s), lhs, "<=", weighted));
    }
  }
  if (first) r.worst_ratio = 1;
  r.accepted = true;
  return r;
}

// ---------------------------------------------------------------------------
// Gliding-hump extraction

namespace {

// Smallest m with Σ_{k >= m} |v_k| < delta.
Nat tail_cut(const L1Vec& v, const Rational& delta) {
  Rational acc = 0;
  for (auto it = v.coords.rbegin(); it != v.coords.rend(); ++it) {
    acc += abs_value(it->second);
    if (acc >= delta) return it->first + 1;
  }
  return 1;
}

json mass_eval(const char* fn, const SeqGen& seq, Nat n, Nat m) {
  return {{"fn", fn}, {"seq", seq.to_json()}, {"n", n}, {"m", m}};
}

const L1Vec& cached(std::map<Nat, L1Vec>& cache, const SeqGen& seq, Nat n) {
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, seq.at(n)).first;
    if (it->second.scale_sqrt_half && !it->second.empty())
      throw Error("invalid-argument", "extraction works with unscaled vectors");
  }
  return it->second;
}

constexpr std::size_t kMaxBlocks = 512;

} // namespace

ExtractionResult extract_basic_subsequence(const FilterHandle& f, const SeqGen& seq,
                                           const SetExpr& I, const DeltaSchedule& schedule,
                                           Nat horizon) {
  if (!seq.is_vector()) throw Error("invalid-argument", "extraction needs a vector sequence");
  const Rational& eps = schedule.eps();
  const Nat h = horizon;

  ConvergenceQuery q;
  q.filter = FilterHandle::trace(FilterHandle::frechet(), I);
  q.seq = seq;
  q.mode = Mode::Coordinatewise;
  q.vector_limit = L1Vec{};
  q.eps = schedule.at(1);
  q.horizon = h;
  Verdict null = f_limit(q);
  if (null.is_refuted()) {
    std::string which = "a coordinate";
    const json& failing = null.certificate.value("components", json::array());
    for (const auto& c : failing)
      if (c.value("status", "") == "Refuted") {
        which = "coordinate " + c["certificate"]["component"].value("coordinate", json(0)).dump();
        break;
      }
    throw Error("precondition", "the sequence is not coordinate-wise null along I: " + which +
                                    " stays at least " + to_string(q.eps) +
                                    " on infinitely many indices of I");
  }

  std::vector<Nat> elems = enumerate(I, h);
  if (elems.empty()) throw Error("precondition", "I has no element up to the horizon");
  std::map<Nat, L1Vec> cache;
  for (Nat n : elems)
    if (!(squared_norm1(cached(cache, seq, n)) > eps * eps))
      throw Error("precondition", "term " + std::to_string(n) + " on I has norm at most eps");

  // Tail cuts along I, forced to increase.
  std::map<Nat, Nat> cut;
  Nat prev = 0;
  for (Nat n : elems) {
    Nat m = std::max(tail_cut(cache.at(n), schedule.at(n)), prev + 1);
    cut[n] = m;
    prev = m;
  }

  // Block boundaries n_1 < n_2 < ... (elements of I).
  std::vector<Nat> bounds{elems.front()};
  while (bounds.size() < kMaxBlocks) {
    const std::size_t i = bounds.size(); // 1-based index of the last boundary
    const Nat ni = bounds.back();
    const Nat level = cut.at(ni);
    const Rational delta = schedule.at(i);
    Nat last_bad = ni;
    for (auto it = elems.rbegin(); it != elems.rend() && *it > ni; ++it)
      if (head_mass(cache.at(*it), level) >= delta) {
        last_bad = *it;
        break;
      }
    auto next = std::upper_bound(elems.begin(), elems.end(), last_bad);
    if (next == elems.end()) break;
    bounds.push_back(*next);
  }

  ExtractionResult res;
  res.boundaries = bounds;
  for (Nat n : elems)
    if (n <= bounds.back()) res.cuts.push_back(cut.at(n));

  json cuts = json::array();
  for (Nat n : bounds) cuts.push_back({n, cut.at(n)});
  json cert{{"kind", "extraction"},
            {"scope", "horizon"},
            {"I", I.to_json()},
            {"seq", seq.to_json()},
            {"schedule", schedule.to_json()},
            {"boundaries", bounds},
            {"cuts", cuts},
            {"coordinatewiseNull", null.status == Status::Proved ? "proved" : "consistent"}};

  const Blocking intervals = Blocking::explicit_boundaries(std::vector<Nat>(bounds));
  const bool everything = I.facts().normal && I.facts().normal->is_all();
  const Blocking blocks = everything ? intervals : Blocking::restricted(I, intervals);
  Verdict br = block_respecting_check(f, I, blocks, h);
  cert["blockRespecting"] = to_json(br);
  if (!br.is_proved() || !br.certificate.contains("selector")) {
    cert["partial"] = "no stationary selector is available for these blocks";
    res.certificate = cert;
    res.verdict = Verdict::consistent(cert, h);
    return res;
  }
  const SetExpr J = SetExpr::from_json(br.certificate.at("selector"));
  for (Nat j : enumerate(J, bounds.back())) res.selected.push_back(j);

  SplitResult split = split_stationary(f, J, h);
  // Prefer the even half, as long as it is not worse than the odd half.
  const bool even = split.second_stationary.is_proved() || !split.first_stationary.is_proved();
  const Verdict& half = even ? split.second_stationary : split.first_stationary;
  cert["keptHalf"] = even ? "even" : "odd";
  cert["halfStationarity"] = to_json(half);

  auto block_of = [&](Nat j) {
    return static_cast<Nat>(std::lower_bound(bounds.begin(), bounds.end(), j) - bounds.begin()) + 1;
  };
  auto cut_at = [&](Nat t) -> Nat { return t == 0 ? 0 : cut.at(bounds[t - 1]); };

  json checks = json::array();
  bool all_ok = true;
  std::vector<L1Vec> ys;
  std::vector<CoordBlock> zblocks;
  for (std::size_t r = 0; r < res.selected.size(); ++r) {
    if ((r % 2 == 1) != even) continue;
    const Nat j = res.selected[r];
    const Nat t = block_of(j);
    const L1Vec& y = cache.at(j);
    const Nat lo = t >= 2 ? cut_at(t - 2) : 0;
    const Nat hi = cut_at(t);
    const Rational head = head_mass(y, lo);
    const Rational tail = tail_mass(y, hi + 1);
    const Rational own_tail = tail_mass(y, cut.at(j));
    const Rational bound = 2 * schedule.at(t >= 3 ? t - 2 : 1);
    const std::string id = std::to_string(j);
    checks.push_back(inequality("tail-cut:" + id, own_tail, "<", schedule.at(j),
                                mass_eval("tail_mass", seq, j, cut.at(j))));
    if (t >= 3)
      checks.push_back(inequality("head-cut:" + id, head, "<", schedule.at(t - 2),
                                  mass_eval("head_mass", seq, j, lo)));
    checks.push_back(inequality("perturbation:" + id, head + tail, "<=", bound,
                                {{"fn", "perturbation"}, {"seq", seq.to_json()}, {"n", j},
                                 {"lo", lo + 1}, {"hi", hi}}));
    all_ok = all_ok && own_tail < schedule.at(j) && head + tail <= bound &&
             (t < 3 || head < schedule.at(t - 2));
    ys.push_back(y);
    zblocks.push_back({lo + 1, hi});
  }
  res.kept = {};
  for (std::size_t r = 0; r < res.selected.size(); ++r)
    if ((r % 2 == 1) == even) res.kept.push_back(res.selected[r]);
  cert["selected"] = res.selected;
  cert["kept"] = res.kept;
  cert["checks"] = checks;

  if (ys.empty()) {
    cert["partial"] = "the horizon leaves no selected vector in the kept half";
    res.certificate = cert;
    res.verdict = Verdict::consistent(cert, h);
    return res;
  }
  Rational eps0 = norm1(ys.front());
  for (const auto& y : ys) eps0 = std::min(eps0, norm1(y));
  PerturbationReport pr = perturbation_check(ys, zblocks, eps, eps0, 200, 1);
  cert["perturbation"] = pr.to_json();
  cert["weightLowerBound"] = to_string(eps0);
  res.perturbation = pr;
  res.certificate = cert;
  const bool good = all_ok && pr.accepted && pr.bounds_hold;
  if (!good) res.verdict = Verdict::refuted(cert, h);
  else if (half.is_proved()) res.verdict = Verdict::proved(cert, h);
  else res.verdict = Verdict::consistent(cert, h);
  return res;
}

// ---------------------------------------------------------------------------
// Triangular extraction over columns

ClaimResult extract_fd_claim(const SeqGen& z, const DeltaSchedule& schedule, Nat picks,
                             Nat horizon) {
  if (!z.is_vector()) throw Error("invalid-argument", "extraction needs a vector sequence");
  if (picks == 0) throw Error("invalid-argument", "no picks requested");
  const Rational& eps = schedule.eps();
  std::map<Nat, L1Vec> cache;
  std::map<Nat, Nat> next_row; // per column, the first row not yet used
  ClaimResult res;
  json checks = json::array();
  std::vector<Nat> s_levels{0}; // s(0) = 0, s(i) = max_{k<=i} m(n_k)

  // Column order 1 | 1 2 | 1 2 3 | ...
  Nat round = 1, pos = 1;
  auto next_column = [&]() {
    Nat c = pos;
    if (++pos > round) {
      ++round;
      pos = 1;
    }
    return c;
  };
  next_column(); // n_1 is the only pick of the first round
  round = 2, pos = 1;
  Nat column = 1;
  for (Nat i = 0; i < picks; ++i) {
    if (i > 0) column = next_column();
    // Pick i+1 needs head mass below eps / 2^(i+3) up to s(i).
    const Nat level = s_levels.back();
    const Rational bound = eps / Rational(mpz_class(1) << static_cast<unsigned>(i + 3));
    std::optional<Nat> found;
    for (Nat r = next_row[column] + 1;; ++r) {
      const Nat n = pair_index(r, column);
      if (n > horizon) break;
      const L1Vec& v = cached(cache, z, n);
      if (!(squared_norm1(v) > eps * eps))
        throw Error("precondition", "term " + std::to_string(n) + " has norm at most eps");
      if (i == 0 || head_mass(v, level) < bound) {
        found = n;
        next_row[column] = r;
        break;
      }
    }
    if (!found)
      throw Error("precondition",
                  "column " + std::to_string(column) +
                      " has no term with small head mass up to the horizon; the sequence is not "
                      "coordinate-wise null within that column");
    const Nat n = *found;
    const L1Vec& v = cache.at(n);
    if (i > 0)
      checks.push_back(inequality("head:" + std::to_string(i + 1), head_mass(v, level), "<", bound,
                                  mass_eval("head_mass", z, n, level)));
    const Nat m = tail_cut(v, schedule.at(n));
    s_levels.push_back(std::max(level, m));
    res.picks.push_back(n);
    res.columns.push_back(column);
  }

  std::vector<L1Vec> ys;
  std::vector<CoordBlock> blocks;
  for (std::size_t i = 0; i < res.picks.size(); ++i) {
    ys.push_back(cache.at(res.picks[i]));
    blocks.push_back({s_levels[i] + 1, s_levels[i + 1]});
  }
  Rational eps0 = norm1(ys.front());
  for (const auto& y : ys) eps0 = std::min(eps0, norm1(y));
  res.perturbation = perturbation_check(ys, blocks, eps / 2, eps0, 200, 1);
  res.certificate = {{"kind", "column-extraction"},
                     {"scope", "horizon"},
                     {"seq", z.to_json()},
                     {"schedule", schedule.to_json()},
                     {"picks", res.picks},
                     {"columns", res.columns},
                     {"levels", s_levels},
                     {"standardSet", SetExpr::finite(res.picks).to_json()},
                     {"pattern", "columns visited in the order 1 | 1 2 | 1 2 3 | ..."},
                     {"checks", checks},
                     {"perturbation", res.perturbation.to_json()}};
  return res;
}

// ---------------------------------------------------------------------------
// Oscillation functional

json OscillationReport::to_json() const {
  return {{"functional", functional.to_json()},
          {"columns", columns},
          {"infNorm", filterlab::to_string(inf_norm)},
          {"refutes", refutes}};
}

OscillationReport oscillation_functional(const SeqGen& z, const SetExpr& positive, Nat horizon) {
  if (!z.is_vector()) throw Error("invalid-argument", "oscillation needs a vector sequence");
  std::map<Nat, Nat> owner;
  std::vector<L1Vec> terms(horizon + 1);
  std::vector<Rational> norms(horizon + 1);
  Nat max_coord = 0;
  OscillationReport rep;
  bool first = true;
  for (Nat n = 1; n <= horizon; ++n) {
    terms[n] = z.at(n);
    if (terms[n].scale_sqrt_half && !terms[n].empty())
      throw Error("invalid-argument", "oscillation works with unscaled vectors");
    for (const auto& [k, x] : terms[n].coords) {
      auto [it, fresh] = owner.emplace(k, n);
      if (!fresh)
        throw Error("invalid-argument", "supports of terms " + std::to_string(it->second) + " and " +
                                            std::to_string(n) + " overlap at coordinate " +
                                            std::to_string(k));
      max_coord = std::max(max_coord, k);
    }
    norms[n] = norm1(terms[n]);
    if (first || norms[n] < rep.inf_norm) rep.inf_norm = norms[n];
    first = false;
  }
  std::vector<Rational> values(max_coord, Rational(0));
  for (Nat n = 1; n <= horizon; ++n) {
    const int a = positive.contains(n) ? 1 : -1;
    for (const auto& [k, x] : terms[n].coords) values[k - 1] = x > 0 ? a : -a;
  }
  rep.functional = TestFunctional::signs(values, {Rational(0)});

  std::map<Nat, std::pair<Rational, Rational>> range; // column -> (max, min)
  for (Nat n = 1; n <= horizon; ++n) {
    Rational v = apply(rep.functional, terms[n]);
    const Nat c = unpair(n).column;
    auto it = range.find(c);
    if (it == range.end())
      range.emplace(c, std::make_pair(v, v));
    else {
      if (v > it->second.first) it->second.first = v;
      if (v < it->second.second) it->second.second = v;
    }
  }
  for (const auto& [c, mm] : range) {
    Rational osc = mm.first - mm.second;
    if (osc >= 2 * rep.inf_norm && rep.inf_norm > 0) rep.refutes = true;
    if (rep.columns.size() < 32)
      rep.columns.push_back({{"column", c},
                             {"max", to_string(mm.first)},
                             {"min", to_string(mm.second)},
                             {"oscillation", to_string(osc)}});
  }
  return rep;
}

} // namespace filterlab
