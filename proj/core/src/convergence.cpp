#include "filterlab/convergence.hpp"

#include <algorithm>

namespace filterlab {

std::string_view to_string(Mode mode) {
  switch (mode) {
  case Mode::Scalar:
    return "scalar";
  case Mode::Coordinatewise:
    return "coordinatewise";
  case Mode::Weak:
    return "weak";
  case Mode::Norm:
    return "norm";
  }
  return "norm";
}

Mode mode_from_string(std::string_view text) {
  if (text == "scalar") return Mode::Scalar;
  if (text == "coordinatewise") return Mode::Coordinatewise;
  if (text == "weak") return Mode::Weak;
  if (text == "norm") return Mode::Norm;
  throw Error("invalid-argument", "unknown mode " + std::string(text));
}

void ConvergenceQuery::validate() const {
  if (eps <= 0) throw Error("invalid-argument", "eps must be positive");
  if (horizon == 0) throw Error("invalid-argument", "horizon must be positive");
  if (mode == Mode::Weak && family.empty())
    throw Error("invalid-argument", "weak mode needs a non-empty functional family");
  if ((mode == Mode::Scalar) == seq.is_vector())
    throw Error("invalid-argument", "mode does not match the sequence type");
  if (mode == Mode::Coordinatewise && coordinates == 0)
    throw Error("invalid-argument", "no coordinates to check");
}

json ConvergenceQuery::to_json() const {
  json j{{"filter", filter.to_json()}, {"seq", seq.to_json()}, {"mode", to_string(mode)},
         {"eps", filterlab::to_string(eps)}, {"horizon", horizon}};
  if (mode == Mode::Scalar)
    j["limit"] = filterlab::to_string(scalar_limit);
  else
    j["limit"] = vector_limit.to_json();
  if (mode == Mode::Weak) {
    j["family"] = json::array();
    for (const auto& f : family) j["family"].push_back(f.to_json());
  }
  if (mode == Mode::Coordinatewise) j["coordinates"] = coordinates;
  return j;
}

ConvergenceQuery ConvergenceQuery::from_json(const json& j) {
  ConvergenceQuery q;
  try {
    q.filter = FilterHandle::from_json(j.at("filter"));
    q.seq = SeqGen::from_json(j.at("seq"));
    q.mode = mode_from_string(j.value("mode", std::string(q.seq.is_vector() ? "norm" : "scalar")));
    q.eps = parse_rational(j.at("eps").get<std::string>());
    q.horizon = j.value("horizon", q.horizon);
    q.coordinates = j.value("coordinates", q.coordinates);
    if (j.contains("limit")) {
      const json& l = j.at("limit");
      if (l.is_string())
        q.scalar_limit = parse_rational(l.get<std::string>());
      else
        q.vector_limit = L1Vec::from_json(l);
    }
    if (j.contains("family"))
      for (const auto& f : j.at("family")) q.family.push_back(TestFunctional::from_json(f));
  } catch (const json::exception& e) {
    throw Error("invalid-argument", std::string("bad query: ") + e.what());
  }
  q.validate();
  return q;
}

json ClusterRefutation::to_json() const {
  return {{"set", bad.to_json()}, {"eps", filterlab::to_string(eps)},
          {"stationary", filterlab::to_json(stationary)}, {"source", source},
          {"context", context}};
}

namespace {

// One eps-condition: a coordinate, a functional, the norm or the scalar.
struct Component {
  json label;
  std::optional<SetExpr> exact; // bad set declared by the sequence
  std::vector<bool> bad;        // bad[n] for n <= horizon, when enumerated
  std::string source;
  std::optional<SetExpr> bad_set; // exact or pattern set after analysis
  Nat unevaluated_from = 0;       // terms from here on were not evaluated
  Verdict verdict;
};

// Smallest period p <= 64 that the second half of the window follows,
// then the shortest prefix.
std::optional<EventuallyPeriodic> detect_pattern(const std::vector<bool>& bad, Nat h) {
  if (h < 256) return std::nullopt;
  for (Nat p = 1; p <= 64; ++p) {
    bool ok = true;
    for (Nat i = h / 2 + 1; i <= h && ok; ++i) ok = bad[i] == bad[i - p];
    if (!ok) continue;
    Nat m = h / 2; // periodic from m+1 on; extend the periodic part backwards
    while (m > 0 && m + p <= h && bad[m] == bad[m + p]) --m;
    std::vector<bool> prefix(bad.begin() + 1, bad.begin() + 1 + static_cast<long>(m));
    std::vector<bool> period(bad.begin() + 1 + static_cast<long>(m),
                             bad.begin() + 1 + static_cast<long>(m + p));
    return EventuallyPeriodic(std::move(prefix), std::move(period)).canonical();
  }
  return std::nullopt;
}

Verdict decide_component(const FilterHandle& f, Component& c, Nat h) {
  json cert{{"kind", "f-limit-component"}, {"component", c.label}};
  // Unevaluated terms count as unknown: only the bracket applies.
  const Nat known = c.unevaluated_from ? c.unevaluated_from - 1 : h;
  if (!c.exact && !c.unevaluated_from) {
    if (auto ep = detect_pattern(c.bad, h)) {
      c.bad_set = SetExpr::periodic(*ep);
      c.source = "pattern";
      cert["scope"] = "horizon";
      cert["patternDetectedAtHorizon"] = true;
    }
  } else {
    c.bad_set = c.exact;
    c.source = "exact";
  }
  cert["source"] = c.source;
  if (c.bad_set) {
    cert["badSet"] = c.bad_set->to_json();
    Verdict v = contains(f, ~*c.bad_set, h);
    cert["membership"] = to_json(v);
    return {v.status, cert, h};
  }
  // Good indices up to h lie in the good set, which lies in them plus (h, ∞).
  std::vector<Nat> good, bad;
  for (Nat n = 1; n <= known; ++n) (c.bad[n] ? bad : good).push_back(n);
  cert["badCountUpToHorizon"] = bad.size();
  cert["evaluatedUpTo"] = known;
  Verdict lower = contains(f, SetExpr::finite(good), h);
  if (lower.is_proved()) {
    cert["membership"] = to_json(lower);
    cert["bracket"] = "lower";
    return Verdict::proved(cert, h);
  }
  c.bad_set = SetExpr::finite(bad);
  Verdict upper = contains(f, ~*c.bad_set, h);
  cert["membership"] = to_json(upper);
  cert["bracket"] = "upper";
  if (upper.is_refuted()) return Verdict::refuted(cert, h);
  return Verdict::consistent(cert, h);
}

bool far_squared(const Rational& value, bool scaled, const Rational& eps) {
  return signed_square(abs_value(value), scaled) >= eps * eps;
}

std::optional<SetExpr> exact_norm_bad(const SeqGen::Meta& m, const L1Vec& limit, const Rational& eps) {
  if (m.norm_bad)
    if (auto s = m.norm_bad(limit, eps)) return s;
  if (limit.empty() && m.support && m.squared_norm_on_support)
    return *m.squared_norm_on_support >= eps * eps ? *m.support : SetExpr::empty();
  return std::nullopt;
}

std::vector<Component> analyse(const ConvergenceQuery& q) {
  q.validate();
  const SeqGen::Meta& meta = q.seq.meta();
  const Nat h = q.horizon;
  std::vector<Component> comps;
  switch (q.mode) {
  case Mode::Scalar: {
    Component c;
    c.label = {{"mode", "scalar"}};
    if (meta.scalar_bad) c.exact = meta.scalar_bad(q.scalar_limit, q.eps);
    comps.push_back(std::move(c));
    break;
  }
  case Mode::Norm: {
    Component c;
    c.label = {{"mode", "norm"}};
    c.exact = exact_norm_bad(meta, q.vector_limit, q.eps);
    comps.push_back(std::move(c));
    break;
  }
  case Mode::Coordinatewise:
    for (Nat k = 1; k <= q.coordinates; ++k) {
      Component c;
      c.label = {{"mode", "coordinatewise"}, {"coordinate", k}};
      if (meta.coordinate_bad && !q.vector_limit.scale_sqrt_half)
        c.exact = meta.coordinate_bad(k, q.vector_limit.coord(k), q.eps);
      comps.push_back(std::move(c));
    }
    break;
  case Mode::Weak:
    for (std::size_t i = 0; i < q.family.size(); ++i) {
      Component c;
      c.label = {{"mode", "weak"}, {"functional", q.family[i].to_json()}, {"index", i}};
      comps.push_back(std::move(c));
    }
    break;
  }

  bool need = std::any_of(comps.begin(), comps.end(), [](const Component& c) { return !c.exact; });
  if (!need) return comps;
  for (auto& c : comps)
    if (!c.exact) c.bad.assign(h + 1, false);
  const Nat last = meta.evaluable_upto ? std::min(h, *meta.evaluable_upto) : h;
  for (auto& c : comps)
    if (!c.exact && last < h) c.unevaluated_from = last + 1;
  for (Nat n = 1; n <= last; ++n) {
    if (q.mode == Mode::Scalar) {
      comps[0].bad[n] = abs_value(q.seq.value(n) - q.scalar_limit) >= q.eps;
      continue;
    }
    L1Vec d = q.seq.at(n) - q.vector_limit;
    bool scaled = d.scale_sqrt_half;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      Component& c = comps[i];
      if (c.exact) continue;
      switch (q.mode) {
      case Mode::Norm:
        c.bad[n] = squared_norm1(d) >= q.eps * q.eps;
        break;
      case Mode::Coordinatewise:
        c.bad[n] = far_squared(d.coord(i + 1), scaled, q.eps);
        break;
      case Mode::Weak:
        c.bad[n] = far_squared(apply_unscaled(q.family[i], d), scaled, q.eps);
        break;
      case Mode::Scalar:
        break;
      }
    }
  }
  return comps;
}

Verdict combine(const ConvergenceQuery& q, std::vector<Component>& comps) {
  std::vector<Verdict> parts;
  json list = json::array();
  for (auto& c : comps) {
    c.verdict = decide_component(q.filter, c, q.horizon);
    list.push_back(to_json(c.verdict));
    parts.push_back(c.verdict);
  }
  Verdict all = verdict_all(parts, "every eps-condition holds on a member of the filter", q.horizon);
  json cert{{"kind", "f-limit"}, {"query", q.to_json()}, {"components", list}};
  if (q.mode == Mode::Coordinatewise) cert["coordinateScope"] = q.coordinates;
  return {all.status, cert, q.horizon};
}

} // namespace

Verdict f_limit(const ConvergenceQuery& q) {
  auto comps = analyse(q);
  return combine(q, comps);
}

std::optional<ClusterRefutation> cluster_refuter(const ConvergenceQuery& q) {
  auto comps = analyse(q);
  Verdict v = combine(q, comps);
  if (!v.is_refuted()) return std::nullopt;
  for (const auto& c : comps) {
    if (!c.verdict.is_refuted() || !c.bad_set) continue;
    ClusterRefutation r{*c.bad_set, q.eps, is_stationary(q.filter, *c.bad_set, q.horizon),
                        c.source, c.label};
    return r;
  }
  return std::nullopt;
}

Verdict almost_schur_check(const FilterHandle& f, const SeqGen& seq, const Rational& tolerance,
                           Nat window, Nat horizon) {
  if (!seq.is_vector()) throw Error("invalid-argument", "almost-Schur check needs a vector sequence");
  if (tolerance <= 0 || window == 0 || window > horizon)
    throw Error("invalid-argument", "need tolerance > 0 and 0 < window <= horizon");
  json cert{{"kind", "almost-schur"}, {"tolerance", to_string(tolerance)}, {"seq", seq.to_json()}};
  if (auto bad = exact_norm_bad(seq.meta(), L1Vec{}, tolerance)) {
    SetExpr small = ~*bad;
    Verdict st = is_stationary(f, small, horizon);
    cert["smallNormSet"] = small.to_json();
    cert["stationarity"] = to_json(st);
    if (st.is_proved()) return Verdict::proved(cert, horizon);
    if (st.is_refuted()) return Verdict::refuted(cert, horizon);
  }
  // Windows ending at horizon, horizon/2, ... as long as they fit.
  json windows = json::array();
  bool all_small = true;
  Rational tol2 = tolerance * tolerance;
  for (Nat end = horizon; end >= window; end /= 2) {
    std::optional<Nat> witness;
    for (Nat n = end - window + 1; n <= end && !witness; ++n)
      if (squared_norm1(seq.at(n)) < tol2) witness = n;
    windows.push_back({{"end", end}, {"witness", witness ? json(*witness) : json(nullptr)}});
    if (!witness) all_small = false;
    if (end == window) break;
  }
  cert["windows"] = windows;
  cert["scope"] = "horizon";
  if (all_small) return Verdict::proved(cert, horizon);
  return Verdict::consistent(cert, horizon);
}

json CesaroReport::to_json() const {
  json cps = json::array();
  for (const auto& c : checkpoints) {
    json e{{"n", c.n}, {"exact", c.exact}};
    if (c.exact)
      e["average"] = filterlab::to_string(c.average);
    else
      e["lower"] = filterlab::to_string(c.lower), e["upper"] = filterlab::to_string(c.upper);
    cps.push_back(e);
  }
  return {{"candidate", filterlab::to_string(candidate)}, {"checkpoints", cps}};
}

CesaroReport strong_cesaro(const SeqGen& seq, const Rational& candidate, Nat horizon) {
  if (seq.is_vector()) throw Error("invalid-argument", "strong Cesàro averages need a scalar sequence");
  if (horizon == 0) throw Error("invalid-argument", "horizon must be positive");
  // Terms are accumulated in fixed point with scale 2^96 * D, rounding down for
  // the lower sum and up for the upper sum. D is the lcm of the odd parts of
  // the term denominators while it stays below 2^32, so such terms stay exact.
  mpz_class scale = mpz_class(1) << 96;
  mpz_class odd_lcm = 1;
  const mpz_class lcm_cap = mpz_class(1) << 32;
  mpz_class lo = 0, hi = 0;
  bool exact = true;
  CesaroReport rep;
  rep.candidate = candidate;
  Nat next = 1;
  Rational last_term = -1;
  mpz_class last_floor = 0;
  bool last_exact = true;
  for (Nat n = 1; n <= horizon; ++n) {
    Rational t = abs_value(candidate - seq.value(n));
    if (t != last_term) {
      mpz_class odd = t.get_den();
      odd >>= mpz_scan1(odd.get_mpz_t(), 0);
      if (!mpz_divisible_p(odd_lcm.get_mpz_t(), odd.get_mpz_t())) {
        mpz_class grown;
        mpz_lcm(grown.get_mpz_t(), odd_lcm.get_mpz_t(), odd.get_mpz_t());
        if (grown < lcm_cap) {
          const mpz_class factor = grown / odd_lcm;
          lo *= factor;
          hi *= factor;
          scale *= factor;
          odd_lcm = grown;
        }
      }
      Rational scaled = t * Rational(scale);
      mpz_fdiv_q(last_floor.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
      last_exact = scaled.get_den() == 1;
      last_term = t;
    }
    lo += last_floor;
    hi += last_exact ? last_floor : mpz_class(last_floor + 1);
    exact = exact && last_exact;
    if (n == next || n == horizon) {
      CesaroCheckpoint c;
      c.n = n;
      c.exact = exact;
      Rational denom = Rational(scale) * from_nat(n);
      c.lower = Rational(lo) / denom;
      c.upper = Rational(hi) / denom;
      c.lower.canonicalize();
      c.upper.canonicalize();
      if (exact) c.average = c.lower;
      rep.checkpoints.push_back(c);
      if (n == next) next *= 10;
    }
  }
  return rep;
}

Verdict stat_vs_cesaro(const SeqGen& seq, const Rational& candidate, Nat horizon,
                       const Rational& tolerance) {
  if (!seq.meta().bound)
    throw Error("invalid-argument", "statistical/Cesàro comparison needs a declared bound");
  if (tolerance <= 0) throw Error("invalid-argument", "tolerance must be positive");
  ConvergenceQuery q;
  q.filter = FilterHandle::statistical();
  q.seq = seq;
  q.mode = Mode::Scalar;
  q.scalar_limit = candidate;
  q.eps = tolerance;
  q.horizon = horizon;
  auto comps = analyse(q);
  Verdict stat = combine(q, comps);
  bool stat_convergent;
  json stat_info{{"verdict", to_json(stat)}};
  if (!stat.is_consistent()) {
    stat_convergent = stat.is_proved();
  } else {
    // Density of the tolerance-bad set at the horizon.
    Nat bad = comps[0].bad_set ? counting(*comps[0].bad_set, horizon) : 0;
    Rational d = from_nat(bad) / from_nat(horizon);
    stat_info["badDensityAtHorizon"] = to_string(d);
    stat_convergent = d < tolerance;
  }
  CesaroReport rep = strong_cesaro(seq, candidate, horizon);
  const CesaroCheckpoint& last = rep.checkpoints.back();
  bool cesaro_convergent = last.upper < tolerance;
  bool cesaro_divergent = last.lower >= tolerance;
  json cert{{"kind", "stat-vs-cesaro"},
            {"scope", "horizon"},
            {"seq", seq.to_json()},
            {"tolerance", to_string(tolerance)},
            {"statistical", stat_info},
            {"statisticallyConvergent", stat_convergent},
            {"cesaro", rep.to_json()},
            {"cesaroConvergent", cesaro_convergent}};
  if (!cesaro_convergent && !cesaro_divergent) return Verdict::consistent(cert, horizon);
  if (stat_convergent == cesaro_convergent) return Verdict::proved(cert, horizon);
  return Verdict::refuted(cert, horizon);
}

} // namespace filterlab
