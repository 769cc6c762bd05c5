#include <algorithm>
#include <bit>
#include <random>

#include "filterlab/filters.hpp"

namespace filterlab {

namespace {

using Kind = FilterHandle::Kind;

Rational q(Nat n) { return from_nat(n); }

json eval_counting(const SetExpr& s, Nat n) {
  return {{"fn", "counting"}, {"set", s.to_json()}, {"n", n}};
}

/// Dyadic pieces meeting [1, n]; at most log2(n) + 2.
Nat log_bound(Nat n) { return n <= 1 ? n : static_cast<Nat>(std::bit_width(n - 1)) + 1; }

void require_stationary(const FilterHandle& f, const SetExpr& I, Nat horizon) {
  if (is_stationary(f, I, horizon).is_refuted())
    throw Error("precondition", "the set is not stationary for " + f.name());
}

void validate_chain(const FilterHandle& f, const BaseChain& chain, Nat horizon) {
  const Nat upto = std::min<Nat>(std::max<Nat>(horizon, 1), 16);
  for (Nat n = 1; n <= upto; ++n)
    if (contains(f, chain.at(n), horizon).is_refuted())
      throw Error("invalid-chain", "chain set " + std::to_string(n) + " is not a member of " + f.name());
}

/// Pieces of a blocking restricted to [1, h], computed in one pass.
std::vector<std::vector<Nat>> pieces_upto(const Blocking& b, Nat h) {
  std::vector<std::vector<Nat>> pieces;
  auto put = [&](Nat k, Nat n) {
    if (pieces.size() < k)
      pieces.resize(k);
    pieces[k - 1].push_back(n);
  };
  switch (b.kind()) {
  case Blocking::Kind::Dyadic:
  case Blocking::Kind::Explicit:
    for (Nat n = 1; n <= h; ++n)
      put(*b.piece_of(n), n);
    break;
  case Blocking::Kind::Derived: {
    const auto bits = materialize(b.ground(), h);
    Nat rank = 0;
    for (Nat n = 1; n <= h; ++n)
      if (bits[n])
        put(*b.base().piece_of(++rank), n);
    break;
  }
  case Blocking::Kind::Restricted: {
    const auto bits = materialize(b.ground(), h);
    for (Nat n = 1; n <= h; ++n)
      if (bits[n])
        put(*b.base().piece_of(n), n);
    break;
  }
  }
  return pieces;
}

/// Columns meeting the set infinitely, in increasing order, up to `count`.
std::vector<Nat> infinite_columns(const ColumnProfile& prof, Nat count) {
  std::vector<Nat> out;
  const Nat pre = prof.prefix.size(), len = prof.period.size();
  if (prof.infinitely_many_infinite() != Tri::Yes) {
    for (Nat c = 1; c <= pre + len; ++c)
      if (prof.at(c).infinite == Tri::Yes)
        out.push_back(c);
    return out;
  }
  for (Nat c = 1; out.size() < count; ++c)
    if (prof.at(c).infinite == Tri::Yes)
      out.push_back(c);
  return out;
}

Verdict routed_selector(const FilterHandle& f, const SetExpr& I, const Blocking& b, Nat horizon) {
  const bool tails = f.kind() == Kind::ColumnFD;
  const auto& prof = I.facts().columns;
  json cert{{"kind", "routed-selector"}, {"scope", "horizon"}, {"blocking", b.to_json()}};
  if (!prof) {
    cert["reason"] = "column structure of the ground set is not known";
    return Verdict::consistent(cert, horizon);
  }
  const Tri enough = tails ? prof->infinitely_many_infinite() : prof->some_infinite();
  if (enough != Tri::Yes) {
    cert["reason"] = "the ground set does not provably meet enough columns infinitely";
    return Verdict::consistent(cert, horizon);
  }
  const auto pieces = pieces_upto(b, horizon);
  const auto used = infinite_columns(*prof, pieces.size() + 1);
  // triangular routing: rounds 1 | 1 2 | 1 2 3 | ...
  std::vector<Nat> picks;
  std::map<Nat, Nat> hits;
  Nat round = 1, pos = 0, rounds_done = 0;
  for (const auto& piece : pieces) {
    Nat target = tails ? used[pos] : used[0];
    std::optional<Nat> pick;
    for (Nat n : piece)
      if (unpair(n).column == target) {
        pick = n;
        break;
      }
    if (!pick)
      pick = piece.front();
    picks.push_back(*pick);
    ++hits[unpair(*pick).column];
    if (++pos == round) {
      pos = 0;
      ++round;
      ++rounds_done;
    }
  }
  // column used[i] is targeted once in every round from round i + 1 on
  const Nat half = (rounds_done + 1) / 2;
  bool ok = !picks.empty();
  json checks = json::array();
  if (tails) {
    for (Nat i = 0; i < half && i < used.size(); ++i) {
      Nat need = rounds_done - i;
      checks.push_back(inequality("column-" + std::to_string(used[i]) + "-hits", q(hits[used[i]]), ">=",
                                  q(need)));
      ok = ok && hits[used[i]] >= need;
    }
  } else {
    checks.push_back(inequality("column-" + std::to_string(used[0]) + "-hits", q(hits[used[0]]), ">=",
                                q((pieces.size() + 1) / 2)));
    ok = ok && hits[used[0]] >= (pieces.size() + 1) / 2;
  }
  cert["selector"] = picks;
  cert["pieces"] = pieces.size();
  cert["rounds"] = rounds_done;
  cert["checks"] = checks;
  cert["reason"] = tails ? "picks are routed into infinitely many columns, each receiving infinitely many"
                         : "picks are routed into one column the ground set meets infinitely";
  return ok ? Verdict::proved(cert, horizon) : Verdict::consistent(cert, horizon);
}

} // namespace

// ---------------------------------------------------------------------------
// BaseChain

BaseChain BaseChain::tails(Nat step) {
  if (step == 0)
    throw Error("invalid-chain", "tail step must be positive");
  BaseChain c;
  c.kind_ = Kind::Tails;
  c.step_ = step;
  return c;
}

BaseChain BaseChain::column_tails() {
  BaseChain c;
  c.kind_ = Kind::ColumnTails;
  return c;
}

BaseChain BaseChain::column_rows() {
  BaseChain c;
  c.kind_ = Kind::ColumnRows;
  return c;
}

BaseChain BaseChain::constant(SetExpr s) {
  BaseChain c;
  c.kind_ = Kind::Constant;
  c.sets_ = {std::move(s)};
  return c;
}

BaseChain BaseChain::intersect_tails(SetExpr s, Nat step) {
  if (step == 0)
    throw Error("invalid-chain", "tail step must be positive");
  BaseChain c;
  c.kind_ = Kind::IntersectTails;
  c.step_ = step;
  c.sets_ = {std::move(s)};
  return c;
}

BaseChain BaseChain::explicit_list(std::vector<SetExpr> sets, Nat check_limit) {
  if (sets.empty())
    throw Error("invalid-chain", "a chain needs at least one set");
  for (std::size_t i = 1; i < sets.size(); ++i) {
    const SetExpr extra = sets[i] - sets[i - 1];
    auto found = enumerate(extra, check_limit);
    if (extra.facts().infinite == Tri::Yes || !found.empty())
      throw Error("invalid-chain", "chain is not decreasing: set " + std::to_string(i + 1) +
                                       " has elements outside set " + std::to_string(i) +
                                       (found.empty() ? "" : " (e.g. " + std::to_string(found[0]) + ")"));
  }
  BaseChain c;
  c.kind_ = Kind::Explicit;
  c.sets_ = std::move(sets);
  return c;
}

SetExpr BaseChain::at(Nat n) const {
  if (n == 0)
    throw Error("invalid-chain", "chain sets are numbered from 1");
  switch (kind_) {
  case Kind::Tails:
    return SetExpr::tail(step_ * n);
  case Kind::ColumnTails:
    return SetExpr::columns(SetExpr::progression(n, 1), ColumnRule::cofinite());
  case Kind::ColumnRows:
    return SetExpr::columns(SetExpr::all(), ColumnRule::cofinite(n + 1));
  case Kind::Constant:
    return sets_[0];
  case Kind::IntersectTails:
    return sets_[0] & SetExpr::tail(step_ * n);
  case Kind::Explicit:
    return sets_[std::min<Nat>(n, sets_.size()) - 1];
  }
  return sets_.at(0);
}

std::optional<Nat> BaseChain::layer(Nat j) const {
  if (j == 0)
    return std::nullopt;
  switch (kind_) {
  case Kind::Tails:
    if (j <= step_)
      return std::nullopt;
    return (j - 1) / step_;
  case Kind::ColumnTails:
    return unpair(j).column;
  case Kind::ColumnRows: {
    Nat r = unpair(j).row;
    if (r < 2)
      return std::nullopt;
    return r - 1;
  }
  case Kind::Constant:
    return std::nullopt;
  case Kind::IntersectTails:
    if (j <= step_ || !sets_[0].contains(j))
      return std::nullopt;
    return (j - 1) / step_;
  case Kind::Explicit:
    if (!sets_[0].contains(j))
      return std::nullopt;
    for (Nat i = 1; i < sets_.size(); ++i)
      if (!sets_[i].contains(j))
        return i;
    return std::nullopt;
  }
  return std::nullopt;
}

bool BaseChain::in_first(Nat j) const {
  switch (kind_) {
  case Kind::Tails:
    return j > step_;
  case Kind::ColumnTails:
    return j >= 1;
  case Kind::ColumnRows:
    return j >= 1 && unpair(j).row >= 2;
  case Kind::IntersectTails:
    return j > step_ && sets_[0].contains(j);
  default:
    return sets_[0].contains(j);
  }
}

json BaseChain::to_json() const {
  switch (kind_) {
  case Kind::Tails:
    return {{"kind", "tails"}, {"step", step_}};
  case Kind::ColumnTails:
    return {{"kind", "columnTails"}};
  case Kind::ColumnRows:
    return {{"kind", "columnRows"}};
  case Kind::Constant:
    return {{"kind", "constant"}, {"set", sets_[0].to_json()}};
  case Kind::IntersectTails:
    return {{"kind", "intersectTails"}, {"set", sets_[0].to_json()}, {"step", step_}};
  case Kind::Explicit: {
    json list = json::array();
    for (const auto& s : sets_)
      list.push_back(s.to_json());
    return {{"kind", "explicit"}, {"sets", list}};
  }
  }
  return nullptr;
}

BaseChain BaseChain::from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "tails")
    return tails(j.value("step", Nat{1}));
  if (kind == "columnTails")
    return column_tails();
  if (kind == "columnRows")
    return column_rows();
  if (kind == "constant")
    return constant(SetExpr::from_json(j.at("set")));
  if (kind == "intersectTails")
    return intersect_tails(SetExpr::from_json(j.at("set")), j.value("step", Nat{1}));
  if (kind == "explicit") {
    std::vector<SetExpr> sets;
    for (const auto& s : j.at("sets"))
      sets.push_back(SetExpr::from_json(s));
    return explicit_list(std::move(sets));
  }
  throw Error("invalid-chain", "unknown chain kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Block-respecting

Verdict block_respecting_check(const FilterHandle& f, const SetExpr& I, const Blocking& d,
                               Nat horizon) {
  require_stationary(f, I, horizon);
  const Nat h = std::max<Nat>(horizon, 1);
  const Blocking b = d.is_interval() ? Blocking::of_set(I, d) : d;
  const SetExpr J = SetExpr::selector(b, SelectRule::Min);
  const Verdict st = is_stationary(f, J, h);
  if (st.is_proved()) {
    json cert{{"kind", "selector"},
              {"selector", J.to_json()},
              {"blocking", b.to_json()},
              {"rule", "min"},
              {"piecesChecked", b.pieces_meeting(h)},
              {"stationarity", to_json(st)}};
    return Verdict::proved(cert, h);
  }
  if (b.logarithmic() && log_sparse_sets_null(f, I)) {
    const Nat pieces = b.pieces_meeting(h);
    const Nat c = counting(J, h);
    const Nat bound = log_bound(h);
    json cert{
        {"kind", "log-bound"},
        {"blocking", b.to_json()},
        {"selector", J.to_json()},
        {"argument",
         "a selector meets every piece at most once, so |J ∩ [1,n]| is at most the number of pieces "
         "meeting [1,n], which is at most log2(n) + 2; sets with such counting functions are null "
         "for this filter on the ground set, so no selector is stationary"},
        {"bound", SparseBound{0, 1, {}}.to_json()},
        {"checks",
         {inequality("selector-count", q(c), "<=", q(pieces), eval_counting(J, h)),
          inequality("pieces-meeting", q(pieces), "<=", q(bound),
                     {{"fn", "pieces_meeting"}, {"blocking", b.to_json()}, {"n", h}}),
          inequality("density-bound", Rational(q(c) / q(h)), "<=", Rational(q(bound) / q(h)),
                     {{"fn", "counting_ratio"}, {"set", J.to_json()}, {"n", h}})}},
        {"densityBound", to_string(Rational(q(bound) / q(h)))},
        {"selectorStationarity", to_json(st)}};
    return Verdict::refuted(cert, h);
  }
  if (f.kind() == Kind::ColumnFD || f.kind() == Kind::ColumnFd)
    return routed_selector(f, I, b, h);
  json cert{{"kind", "undecided"},
            {"reason", "no witness strategy settles this filter and blocking"},
            {"selector", J.to_json()},
            {"selectorStationarity", to_json(st)}};
  return Verdict::consistent(cert, h);
}

// ---------------------------------------------------------------------------
// Strongly diagonal

Verdict strongly_diagonal_witness(const FilterHandle& f, const BaseChain& chain, const SetExpr& I,
                                  Nat horizon) {
  validate_chain(f, chain, horizon);
  require_stationary(f, I, horizon);
  const Nat target = std::max<Nat>(horizon, 1);
  json cert{{"kind", "strongly-diagonal"}, {"scope", "horizon"}, {"chain", chain.to_json()},
            {"filter", f.to_json()}};

  // j may follow a witness whose last layer is L iff j ∈ A_(L+1)
  auto admissible = [&](Nat j, Nat last) {
    auto l = chain.layer(j);
    if (l)
      return *l > last;
    return chain.in_first(j);
  };

  std::vector<Nat> picks;
  Nat last = 0;
  const Nat search_limit = 64 * target + (1 << 16);
  if (f.kind() == Kind::CountableBase || f.kind() == Kind::Frechet) {
    const bool tails = f.kind() == Kind::Frechet || f.tails_base();
    Nat j = 0;
    for (Nat k = 1; k <= target; ++k) {
      const SetExpr bk = tails ? SetExpr::tail(k) : f.base_set(k);
      bool found = false;
      while (++j <= search_limit) {
        if (admissible(j, last) && I.contains(j) && bk.contains(j)) {
          found = true;
          break;
        }
      }
      if (!found)
        break;
      picks.push_back(j);
      if (auto l = chain.layer(j))
        last = *l;
    }
    cert["reason"] = "the k-th pick lies in the k-th base set, so the witness meets every base set";
  } else if (f.kind() == Kind::ColumnFd) {
    const auto& prof = I.facts().columns;
    std::optional<Nat> column;
    if (prof)
      for (Nat c = 1; c <= prof->prefix.size() + prof->period.size(); ++c)
        if (prof->at(c).infinite == Tri::Yes) {
          column = c;
          break;
        }
    if (!column) {
      cert["reason"] = "no column provably meets the set infinitely";
      return Verdict::consistent(cert, horizon);
    }
    for (Nat r = 1; picks.size() < target && r <= search_limit; ++r) {
      Nat n = pair_index(r, *column);
      if (admissible(n, last) && I.contains(n)) {
        picks.push_back(n);
        if (auto l = chain.layer(n))
          last = *l;
      }
    }
    cert["column"] = *column;
    cert["reason"] = "the witness is an infinite subset of a single column";
  } else {
    cert["reason"] = "no strongly diagonal strategy for this filter";
    return Verdict::consistent(cert, horizon);
  }

  // independent recount of |(J ∩ A_n) \ A_(n+1)|
  std::map<Nat, Nat> per_layer;
  for (Nat j : picks)
    if (auto l = chain.layer(j))
      ++per_layer[*l];
  Nat worst = 0;
  for (const auto& [l, c] : per_layer)
    worst = std::max(worst, c);
  cert["witness"] = picks;
  cert["picks"] = picks.size();
  cert["maxLayer"] = per_layer.empty() ? 0 : per_layer.rbegin()->first;
  cert["checks"] = {inequality("layer-count", q(worst), "<=", 1,
                               {{"fn", "layer_count"}, {"chain", chain.to_json()}, {"witness", picks}})};
  if (picks.size() < target || worst > 1) {
    cert["reason"] = "selection exhausted before the horizon";
    return Verdict::consistent(cert, horizon);
  }
  return Verdict::proved(cert, horizon);
}

// ---------------------------------------------------------------------------
// Diagonal

Verdict diagonal_check(const FilterHandle& f, const BaseChain& chain, const SetExpr& I, Nat horizon) {
  validate_chain(f, chain, horizon);
  require_stationary(f, I, horizon);
  const Nat h = std::max<Nat>(horizon, 1);
  switch (f.kind()) {
  case Kind::Frechet: {
    Verdict st = is_stationary(f, I, h);
    json checks = json::array();
    for (Nat n = 1; n <= std::min<Nat>(h, 32); ++n) {
      const SetExpr an = chain.at(n);
      const SetExpr rest = I - an;
      checks.push_back(inequality("exceptions-" + std::to_string(n), q(counting(rest, h)), "<=",
                                  q(counting(~an, h)), eval_counting(rest, h)));
    }
    json cert{{"kind", "self-witness"},
              {"witness", I.to_json()},
              {"reason", "chain members are cofinite, so the set itself is almost contained in each"},
              {"checks", checks},
              {"stationarity", to_json(st)}};
    if (st.is_proved())
      return Verdict::proved(cert, h);
    return Verdict::consistent(cert, h);
  }
  case Kind::CountableBase:
  case Kind::ColumnFd: {
    Verdict w = strongly_diagonal_witness(f, chain, I, h);
    w.certificate = {{"kind", "via-strongly-diagonal"}, {"witness", w.certificate}};
    return w;
  }
  case Kind::ColumnFD:
    if (chain.kind() == BaseChain::Kind::ColumnTails) {
      json checks = json::array();
      for (Nat c = 1; c <= 8; ++c) {
        const SetExpr overlap = SetExpr::column(c) & chain.at(c + 1);
        checks.push_back(inequality("column-" + std::to_string(c) + "-outside-next", q(counting(overlap, h)),
                                    "=", 0, eval_counting(overlap, h)));
      }
      json cert{{"kind", "column-tail-obstruction"},
                {"chain", chain.to_json()},
                {"argument",
                 "column D_c is disjoint from A_(c+1), so any J with J \\ A_n finite for all n meets "
                 "every column in a finite set; such J is not stationary because stationarity needs "
                 "infinitely many columns met infinitely"},
                {"checks", checks}};
      return Verdict::refuted(cert, h);
    }
    break;
  default:
    break;
  }
  return Verdict::consistent({{"kind", "undecided"}, {"reason", "no diagonal strategy for this filter and chain"}},
                             h);
}

// ---------------------------------------------------------------------------
// Splitting

namespace {

std::optional<RowWord> alternate(const std::optional<RowWord>& w) {
  if (!w)
    return std::nullopt;
  const Nat len = w->size();
  RowWord out(2 * len, false);
  bool take = true;
  for (Nat j = 0; j < 2 * len; ++j) {
    if ((*w)[j % len]) {
      out[j] = take;
      take = !take;
    }
  }
  return out;
}

std::optional<SetExpr> column_half(const SetExpr& I) {
  const auto& prof = I.facts().columns;
  if (!prof)
    return std::nullopt;
  const Nat pre = prof->prefix.size(), len = prof->period.size();
  std::map<Nat, ColumnRule> overrides;
  for (Nat c = 1; c <= pre; ++c) {
    auto alt = alternate(prof->at(c).word);
    if (!alt)
      return std::nullopt;
    overrides[c] = ColumnRule::periodic(*alt);
  }
  SetExpr half = SetExpr::columns(SetExpr::empty(), ColumnRule::empty(), overrides);
  for (Nat i = 0; i < len; ++i) {
    auto alt = alternate(prof->period[i].word);
    if (!alt)
      return std::nullopt;
    std::vector<bool> period(len, false);
    period[i] = true;
    SetExpr which = SetExpr::periodic(EventuallyPeriodic(std::vector<bool>(pre, false), period));
    half = half | SetExpr::columns(which, ColumnRule::periodic(*alt));
  }
  return half & I;
}

} // namespace

SplitResult split_stationary(const FilterHandle& f, const SetExpr& I, Nat horizon) {
  require_stationary(f, I, horizon);
  std::optional<SetExpr> first, second;
  if (f.kind() == Kind::ColumnFD || f.kind() == Kind::ColumnFd) {
    if (auto h = column_half(I)) {
      first = *h;
      second = I - *h;
    }
  }
  if (!first) {
    const Blocking pairs = Blocking::derived(I, Blocking::explicit_boundaries({2}));
    first = SetExpr::selector(pairs, SelectRule::Min);
    second = SetExpr::selector(pairs, SelectRule::Max);
  }
  return {*first, *second, is_stationary(f, *first, horizon), is_stationary(f, *second, horizon)};
}

// ---------------------------------------------------------------------------
// Standard embedding

EmbeddingReport standard_embedding(const FilterHandle& f, const SetExpr& J, Nat samples, Nat seed,
                                   Nat horizon) {
  if (f.kind() != Kind::ColumnFD && f.kind() != Kind::ColumnFd)
    throw Error("invalid-argument", "standard embeddings are defined for column filters");
  auto map = std::make_shared<const StandardMap>(J);
  json pairs = json::array();
  for (Nat n = 1; n <= 10; ++n)
    pairs.push_back({n, map->forward(n)});
  json used = json::array();
  for (Nat m = 1; m <= 8; ++m)
    used.push_back(map->column_at(m));
  json descriptor{{"standard", J.to_json()}, {"usedColumns", used}, {"firstValues", pairs}};

  const FilterHandle traced = FilterHandle::trace(f, J);
  std::mt19937_64 rng(seed);
  auto pick = [&](Nat lo, Nat hi) { return lo + rng() % (hi - lo + 1); };
  json rows = json::array();
  bool all_agree = true, all_decided = true;
  for (Nat i = 0; i < samples; ++i) {
    SetExpr b = SetExpr::all();
    switch (i % 5) {
    case 0:
      b = SetExpr::columns(SetExpr::tail(pick(0, 4)),
                           ColumnRule::cofinite(pick(1, 3), {pick(3, 6), pick(3, 9)}));
      break;
    case 1:
      b = SetExpr::column(pick(1, 6));
      break;
    case 2:
      b = SetExpr::columns(SetExpr::progression(pick(1, 3), pick(2, 4)), ColumnRule::cofinite());
      break;
    case 3:
      b = SetExpr::columns(SetExpr::all(), ColumnRule::subsample(pick(1, 2), 2));
      break;
    case 4: {
      std::map<Nat, ColumnRule> ov{{pick(1, 5), ColumnRule::empty()}, {pick(6, 9), ColumnRule::finite({1, 2})}};
      b = SetExpr::columns(SetExpr::all(), ColumnRule::cofinite(pick(1, 4)), ov);
      break;
    }
    }
    Verdict direct = contains(f, b, horizon);
    Verdict moved = contains(traced, SetExpr::image(J, b), horizon);
    bool agree = direct.status == moved.status;
    all_agree = all_agree && agree;
    all_decided = all_decided && !direct.is_consistent() && !moved.is_consistent();
    rows.push_back({{"set", b.to_json()},
                    {"member", to_string(direct.status)},
                    {"imageInTrace", to_string(moved.status)},
                    {"agree", agree}});
  }
  json cert{{"kind", "self-reproduction"}, {"samples", rows}, {"descriptor", descriptor}};
  Verdict property = !all_agree    ? Verdict::refuted(cert, horizon)
                     : all_decided ? Verdict::proved(cert, horizon)
                                   : Verdict::consistent(cert, horizon);
  return {map, descriptor, property};
}

} // namespace filterlab
