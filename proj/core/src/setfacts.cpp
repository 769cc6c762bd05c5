#include <algorithm>
#include <numeric>

#include "internal.hpp"

namespace filterlab {

namespace {

using Op = SetExpr::Op;

constexpr Nat kMaxColumnPeriod = 4096;
constexpr Nat kMaxDirectPeriod = 128;
constexpr Nat kMaxWord = 4096;

Nat ones(const std::vector<bool>& bits) {
  return static_cast<Nat>(std::count(bits.begin(), bits.end(), true));
}

// ---------------------------------------------------------------------------
// Column profiles

std::optional<ColumnProfile> profile_of_periodic(const EventuallyPeriodic& ep) {
  const Nat p = ep.period().size();
  if (ep.is_finite())
    return ColumnProfile{{}, {ColumnContent::empty()}};
  if (p > kMaxDirectPeriod)
    return std::nullopt;
  const Nat len = 2 * p;
  const Nat pre = ep.prefix().size();
  Nat r0 = len;
  while ((r0 - 1) * r0 / 2 < pre)
    r0 += len;
  ColumnProfile prof;
  for (Nat c = 1; c <= len; ++c) {
    RowWord w(len);
    for (Nat j = 0; j < len; ++j)
      w[j] = ep.contains(pair_index(r0 + j, c));
    prof.period.push_back(ColumnContent::from_word(std::move(w)));
  }
  return prof;
}

ColumnContent complement_content(const ColumnContent& c) {
  ColumnContent out;
  out.infinite = c.coinfinite;
  out.coinfinite = c.infinite;
  if (c.word) {
    RowWord w = *c.word;
    w.flip();
    out.word = std::move(w);
  }
  return out;
}

ColumnContent combine_content(const ColumnContent& a, const ColumnContent& b, BoolOp op) {
  if (a.word && b.word) {
    const Nat la = a.word->size(), lb = b.word->size();
    const Nat len = std::lcm(la, lb);
    if (len <= kMaxWord) {
      RowWord w(len);
      for (Nat i = 0; i < len; ++i) {
        bool x = (*a.word)[i % la], y = (*b.word)[i % lb];
        w[i] = op == BoolOp::Union ? (x || y) : op == BoolOp::Intersection ? (x && y) : (x && !y);
      }
      return ColumnContent::from_word(std::move(w));
    }
  }
  if (op == BoolOp::Difference)
    return combine_content(a, complement_content(b), BoolOp::Intersection);
  ColumnContent out;
  if (op == BoolOp::Union) {
    out.infinite = tri_or(a.infinite, b.infinite);
    // D \ (A ∪ B) = (D \ A) ∩ (D \ B)
    if (a.coinfinite == Tri::No || b.coinfinite == Tri::No)
      out.coinfinite = Tri::No;
    else if ((a.coinfinite == Tri::Yes && b.infinite == Tri::No) ||
             (b.coinfinite == Tri::Yes && a.infinite == Tri::No))
      out.coinfinite = Tri::Yes;
  } else {
    out.coinfinite = tri_or(a.coinfinite, b.coinfinite);
    if (a.infinite == Tri::No || b.infinite == Tri::No)
      out.infinite = Tri::No;
    else if ((a.infinite == Tri::Yes && b.coinfinite == Tri::No) ||
             (b.infinite == Tri::Yes && a.coinfinite == Tri::No))
      out.infinite = Tri::Yes;
  }
  return out;
}

std::optional<ColumnProfile> combine_profiles(const ColumnProfile& a, const ColumnProfile& b, BoolOp op) {
  const Nat len = std::lcm<Nat>(a.period.size(), b.period.size());
  if (len > kMaxColumnPeriod)
    return std::nullopt;
  const Nat pre = std::max(a.prefix.size(), b.prefix.size());
  ColumnProfile out;
  for (Nat c = 1; c <= pre; ++c)
    out.prefix.push_back(combine_content(a.at(c), b.at(c), op));
  for (Nat c = pre + 1; c <= pre + len; ++c)
    out.period.push_back(combine_content(a.at(c), b.at(c), op));
  return out;
}

ColumnProfile complement_profile(const ColumnProfile& p) {
  ColumnProfile out;
  for (const auto& c : p.prefix)
    out.prefix.push_back(complement_content(c));
  for (const auto& c : p.period)
    out.period.push_back(complement_content(c));
  return out;
}

std::optional<ColumnProfile> profile_of_columns(const SetExpr::Node& nd) {
  const EventuallyPeriodic& which = *nd.args[0].facts().normal;
  Nat pre = which.prefix().size();
  if (!nd.overrides.empty())
    pre = std::max(pre, nd.overrides.rbegin()->first);
  const Nat len = which.period().size();
  if (len > kMaxColumnPeriod)
    return std::nullopt;
  const ColumnContent governed = ColumnContent::from_word(nd.rule.eventual_word());
  auto content = [&](Nat c) {
    auto it = nd.overrides.find(c);
    if (it != nd.overrides.end())
      return ColumnContent::from_word(it->second.eventual_word());
    return which.contains(c) ? governed : ColumnContent::empty();
  };
  ColumnProfile prof;
  for (Nat c = 1; c <= pre; ++c)
    prof.prefix.push_back(content(c));
  for (Nat c = pre + 1; c <= pre + len; ++c)
    prof.period.push_back(content(c));
  return prof;
}

std::optional<ColumnProfile> profile_of_rect(const SetExpr::Node& nd) {
  const EventuallyPeriodic& rows = *nd.args[0].facts().normal;
  const EventuallyPeriodic& cols = *nd.args[1].facts().normal;
  const Nat p = rows.period().size();
  const Nat pr = rows.prefix().size();
  if (p > kMaxWord || cols.period().size() > kMaxColumnPeriod)
    return std::nullopt;
  RowWord w(p);
  for (Nat j = 0; j < p; ++j)
    w[j] = rows.period()[((j + p * (pr / p + 2)) - 1 - pr) % p];
  const ColumnContent used = ColumnContent::from_word(std::move(w));
  ColumnProfile prof;
  const Nat pre = cols.prefix().size();
  for (Nat c = 1; c <= pre + cols.period().size(); ++c) {
    ColumnContent cc = cols.contains(c) ? used : ColumnContent::empty();
    (c <= pre ? prof.prefix : prof.period).push_back(std::move(cc));
  }
  return prof;
}

std::optional<ColumnProfile> profile_of_image(const SetExpr::Node& nd) {
  const StandardMap& map = *nd.map;
  const auto& src = nd.args[1].facts().columns;
  if (!src)
    return std::nullopt;
  const ColumnProfile& jp = map.profile();
  const Nat len = jp.period.size() * src->period.size();
  if (len > kMaxColumnPeriod)
    return std::nullopt;
  Nat pre = std::max<Nat>(jp.prefix.size(), 1);
  while (map.column_rank(pre) < src->prefix.size())
    ++pre;
  auto content = [&](Nat c) {
    if (!map.column_used(c)) {
      ColumnContent e;
      e.infinite = Tri::No;
      e.coinfinite = Tri::Yes;
      return e;
    }
    const ColumnContent& s = src->at(map.column_rank(c));
    ColumnContent out;
    out.infinite = s.infinite;
    out.coinfinite = tri_or(jp.at(c).coinfinite, s.coinfinite);
    return out;
  };
  ColumnProfile prof;
  for (Nat c = 1; c <= pre; ++c)
    prof.prefix.push_back(content(c));
  for (Nat c = pre + 1; c <= pre + len; ++c)
    prof.period.push_back(content(c));
  return prof;
}

// ---------------------------------------------------------------------------
// Normal forms

std::optional<EventuallyPeriodic> normal_of(const SetExpr::Node& nd) {
  switch (nd.op) {
  case Op::Finite: {
    if (nd.elements.empty())
      return EventuallyPeriodic({}, {false});
    if (nd.elements.back() > 4 * kMaxPeriod)
      return std::nullopt;
    std::vector<bool> prefix(nd.elements.back(), false);
    for (Nat e : nd.elements)
      prefix[e - 1] = true;
    return EventuallyPeriodic(std::move(prefix), {false}).canonical();
  }
  case Op::Progression: {
    const Nat start = nd.first == 0 ? nd.step : nd.first;
    if (nd.step > kMaxPeriod || start > 4 * kMaxPeriod)
      return std::nullopt;
    std::vector<bool> period(nd.step, false);
    period[0] = true;
    return EventuallyPeriodic(std::vector<bool>(start - 1, false), std::move(period)).canonical();
  }
  case Op::Periodic:
    return nd.ep->canonical();
  case Op::Complement:
    if (const auto& a = nd.args[0].facts().normal)
      return a->complement();
    return std::nullopt;
  case Op::Union:
  case Op::Intersection:
  case Op::Difference: {
    const auto& a = nd.args[0].facts().normal;
    const auto& b = nd.args[1].facts().normal;
    if (!a || !b)
      return std::nullopt;
    BoolOp op = nd.op == Op::Union          ? BoolOp::Union
                : nd.op == Op::Intersection ? BoolOp::Intersection
                                            : BoolOp::Difference;
    return combine(*a, *b, op);
  }
  default:
    return std::nullopt;
  }
}

SparseBound root_bound(Nat coef) {
  SparseBound s;
  if (coef > 0)
    s.roots.push_back({2, 2, coef});
  return s;
}

// ---------------------------------------------------------------------------
// Per-generator facts (without normal form)

void selector_facts(const SetExpr::Node& nd, SetFacts& f) {
  const Blocking& b = *nd.blocking;
  const Blocking& base = b.base();
  const auto len = b.eventual_length();
  const bool nth_fits = nd.select != SelectRule::Nth || (len && *len >= nd.nth);
  const SetFacts ground = b.ground().facts();
  if (base.kind() == Blocking::Kind::Dyadic) {
    SparseBound s;
    s.log_coef = 1;
    f.sparse = s;
    f.upper = 0;
    if (b.kind() == Blocking::Kind::Dyadic)
      f.infinite = Tri::Yes; // every dyadic piece from the third on has >= nth elements eventually
    else if (b.kind() == Blocking::Kind::Derived)
      f.infinite = ground.infinite;
    return;
  }
  // explicit base with eventual piece length L
  const Nat L = *len;
  const Nat r = base.boundaries().size();
  if (!nth_fits) {
    // only the listed pieces can be long enough
    SparseBound s;
    s.constant = r;
    f.sparse = s;
    f.upper = 0;
    f.infinite = Tri::Unknown;
    if (b.kind() != Blocking::Kind::Restricted) {
      bool any = false;
      for (Nat k = 1; k <= r; ++k) {
        auto [lo, hi] = base.bounds(k);
        any = any || hi - lo + 1 >= nd.nth;
      }
      if (!any)
        f.infinite = Tri::No;
    }
    return;
  }
  const Rational inv = rational(1, L);
  switch (b.kind()) {
  case Blocking::Kind::Explicit:
    f.lower = f.upper = inv;
    f.infinite = Tri::Yes;
    break;
  case Blocking::Kind::Derived:
    f.lower = ground.lower * inv;
    f.upper = ground.upper * inv;
    f.infinite = ground.infinite;
    break;
  case Blocking::Kind::Restricted:
    f.lower = 0;
    f.upper = std::min(ground.upper, inv);
    break;
  default:
    break;
  }
}

void columns_facts(const SetExpr::Node& nd, SetFacts& f) {
  const EventuallyPeriodic& which = *nd.args[0].facts().normal;
  const ColumnRule& rule = nd.rule;
  auto rule_infinite = [](const ColumnRule& r) {
    for (bool b : r.eventual_word())
      if (b)
        return true;
    return false;
  };
  auto rule_nonempty = [&](const ColumnRule& r) {
    return rule_infinite(r) || (r.kind == ColumnRule::Kind::Finite && !r.rows.empty());
  };
  if (which.is_finite()) {
    Nat cols = ones(which.prefix());
    for (const auto& [c, r] : nd.overrides)
      if (!which.contains(c))
        ++cols;
    f.sparse = root_bound(cols);
    f.upper = 0;
  } else if (!rule_infinite(rule)) {
    // rows bounded by the rule's largest row, plus the override columns
    SparseBound s = root_bound(rule.irregular_rows());
    for (const auto& [c, r] : nd.overrides)
      s = s + (rule_infinite(r) ? root_bound(1) : SparseBound{r.rows.size(), 0, {}});
    f.sparse = s;
    f.upper = 0;
  }
  if (which.is_cofinite() && rule.kind == ColumnRule::Kind::Cofinite) {
    Nat missing = which.prefix().size() - ones(which.prefix());
    Nat bad = missing + nd.overrides.size() + rule.irregular_rows();
    f.cosparse = root_bound(bad);
    f.lower = 1;
  }
  if (!which.is_finite() && rule_nonempty(rule))
    f.infinite = Tri::Yes;
  else if (which.is_finite()) {
    bool all_finite = !rule_infinite(rule);
    for (const auto& [c, r] : nd.overrides)
      all_finite = all_finite && !rule_infinite(r);
    f.infinite = all_finite ? Tri::No : Tri::Unknown;
  }
}

void rect_facts(const SetExpr::Node& nd, SetFacts& f) {
  const EventuallyPeriodic& rows = *nd.args[0].facts().normal;
  const EventuallyPeriodic& cols = *nd.args[1].facts().normal;
  if (rows.is_empty() || cols.is_empty()) {
    f.infinite = Tri::No;
    f.sparse = SparseBound{};
    f.upper = 0;
    return;
  }
  f.infinite = tri(!rows.is_finite() || !cols.is_finite());
  if (rows.is_finite())
    f.sparse = root_bound(ones(rows.prefix()));
  else if (cols.is_finite())
    f.sparse = root_bound(ones(cols.prefix()));
  if (f.sparse)
    f.upper = 0;
}

// ---------------------------------------------------------------------------
// Boolean combinations

void complement_facts(const SetFacts& a, SetFacts& f) {
  f.lower = 1 - a.upper;
  f.upper = 1 - a.lower;
  f.sparse = a.cosparse;
  f.cosparse = a.sparse;
  if (a.infinite == Tri::No || a.upper < 1)
    f.infinite = Tri::Yes;
}

void intersection_facts(const SetExpr& a, const SetExpr& b, SetFacts& f) {
  const SetFacts& fa = a.facts();
  const SetFacts& fb = b.facts();
  f.lower = std::max(Rational(0), Rational(fa.lower + fb.lower - 1));
  f.upper = std::min(fa.upper, fb.upper);
  if (fa.sparse)
    f.sparse = fa.sparse;
  else if (fb.sparse)
    f.sparse = fb.sparse;
  if (fa.cosparse && fb.cosparse)
    f.cosparse = *fa.cosparse + *fb.cosparse;
  if (fa.infinite == Tri::No || fb.infinite == Tri::No)
    f.infinite = Tri::No;
  else if (f.lower > 0)
    f.infinite = Tri::Yes;
  for (const auto* pair : {&a, &b}) {
    const SetExpr& x = *pair;
    const SetExpr& y = pair == &a ? b : a;
    if (provably_subset(x, y)) {
      const SetFacts& fx = x.facts();
      f.infinite = fx.infinite;
      f.lower = fx.lower;
      f.upper = fx.upper;
      f.sparse = fx.sparse;
      f.cosparse = fx.cosparse;
      break;
    }
  }
  if (f.infinite == Tri::Unknown) {
    // cofinite ∩ infinite
    if ((fa.infinite == Tri::Yes && fb.cosparse) || (fb.infinite == Tri::Yes && fa.cosparse))
      f.infinite = Tri::Yes;
  }
}

void union_facts(const SetFacts& fa, const SetFacts& fb, SetFacts& f) {
  f.lower = std::max(fa.lower, fb.lower);
  f.upper = std::min(Rational(1), Rational(fa.upper + fb.upper));
  if (fa.sparse && fb.sparse)
    f.sparse = *fa.sparse + *fb.sparse;
  if (fa.cosparse)
    f.cosparse = fa.cosparse;
  else if (fb.cosparse)
    f.cosparse = fb.cosparse;
  f.infinite = tri_or(fa.infinite, fb.infinite);
}

} // namespace

SetFacts compute_facts(const SetExpr::Node& nd) {
  SetFacts f;
  f.normal = normal_of(nd);

  switch (nd.op) {
  case Op::Finite:
    f.infinite = Tri::No;
    f.upper = 0;
    f.sparse = SparseBound{nd.elements.size(), 0, {}};
    break;
  case Op::Progression:
    f.infinite = Tri::Yes;
    f.lower = f.upper = rational(1, nd.step);
    if (nd.step == 1)
      f.cosparse = SparseBound{nd.first > 1 ? nd.first - 1 : 0, 0, {}};
    break;
  case Op::Periodic:
    break;
  case Op::Columns:
    columns_facts(nd, f);
    break;
  case Op::Selector:
    selector_facts(nd, f);
    break;
  case Op::Powers: {
    f.infinite = Tri::Yes;
    f.upper = 0;
    SparseBound s;
    s.roots.push_back({nd.exponent, 1, 1});
    f.sparse = s;
    break;
  }
  case Op::Rect:
    rect_facts(nd, f);
    break;
  case Op::Image:
    f.infinite = Tri::Unknown;
    if (nd.args[1].facts().infinite != Tri::Unknown)
      f.infinite = nd.args[1].facts().infinite;
    break;
  case Op::Complement:
    complement_facts(nd.args[0].facts(), f);
    break;
  case Op::Union:
    union_facts(nd.args[0].facts(), nd.args[1].facts(), f);
    break;
  case Op::Intersection:
    intersection_facts(nd.args[0], nd.args[1], f);
    break;
  case Op::Difference: {
    SetFacts comp;
    complement_facts(nd.args[1].facts(), comp);
    const SetFacts& fa = nd.args[0].facts();
    f.lower = std::max(Rational(0), Rational(fa.lower + comp.lower - 1));
    f.upper = std::min(fa.upper, comp.upper);
    if (fa.sparse)
      f.sparse = fa.sparse;
    else if (comp.sparse)
      f.sparse = comp.sparse;
    if (fa.cosparse && comp.cosparse)
      f.cosparse = *fa.cosparse + *comp.cosparse;
    if (fa.infinite == Tri::No)
      f.infinite = Tri::No;
    else if (fa.infinite == Tri::Yes && nd.args[1].facts().infinite == Tri::No)
      f.infinite = Tri::Yes;
    else if (f.lower > 0)
      f.infinite = Tri::Yes;
    else if (fa.infinite == Tri::Yes && comp.cosparse)
      f.infinite = Tri::Yes;
    if (provably_subset(nd.args[0], nd.args[1])) {
      f.infinite = Tri::No;
      f.upper = 0;
      f.sparse = SparseBound{};
    }
    break;
  }
  }

  // column structure
  switch (nd.op) {
  case Op::Finite:
  case Op::Progression:
  case Op::Periodic:
    if (f.normal)
      f.columns = profile_of_periodic(*f.normal);
    break;
  case Op::Columns:
    f.columns = profile_of_columns(nd);
    break;
  case Op::Rect:
    f.columns = profile_of_rect(nd);
    break;
  case Op::Image:
    f.columns = profile_of_image(nd);
    break;
  case Op::Complement:
    if (const auto& p = nd.args[0].facts().columns)
      f.columns = complement_profile(*p);
    break;
  case Op::Union:
  case Op::Intersection:
  case Op::Difference: {
    const auto& pa = nd.args[0].facts().columns;
    const auto& pb = nd.args[1].facts().columns;
    if (pa && pb) {
      BoolOp op = nd.op == Op::Union          ? BoolOp::Union
                  : nd.op == Op::Intersection ? BoolOp::Intersection
                                              : BoolOp::Difference;
      f.columns = combine_profiles(*pa, *pb, op);
    }
    break;
  }
  default:
    break;
  }

  // exact information from the normal form wins
  if (f.normal) {
    const auto& ep = *f.normal;
    f.infinite = tri(!ep.is_finite());
    f.lower = f.upper = ep.density();
    if (ep.is_finite())
      f.sparse = SparseBound{ones(ep.prefix()), 0, {}};
    if (ep.is_cofinite())
      f.cosparse = SparseBound{ep.prefix().size() - ones(ep.prefix()), 0, {}};
  }
  if (f.sparse)
    f.upper = 0;
  if (f.cosparse)
    f.lower = 1;
  if (f.lower > 0)
    f.infinite = Tri::Yes;
  if (f.columns && f.infinite == Tri::Unknown) {
    Tri some = f.columns->some_infinite();
    if (some == Tri::Yes)
      f.infinite = Tri::Yes;
  }
  return f;
}

} // namespace filterlab
