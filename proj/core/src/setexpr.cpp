#include <algorithm>
#include <numeric>

#include "internal.hpp"

namespace filterlab {

namespace {

using Op = SetExpr::Op;

std::string_view select_rule_name(SelectRule r) {
  switch (r) {
  case SelectRule::Min:
    return "min";
  case SelectRule::Max:
    return "max";
  case SelectRule::Nth:
    return "nth";
  }
  return "min";
}

SelectRule select_rule_from(std::string_view s) {
  if (s == "min")
    return SelectRule::Min;
  if (s == "max")
    return SelectRule::Max;
  if (s == "nth")
    return SelectRule::Nth;
  throw Error("invalid-set", "unknown selector rule '" + std::string(s) + "'");
}

/// Position (value or rank) chosen from [lo, hi], if any.
std::optional<Nat> chosen(SelectRule rule, Nat nth, Nat lo, Nat hi) {
  switch (rule) {
  case SelectRule::Min:
    return lo;
  case SelectRule::Max:
    return hi;
  case SelectRule::Nth:
    if (hi - lo + 1 >= nth)
      return lo + nth - 1;
    return std::nullopt;
  }
  return std::nullopt;
}

} // namespace

// ---------------------------------------------------------------------------
// Construction

SetExpr SetExpr::make(Node node) {
  node.facts = compute_facts(node);
  return SetExpr(std::make_shared<const Node>(std::move(node)));
}

SetExpr SetExpr::finite(std::vector<Nat> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  if (!elements.empty() && elements.front() == 0)
    throw Error("invalid-set", "0 is not a natural number here; sets live in {1, 2, ...}");
  Node n;
  n.op = Op::Finite;
  n.elements = std::move(elements);
  return make(std::move(n));
}

SetExpr SetExpr::progression(Nat first, Nat step) {
  if (step == 0)
    throw Error("invalid-set", "progression step must be >= 1");
  Node n;
  n.op = Op::Progression;
  n.first = first;
  n.step = step;
  return make(std::move(n));
}

SetExpr SetExpr::periodic(EventuallyPeriodic ep) {
  Node n;
  n.op = Op::Periodic;
  n.ep = std::move(ep);
  return make(std::move(n));
}

SetExpr SetExpr::periodic(std::string_view prefix, std::string_view period) {
  return periodic(EventuallyPeriodic::parse(prefix, period));
}

SetExpr SetExpr::columns(const SetExpr& which, ColumnRule rule, std::map<Nat, ColumnRule> overrides) {
  if (!which.facts().normal)
    throw Error("invalid-set", "the column index set of a column set must be eventually periodic");
  if (overrides.count(0))
    throw Error("invalid-set", "columns are numbered from 1");
  Node n;
  n.op = Op::Columns;
  n.args = {which};
  n.rule = std::move(rule);
  n.overrides = std::move(overrides);
  return make(std::move(n));
}

SetExpr SetExpr::selector(Blocking blocking, SelectRule rule, Nat nth) {
  if (rule == SelectRule::Nth && nth == 0)
    throw Error("invalid-set", "nth selector is 1-based");
  Node n;
  n.op = Op::Selector;
  n.blocking = std::move(blocking);
  n.select = rule;
  n.nth = rule == SelectRule::Nth ? nth : 1;
  return make(std::move(n));
}

SetExpr SetExpr::powers(unsigned exponent) {
  if (exponent < 2 || exponent > 8)
    throw Error("invalid-set", "power sets need an exponent between 2 and 8");
  Node n;
  n.op = Op::Powers;
  n.exponent = exponent;
  return make(std::move(n));
}

SetExpr SetExpr::rect(const SetExpr& rows, const SetExpr& cols) {
  if (!rows.facts().normal || !cols.facts().normal)
    throw Error("invalid-set", "rectangle factors must be eventually periodic");
  Node n;
  n.op = Op::Rect;
  n.args = {rows, cols};
  return make(std::move(n));
}

SetExpr SetExpr::image(const SetExpr& standard, const SetExpr& source) {
  Node n;
  n.op = Op::Image;
  n.map = std::make_shared<const StandardMap>(standard);
  n.args = {standard, source};
  return make(std::move(n));
}

SetExpr SetExpr::all() { return periodic("", "1"); }
SetExpr SetExpr::empty() { return periodic("", "0"); }
SetExpr SetExpr::tail(Nat k) { return progression(k + 1, 1); }
SetExpr SetExpr::column(Nat c) { return columns(finite({c}), ColumnRule::cofinite()); }

SetExpr operator~(const SetExpr& a) {
  // complements are pushed down to the generators
  switch (a.op()) {
  case Op::Complement:
    return a.args()[0];
  case Op::Union:
    return ~a.args()[0] & ~a.args()[1];
  case Op::Intersection:
    return ~a.args()[0] | ~a.args()[1];
  case Op::Difference:
    return ~a.args()[0] | a.args()[1];
  default:
    break;
  }
  SetExpr::Node n;
  n.op = Op::Complement;
  n.args = {a};
  return SetExpr::make(std::move(n));
}

namespace {
SetExpr::Node binary(Op op, const SetExpr& a, const SetExpr& b) {
  SetExpr::Node n;
  n.op = op;
  n.args = {a, b};
  return n;
}
} // namespace

SetExpr operator|(const SetExpr& a, const SetExpr& b) { return SetExpr::make(binary(Op::Union, a, b)); }
SetExpr operator&(const SetExpr& a, const SetExpr& b) {
  return SetExpr::make(binary(Op::Intersection, a, b));
}
SetExpr operator-(const SetExpr& a, const SetExpr& b) {
  return SetExpr::make(binary(Op::Difference, a, b));
}

// ---------------------------------------------------------------------------
// Accessors

SetExpr::Op SetExpr::op() const { return node_->op; }
const SetFacts& SetExpr::facts() const { return node_->facts; }
const std::vector<SetExpr>& SetExpr::args() const { return node_->args; }
const std::vector<Nat>& SetExpr::elements() const { return node_->elements; }
Nat SetExpr::first() const { return node_->first; }
Nat SetExpr::step() const { return node_->step; }
const EventuallyPeriodic& SetExpr::periodic_form() const { return *node_->ep; }
const ColumnRule& SetExpr::rule() const { return node_->rule; }
const std::map<Nat, ColumnRule>& SetExpr::overrides() const { return node_->overrides; }
const Blocking& SetExpr::blocking() const { return *node_->blocking; }
SelectRule SetExpr::select_rule() const { return node_->select; }
Nat SetExpr::nth() const { return node_->nth; }
unsigned SetExpr::exponent() const { return node_->exponent; }
const StandardMap& SetExpr::standard_map() const { return *node_->map; }

// ---------------------------------------------------------------------------
// Membership

namespace {

bool selector_contains(const SetExpr& s, Nat n) {
  const Blocking& b = s.blocking();
  auto k = b.piece_of(n);
  if (!k)
    return false;
  auto [lo, hi] = b.bounds(*k);
  switch (b.kind()) {
  case Blocking::Kind::Dyadic:
  case Blocking::Kind::Explicit:
    return chosen(s.select_rule(), s.nth(), lo, hi) == n;
  case Blocking::Kind::Derived:
    return chosen(s.select_rule(), s.nth(), lo, hi) == counting(b.ground(), n);
  case Blocking::Kind::Restricted: {
    const SetExpr g = b.ground();
    switch (s.select_rule()) {
    case SelectRule::Min:
      for (Nat m = lo; m < n; ++m)
        if (g.contains(m))
          return false;
      return true;
    case SelectRule::Max:
      for (Nat m = n + 1; m <= hi; ++m)
        if (g.contains(m))
          return false;
      return true;
    case SelectRule::Nth: {
      Nat c = 0;
      for (Nat m = lo; m <= n; ++m)
        c += g.contains(m) ? 1 : 0;
      return c == s.nth();
    }
    }
  }
  }
  return false;
}

} // namespace

bool SetExpr::contains(Nat n) const {
  if (n == 0)
    return false;
  const Node& nd = *node_;
  if (nd.facts.normal && nd.op != Op::Periodic)
    return nd.facts.normal->contains(n);
  switch (nd.op) {
  case Op::Finite:
    return std::binary_search(nd.elements.begin(), nd.elements.end(), n);
  case Op::Progression:
    return n >= std::max<Nat>(nd.first, 1) && n % nd.step == nd.first % nd.step;
  case Op::Periodic:
    return nd.ep->contains(n);
  case Op::Columns: {
    Cell cell = unpair(n);
    auto it = nd.overrides.find(cell.column);
    if (it != nd.overrides.end())
      return it->second.contains(cell.row);
    return nd.args[0].contains(cell.column) && nd.rule.contains(cell.row);
  }
  case Op::Selector:
    return selector_contains(*this, n);
  case Op::Powers: {
    Nat r = iroot(n, nd.exponent);
    Nat p = 1;
    for (unsigned i = 0; i < nd.exponent; ++i)
      p *= r;
    return p == n;
  }
  case Op::Rect: {
    Cell cell = unpair(n);
    return nd.args[0].contains(cell.row) && nd.args[1].contains(cell.column);
  }
  case Op::Image: {
    auto m = nd.map->inverse(n);
    return m && nd.args[1].contains(*m);
  }
  case Op::Complement:
    return !nd.args[0].contains(n);
  case Op::Union:
    return nd.args[0].contains(n) || nd.args[1].contains(n);
  case Op::Intersection:
    return nd.args[0].contains(n) && nd.args[1].contains(n);
  case Op::Difference:
    return nd.args[0].contains(n) && !nd.args[1].contains(n);
  }
  return false;
}

bool member(const SetExpr& s, Nat n) { return s.contains(n); }

// ---------------------------------------------------------------------------
// Materialization and counting

namespace {

void materialize_selector(const SetExpr& s, Nat limit, std::vector<bool>& out) {
  const Blocking& b = s.blocking();
  const SelectRule rule = s.select_rule();
  const Nat nth = s.nth();
  switch (b.kind()) {
  case Blocking::Kind::Dyadic:
  case Blocking::Kind::Explicit:
    for (Nat k = 1;; ++k) {
      auto [lo, hi] = b.bounds(k);
      if (lo > limit)
        break;
      auto pos = chosen(rule, nth, lo, hi);
      if (pos && *pos <= limit)
        out[*pos] = true;
    }
    break;
  case Blocking::Kind::Derived: {
    const auto g = materialize(b.ground(), limit);
    const Blocking& base = b.base();
    Nat rank = 0;
    for (Nat n = 1; n <= limit; ++n) {
      if (!g[n])
        continue;
      ++rank;
      auto k = *base.piece_of(rank);
      auto [lo, hi] = base.bounds(k);
      if (chosen(rule, nth, lo, hi) == rank)
        out[n] = true;
    }
    break;
  }
  case Blocking::Kind::Restricted: {
    const auto g = materialize(b.ground(), limit);
    for (Nat k = 1;; ++k) {
      auto [lo, hi] = b.bounds(k);
      if (lo > limit)
        break;
      std::vector<Nat> members;
      for (Nat n = lo; n <= hi; ++n) {
        bool in = n <= limit ? static_cast<bool>(g[n]) : b.ground().contains(n);
        if (in)
          members.push_back(n);
        if (rule == SelectRule::Min && !members.empty())
          break;
        if (rule == SelectRule::Nth && members.size() >= nth)
          break;
      }
      if (members.empty())
        continue;
      std::optional<Nat> pick;
      if (rule == SelectRule::Min)
        pick = members.front();
      else if (rule == SelectRule::Max)
        pick = members.back();
      else if (members.size() >= nth)
        pick = members[nth - 1];
      if (pick && *pick <= limit)
        out[*pick] = true;
    }
    break;
  }
  }
}

} // namespace

std::vector<bool> materialize(const SetExpr& s, Nat limit) {
  std::vector<bool> out(limit + 1, false);
  const SetFacts& f = s.facts();
  if (f.normal) {
    for (Nat n = 1; n <= limit; ++n)
      out[n] = f.normal->contains(n);
    return out;
  }
  switch (s.op()) {
  case Op::Finite:
    for (Nat e : s.elements())
      if (e <= limit)
        out[e] = true;
    return out;
  case Op::Selector:
    materialize_selector(s, limit, out);
    return out;
  case Op::Powers:
    for (Nat m = 1;; ++m) {
      Nat p = 1;
      bool over = false;
      for (unsigned i = 0; i < s.exponent() && !over; ++i) {
        if (p > limit / m)
          over = true;
        p *= m;
      }
      if (over || p > limit)
        break;
      out[p] = true;
    }
    return out;
  case Op::Image: {
    const auto& map = s.standard_map();
    const auto j = materialize(s.args()[0], limit);
    const auto src = materialize(s.args()[1], limit);
    std::map<Nat, Nat> rows_seen;
    for (Nat n = 1; n <= limit; ++n) {
      if (!j[n])
        continue;
      Cell cell = unpair(n);
      if (!map.column_used(cell.column))
        continue;
      Nat rho = ++rows_seen[cell.column];
      Nat m = pair_index(rho, map.column_rank(cell.column));
      out[n] = src[m];
    }
    return out;
  }
  case Op::Columns: {
    // walk the anti-diagonals; column c of diagonal d holds row d + 2 - c
    std::vector<signed char> column_in; // -1 unknown
    for (Nat d = 0, base = 0; base < limit; ++d, base += d) {
      for (Nat c = 1; c <= d + 1 && base + c <= limit; ++c) {
        if (column_in.size() <= c)
          column_in.resize(c + 1, -1);
        if (column_in[c] < 0)
          column_in[c] = s.overrides().count(c) ? 2 : (s.args()[0].contains(c) ? 1 : 0);
        const Nat row = d + 2 - c;
        if (column_in[c] == 2)
          out[base + c] = s.overrides().at(c).contains(row);
        else
          out[base + c] = column_in[c] == 1 && s.rule().contains(row);
      }
    }
    return out;
  }
  case Op::Complement: {
    auto a = materialize(s.args()[0], limit);
    for (Nat n = 1; n <= limit; ++n)
      out[n] = !a[n];
    return out;
  }
  case Op::Union:
  case Op::Intersection:
  case Op::Difference: {
    auto a = materialize(s.args()[0], limit);
    auto b = materialize(s.args()[1], limit);
    for (Nat n = 1; n <= limit; ++n) {
      if (s.op() == Op::Union)
        out[n] = a[n] || b[n];
      else if (s.op() == Op::Intersection)
        out[n] = a[n] && b[n];
      else
        out[n] = a[n] && !b[n];
    }
    return out;
  }
  default:
    for (Nat n = 1; n <= limit; ++n)
      out[n] = s.contains(n);
    return out;
  }
}

Nat counting(const SetExpr& s, Nat n) {
  const SetFacts& f = s.facts();
  if (f.normal)
    return f.normal->count_upto(n);
  switch (s.op()) {
  case Op::Finite: {
    const auto& e = s.elements();
    return static_cast<Nat>(std::upper_bound(e.begin(), e.end(), n) - e.begin());
  }
  case Op::Progression: {
    Nat start = s.first() == 0 ? s.step() : s.first();
    return n < start ? 0 : (n - start) / s.step() + 1;
  }
  case Op::Powers:
    return iroot(n, s.exponent());
  case Op::Complement:
    return n - counting(s.args()[0], n);
  case Op::Selector: {
    const Blocking& b = s.blocking();
    if (b.is_interval() && s.select_rule() != SelectRule::Nth && n > 0) {
      Nat k = *b.piece_of(n);
      auto [lo, hi] = b.bounds(k);
      if (s.select_rule() == SelectRule::Min)
        return k;
      return hi <= n ? k : k - 1;
    }
    break;
  }
  default:
    break;
  }
  auto bits = materialize(s, n);
  return static_cast<Nat>(std::count(bits.begin(), bits.end(), true));
}

std::vector<Nat> enumerate(const SetExpr& s, Nat limit) {
  std::vector<Nat> out;
  if (s.op() == Op::Finite) {
    for (Nat e : s.elements())
      if (e <= limit)
        out.push_back(e);
    return out;
  }
  auto bits = materialize(s, limit);
  for (Nat n = 1; n <= limit; ++n)
    if (bits[n])
      out.push_back(n);
  return out;
}

std::optional<Nat> select(const SetExpr& s, Nat rank, Nat limit) {
  if (rank == 0)
    return std::nullopt;
  const SetFacts& f = s.facts();
  if (f.normal) {
    const auto& ep = *f.normal;
    if (ep.is_finite() && ep.count_upto(ep.prefix().size()) < rank)
      return std::nullopt;
    Nat hi = 1;
    while (ep.count_upto(hi) < rank) {
      if (hi > limit)
        return std::nullopt;
      hi *= 2;
    }
    Nat lo = 1;
    while (lo < hi) {
      Nat mid = lo + (hi - lo) / 2;
      if (ep.count_upto(mid) >= rank)
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo <= limit ? std::optional<Nat>(lo) : std::nullopt;
  }
  if (s.op() == Op::Finite) {
    const auto& e = s.elements();
    if (rank > e.size() || e[rank - 1] > limit)
      return std::nullopt;
    return e[rank - 1];
  }
  // doubling window keeps materialization proportional to the answer
  for (Nat window = 1024;; window *= 2) {
    Nat w = std::min(window, limit);
    auto bits = materialize(s, w);
    Nat c = 0;
    for (Nat n = 1; n <= w; ++n)
      if (bits[n] && ++c == rank)
        return n;
    if (w == limit)
      return std::nullopt;
  }
}

std::optional<EventuallyPeriodic> normalize(const SetExpr& s) { return s.facts().normal; }

bool provably_subset(const SetExpr& a, const SetExpr& b) {
  const SetFacts& fa = a.facts();
  const SetFacts& fb = b.facts();
  if (fb.normal && fb.normal->is_all())
    return true;
  if (fa.normal && fa.normal->is_empty())
    return true;
  if (fa.normal && fb.normal) {
    auto d = combine(*fa.normal, *fb.normal, BoolOp::Difference);
    if (d)
      return d->is_empty();
  }
  if (a.key() == b.key())
    return true;
  switch (a.op()) {
  case Op::Selector: {
    const Blocking& bl = a.blocking();
    if (!bl.is_interval() && provably_subset(bl.ground(), b))
      return true;
    break;
  }
  case Op::Intersection:
    if (provably_subset(a.args()[0], b) || provably_subset(a.args()[1], b))
      return true;
    break;
  case Op::Difference:
    if (provably_subset(a.args()[0], b))
      return true;
    break;
  case Op::Union:
    return provably_subset(a.args()[0], b) && provably_subset(a.args()[1], b);
  case Op::Image:
    if (provably_subset(a.args()[0], b))
      return true;
    break;
  default:
    break;
  }
  switch (b.op()) {
  case Op::Union:
    return provably_subset(a, b.args()[0]) || provably_subset(a, b.args()[1]);
  case Op::Intersection:
    return provably_subset(a, b.args()[0]) && provably_subset(a, b.args()[1]);
  default:
    break;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Density

json DensityReport::to_json() const {
  json j = {{"upper", filterlab::to_string(upper)},
            {"lower", filterlab::to_string(lower)},
            {"exact", exact},
            {"horizon", horizon},
            {"certifiedLower", filterlab::to_string(certified_lower)},
            {"certifiedUpper", filterlab::to_string(certified_upper)}};
  j["value"] = value ? json(filterlab::to_string(*value)) : json(nullptr);
  return j;
}

DensityReport density(const SetExpr& s, Nat horizon) {
  if (horizon == 0)
    throw Error("invalid-argument", "density needs a positive horizon");
  DensityReport r;
  r.horizon = horizon;
  const SetFacts& f = s.facts();
  r.certified_lower = f.lower;
  r.certified_upper = f.upper;
  if (f.normal) {
    r.exact = true;
    r.value = f.normal->density();
  }
  const Rational q = rational(static_cast<long>(counting(s, horizon)), horizon);
  r.upper = q;
  r.lower = q;
  return r;
}

// ---------------------------------------------------------------------------
// JSON

json SetExpr::to_json() const {
  const Node& nd = *node_;
  switch (nd.op) {
  case Op::Finite:
    return {{"gen", "finite"}, {"elems", nd.elements}};
  case Op::Progression:
    return {{"gen", "ap"}, {"first", nd.first}, {"step", nd.step}};
  case Op::Periodic:
    return {{"gen", "ep"}, {"prefix", nd.ep->prefix_string()}, {"period", nd.ep->period_string()}};
  case Op::Columns: {
    json ov = json::array();
    for (const auto& [c, r] : nd.overrides)
      ov.push_back({{"column", c}, {"rule", r.to_json()}});
    return {{"gen", "colset"}, {"columns", nd.args[0].to_json()}, {"rule", nd.rule.to_json()},
            {"overrides", ov}};
  }
  case Op::Selector: {
    json j = {{"gen", "selector"}, {"blocking", nd.blocking->to_json()},
              {"rule", select_rule_name(nd.select)}};
    if (nd.select == SelectRule::Nth)
      j["nth"] = nd.nth;
    return j;
  }
  case Op::Powers:
    return {{"gen", "powers"}, {"exponent", nd.exponent}};
  case Op::Rect:
    return {{"gen", "rect"}, {"rows", nd.args[0].to_json()}, {"cols", nd.args[1].to_json()}};
  case Op::Image:
    return {{"gen", "image"}, {"standard", nd.args[0].to_json()}, {"source", nd.args[1].to_json()}};
  case Op::Complement:
    return {{"op", "compl"}, {"args", {nd.args[0].to_json()}}};
  case Op::Union:
  case Op::Intersection:
  case Op::Difference: {
    std::string name = nd.op == Op::Union ? "union" : nd.op == Op::Intersection ? "inter" : "diff";
    return {{"op", name}, {"args", {nd.args[0].to_json(), nd.args[1].to_json()}}};
  }
  }
  return nullptr;
}

SetExpr SetExpr::from_json(const json& j) {
  if (!j.is_object())
    throw Error("invalid-set", "set expressions are JSON objects");
  if (j.contains("op")) {
    const std::string op = j.at("op").get<std::string>();
    const json& args = j.at("args");
    if (!args.is_array() || args.empty())
      throw Error("invalid-set", "operator '" + op + "' needs arguments");
    std::vector<SetExpr> parts;
    for (const auto& a : args)
      parts.push_back(from_json(a));
    if (op == "compl") {
      if (parts.size() != 1)
        throw Error("invalid-set", "complement takes one argument");
      return ~parts[0];
    }
    if (op == "diff") {
      if (parts.size() != 2)
        throw Error("invalid-set", "difference takes two arguments");
      return parts[0] - parts[1];
    }
    if (op != "union" && op != "inter")
      throw Error("invalid-set", "unknown set operator '" + op + "'");
    SetExpr acc = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i)
      acc = op == "union" ? (acc | parts[i]) : (acc & parts[i]);
    return acc;
  }
  const std::string gen = j.at("gen").get<std::string>();
  if (gen == "finite")
    return finite(j.at("elems").get<std::vector<Nat>>());
  if (gen == "ap")
    return progression(j.at("first").get<Nat>(), j.at("step").get<Nat>());
  if (gen == "ep")
    return periodic(j.at("prefix").get<std::string>(), j.at("period").get<std::string>());
  if (gen == "colset") {
    std::map<Nat, ColumnRule> ov;
    for (const auto& o : j.value("overrides", json::array()))
      ov[o.at("column").get<Nat>()] = ColumnRule::from_json(o.at("rule"));
    ColumnRule rule = j.contains("rule") ? ColumnRule::from_json(j.at("rule")) : ColumnRule::cofinite();
    return columns(from_json(j.at("columns")), rule, std::move(ov));
  }
  if (gen == "selector")
    return selector(Blocking::from_json(j.at("blocking")),
                    select_rule_from(j.value("rule", std::string("min"))), j.value("nth", Nat{1}));
  if (gen == "powers")
    return powers(j.value("exponent", 2u));
  if (gen == "rect")
    return rect(from_json(j.at("rows")), from_json(j.at("cols")));
  if (gen == "image")
    return image(from_json(j.at("standard")), from_json(j.at("source")));
  throw Error("invalid-set", "unknown set generator '" + gen + "'");
}

// ---------------------------------------------------------------------------
// Standard sets

StandardMap::StandardMap(SetExpr standard, Nat check_limit) : standard_(std::move(standard)) {
  const auto& prof = standard_.facts().columns;
  if (!prof)
    throw Error("invalid-argument", "a standard set needs a known column structure");
  profile_ = *prof;
  for (const auto* part : {&profile_.prefix, &profile_.period})
    for (const auto& c : *part)
      if (c.infinite == Tri::Unknown)
        throw Error("invalid-argument", "cannot decide which columns the set meets infinitely");
  if (profile_.infinitely_many_infinite() != Tri::Yes)
    throw Error("invalid-argument", "a standard set meets infinitely many columns infinitely");
  used_counts_prefix_.assign(profile_.prefix.size() + 1, 0);
  for (std::size_t i = 0; i < profile_.prefix.size(); ++i)
    used_counts_prefix_[i + 1] = used_counts_prefix_[i] + (profile_.prefix[i].infinite == Tri::Yes);
  for (const auto& c : profile_.period)
    used_per_period_ += c.infinite == Tri::Yes ? 1 : 0;
  const auto bits = materialize(standard_, check_limit);
  for (Nat n = 1; n <= check_limit; ++n) {
    if (!bits[n])
      continue;
    Nat c = unpair(n).column;
    if (!column_used(c))
      throw Error("invalid-argument", "set is not standard: column " + std::to_string(c) +
                                          " meets it in a non-empty finite set");
  }
}

bool StandardMap::column_used(Nat column) const { return profile_.at(column).infinite == Tri::Yes; }

Nat StandardMap::column_rank(Nat column) const {
  const Nat pre = profile_.prefix.size();
  if (column <= pre)
    return used_counts_prefix_[column];
  const Nat len = profile_.period.size();
  Nat rest = column - pre;
  Nat full = rest / len, part = rest % len;
  Nat count = used_counts_prefix_[pre] + full * used_per_period_;
  for (Nat i = 0; i < part; ++i)
    count += profile_.period[i].infinite == Tri::Yes ? 1 : 0;
  return count;
}

Nat StandardMap::column_at(Nat rank) const {
  if (rank == 0)
    throw Error("invalid-argument", "column ranks are 1-based");
  const Nat pre = profile_.prefix.size();
  if (rank <= used_counts_prefix_[pre]) {
    for (Nat c = 1; c <= pre; ++c)
      if (used_counts_prefix_[c] == rank)
        return c;
  }
  Nat rem = rank - used_counts_prefix_[pre];
  Nat full = (rem - 1) / used_per_period_;
  Nat idx = (rem - 1) % used_per_period_;
  const Nat len = profile_.period.size();
  for (Nat i = 0; i < len; ++i) {
    if (profile_.period[i].infinite != Tri::Yes)
      continue;
    if (idx == 0)
      return pre + full * len + i + 1;
    --idx;
  }
  throw Error("internal", "column_at out of range");
}

Nat StandardMap::forward(Nat n) const {
  Cell cell = unpair(n);
  Nat c = column_at(cell.column);
  Nat seen = 0;
  for (Nat r = 1;; ++r) {
    Nat m = pair_index(r, c);
    if (standard_.contains(m) && ++seen == cell.row)
      return m;
  }
}

std::optional<Nat> StandardMap::inverse(Nat n) const {
  if (n == 0 || !standard_.contains(n))
    return std::nullopt;
  Cell cell = unpair(n);
  if (!column_used(cell.column))
    return std::nullopt;
  Nat rho = 0;
  for (Nat r = 1; r <= cell.row; ++r)
    rho += standard_.contains(pair_index(r, cell.column)) ? 1 : 0;
  return pair_index(rho, column_rank(cell.column));
}

} // namespace filterlab
