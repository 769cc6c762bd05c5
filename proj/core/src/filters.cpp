#include <algorithm>

#include "filterlab/filters.hpp"

namespace filterlab {

struct FilterHandle::Impl {
  Kind kind = Kind::Frechet;
  std::vector<SetExpr> base; // CountableBase; empty means tails
  std::optional<FilterHandle> f1, f2;
  std::optional<SetExpr> s1, s2; // Trace: s1 = I; Sum: N1, N2
};

namespace {

using Kind = FilterHandle::Kind;

json eval_counting(const SetExpr& s, Nat n) {
  return {{"fn", "counting"}, {"set", s.to_json()}, {"n", n}};
}

Rational nat_q(Nat n) { return from_nat(n); }

/// A ∪ (N \ I), with s(B) ∪ (N \ J) rewritten as N \ s(N \ B).
SetExpr extend_outside(const SetExpr& a, const SetExpr& I) {
  if (a.op() == SetExpr::Op::Image && a.args()[0].key() == I.key())
    return ~SetExpr::image(I, ~a.args()[1]);
  return a | ~I;
}

Verdict frechet_contains(const SetExpr& a, Nat horizon) {
  const SetExpr c = ~a;
  const SetFacts& f = c.facts();
  json cert{{"filter", "frechet"}, {"complement", c.to_json()}};
  if (f.infinite == Tri::No) {
    cert["kind"] = "finite-complement";
    if (f.sparse) {
      cert["bound"] = f.sparse->to_json();
      Nat h = std::max<Nat>(horizon, 1);
      cert["checks"] = {inequality("complement-count", nat_q(counting(c, h)), "<=",
                                   nat_q(f.sparse->eval(h)), eval_counting(c, h))};
    }
    return Verdict::proved(cert, horizon);
  }
  if (f.infinite == Tri::Yes) {
    cert["kind"] = "infinite-complement";
    return Verdict::refuted(cert, horizon);
  }
  cert["kind"] = "undecided";
  cert["complementCount"] = counting(c, horizon);
  return Verdict::consistent(cert, horizon);
}

Verdict statistical_contains(const SetExpr& a, Nat horizon) {
  const SetExpr c = ~a;
  const SetFacts& f = c.facts();
  const Nat h = std::max<Nat>(horizon, 1);
  json cert{{"filter", "statistical"}, {"complement", c.to_json()}};
  if (f.upper == 0) {
    cert["kind"] = "null-complement";
    if (f.sparse) {
      const Nat bound = f.sparse->eval(h);
      cert["bound"] = f.sparse->to_json();
      cert["checks"] = {
          inequality("complement-count", nat_q(counting(c, h)), "<=", nat_q(bound), eval_counting(c, h)),
          inequality("density-bound", Rational(nat_q(bound) / nat_q(h)), "<=", 1)};
    } else {
      cert["density"] = "0";
    }
    return Verdict::proved(cert, horizon);
  }
  if (f.lower > 0) {
    cert["kind"] = "positive-density-complement";
    cert["densityLowerBound"] = to_string(f.lower);
    if (f.normal)
      cert["density"] = to_string(f.normal->density());
    return Verdict::refuted(cert, horizon);
  }
  cert["kind"] = "undecided";
  cert["density"] = density(c, h).to_json();
  return Verdict::consistent(cert, horizon);
}

Verdict countable_base_contains(const FilterHandle& fh, const SetExpr& a, Nat horizon) {
  const SetExpr rest = fh.base_tail() - a;
  const SetFacts& f = rest.facts();
  json cert{{"filter", fh.name()}, {"baseMinusSet", rest.to_json()}};
  if (f.infinite == Tri::No) {
    cert["kind"] = "base-containment";
    cert["reason"] = "only finitely many base points are missing, so a later base set is contained";
    return Verdict::proved(cert, horizon);
  }
  if (f.infinite == Tri::Yes) {
    cert["kind"] = "base-escape";
    cert["reason"] = "infinitely many points of every base set are missing";
    return Verdict::refuted(cert, horizon);
  }
  cert["kind"] = "undecided";
  cert["missingCount"] = counting(rest, horizon);
  return Verdict::consistent(cert, horizon);
}

Verdict column_contains(bool tails, const SetExpr& a, Nat horizon) {
  json cert{{"filter", tails ? "columnFD" : "columnFd"}, {"set", a.to_json()}};
  const auto& prof = a.facts().columns;
  if (!prof) {
    cert["kind"] = "undecided";
    cert["reason"] = "column structure of the set is not known";
    return Verdict::consistent(cert, horizon);
  }
  const Nat pre = prof->prefix.size(), len = prof->period.size();
  cert["columnPrefix"] = pre;
  cert["columnPeriod"] = len;
  auto find_coinfinite = [&](const std::vector<ColumnContent>& part, Nat offset) -> std::optional<Nat> {
    for (Nat i = 0; i < part.size(); ++i)
      if (part[i].coinfinite == Tri::Yes)
        return offset + i + 1;
    return std::nullopt;
  };
  const Tri ok = tails ? prof->almost_all_cofinite() : prof->all_cofinite();
  if (ok == Tri::Yes) {
    cert["kind"] = "column-base-containment";
    cert["fromColumn"] = tails ? pre + 1 : 1;
    return Verdict::proved(cert, horizon);
  }
  if (ok == Tri::No) {
    auto col = find_coinfinite(prof->period, pre);
    if (!col && !tails)
      col = find_coinfinite(prof->prefix, 0);
    cert["kind"] = tails ? "infinitely-many-coinfinite-columns" : "coinfinite-column";
    cert["column"] = *col;
    return Verdict::refuted(cert, horizon);
  }
  cert["kind"] = "undecided";
  return Verdict::consistent(cert, horizon);
}

std::optional<std::pair<SetExpr, SetExpr>> as_rect(const SetExpr& a) {
  if (a.op() == SetExpr::Op::Rect)
    return std::make_pair(a.args()[0], a.args()[1]);
  if (a.facts().normal && a.facts().normal->is_all())
    return std::make_pair(SetExpr::all(), SetExpr::all());
  if (a.op() == SetExpr::Op::Intersection) {
    auto x = as_rect(a.args()[0]);
    auto y = as_rect(a.args()[1]);
    if (x && y)
      return std::make_pair(x->first & y->first, x->second & y->second);
  }
  return std::nullopt;
}

Verdict product_contains(const FilterHandle& fh, const SetExpr& a, Nat horizon) {
  const FilterHandle& f1 = fh.part(0);
  const FilterHandle& f2 = fh.part(1);
  if (auto r = as_rect(a)) {
    const auto& rows = r->first;
    const auto& cols = r->second;
    if (rows.facts().normal->is_empty() || cols.facts().normal->is_empty())
      return Verdict::refuted({{"kind", "empty-rectangle"}, {"set", a.to_json()}}, horizon);
    return verdict_all({contains(f1, rows, horizon), contains(f2, cols, horizon)},
                       "a rectangle is a member iff both sides are members", horizon);
  }
  if (a.facts().normal && a.facts().normal->is_cofinite()) {
    const auto& ep = *a.facts().normal;
    Nat max_row = 0;
    for (Nat n = 1; n <= ep.prefix().size(); ++n)
      if (!ep.contains(n))
        max_row = std::max(max_row, unpair(n).row);
    return Verdict::proved({{"kind", "cofinite-contains-rectangle"},
                            {"rows", SetExpr::tail(max_row).to_json()},
                            {"cols", SetExpr::all().to_json()}},
                           horizon);
  }
  if (auto r = as_rect(~a)) {
    // A1 × A2 misses R × C iff A1 misses R or A2 misses C
    return verdict_any({contains(f1, ~r->first, horizon), contains(f2, ~r->second, horizon)},
                       "the complement is a rectangle", horizon);
  }
  return Verdict::consistent(
      {{"kind", "undecided"}, {"reason", "only rectangle expressions are decided"}}, horizon);
}

} // namespace

// ---------------------------------------------------------------------------

FilterHandle FilterHandle::frechet() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Frechet;
  return FilterHandle(impl);
}

FilterHandle FilterHandle::statistical() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Statistical;
  return FilterHandle(impl);
}

FilterHandle FilterHandle::countable_base_tails() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::CountableBase;
  return FilterHandle(impl);
}

FilterHandle FilterHandle::countable_base(std::vector<SetExpr> base) {
  if (base.empty())
    return countable_base_tails();
  for (std::size_t i = 1; i < base.size(); ++i) {
    const SetExpr extra = base[i] - base[i - 1];
    if (extra.facts().infinite == Tri::Yes || !enumerate(extra, 1 << 12).empty())
      throw Error("invalid-argument", "base sets must decrease (set " + std::to_string(i + 1) +
                                          " is not inside set " + std::to_string(i) + ")");
  }
  if (base.back().facts().infinite != Tri::Yes)
    throw Error("invalid-argument", "the last base set must be provably infinite");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::CountableBase;
  impl->base = std::move(base);
  return FilterHandle(impl);
}

FilterHandle FilterHandle::column_fd_tails() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::ColumnFD;
  return FilterHandle(impl);
}

FilterHandle FilterHandle::column_fd_all() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::ColumnFd;
  return FilterHandle(impl);
}

FilterHandle FilterHandle::trace(const FilterHandle& parent, const SetExpr& I) {
  Verdict st = is_stationary(parent, I, 1 << 12);
  if (st.is_refuted())
    throw Error("invalid-trace", "the trace set is not stationary for " + parent.name());
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Trace;
  impl->f1 = parent;
  impl->s1 = I;
  return FilterHandle(impl);
}

FilterHandle FilterHandle::sum(const FilterHandle& f1, const SetExpr& n1, const FilterHandle& f2,
                               const SetExpr& n2) {
  const SetExpr overlap = n1 & n2;
  if (overlap.facts().infinite == Tri::Yes || !enumerate(overlap, 1 << 14).empty())
    throw Error("invalid-argument", "the parts of a sum must be disjoint");
  for (const auto& [f, n] : {std::pair{&f1, &n1}, std::pair{&f2, &n2}})
    if (is_stationary(*f, *n, 1 << 12).is_refuted())
      throw Error("invalid-trace", "a part of a sum is not stationary for " + f->name());
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Sum;
  impl->f1 = f1;
  impl->f2 = f2;
  impl->s1 = n1;
  impl->s2 = n2;
  return FilterHandle(impl);
}

FilterHandle FilterHandle::product(const FilterHandle& f1, const FilterHandle& f2) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Product;
  impl->f1 = f1;
  impl->f2 = f2;
  return FilterHandle(impl);
}

FilterHandle::Kind FilterHandle::kind() const { return impl_->kind; }

std::string FilterHandle::name() const {
  switch (impl_->kind) {
  case Kind::Frechet:
    return "frechet";
  case Kind::Statistical:
    return "statistical";
  case Kind::CountableBase:
    return "countableBase";
  case Kind::ColumnFD:
    return "columnFD";
  case Kind::ColumnFd:
    return "columnFd";
  case Kind::Trace:
    return "trace(" + impl_->f1->name() + ")";
  case Kind::Sum:
    return "sum(" + impl_->f1->name() + "," + impl_->f2->name() + ")";
  case Kind::Product:
    return "product(" + impl_->f1->name() + "," + impl_->f2->name() + ")";
  }
  return "?";
}

const FilterHandle& FilterHandle::parent() const { return *impl_->f1; }
const SetExpr& FilterHandle::trace_set() const { return *impl_->s1; }
const FilterHandle& FilterHandle::part(int i) const { return i == 0 ? *impl_->f1 : *impl_->f2; }
const SetExpr& FilterHandle::part_set(int i) const { return i == 0 ? *impl_->s1 : *impl_->s2; }

SetExpr FilterHandle::base_set(Nat k) const {
  if (k == 0)
    throw Error("invalid-argument", "base sets are numbered from 1");
  const auto& b = impl_->base;
  if (b.empty())
    return SetExpr::tail(k);
  if (k <= b.size())
    return b[k - 1];
  return b.back() & SetExpr::tail(k);
}

const SetExpr& FilterHandle::base_tail() const {
  static const SetExpr all = SetExpr::all();
  return impl_->base.empty() ? all : impl_->base.back();
}

bool FilterHandle::tails_base() const { return impl_->base.empty(); }

json FilterHandle::to_json() const {
  switch (impl_->kind) {
  case Kind::CountableBase: {
    if (impl_->base.empty())
      return {{"kind", "countableBase"}, {"base", "tails"}};
    json list = json::array();
    for (const auto& s : impl_->base)
      list.push_back(s.to_json());
    return {{"kind", "countableBase"}, {"base", list}};
  }
  case Kind::ColumnFD:
  case Kind::ColumnFd:
    return {{"kind", name()}, {"pairing", "cantor-diagonal"}};
  case Kind::Trace:
    return {{"kind", "trace"}, {"parent", impl_->f1->to_json()}, {"I", impl_->s1->to_json()}};
  case Kind::Sum:
    return {{"kind", "sum"},
            {"F1", impl_->f1->to_json()},
            {"N1", impl_->s1->to_json()},
            {"F2", impl_->f2->to_json()},
            {"N2", impl_->s2->to_json()}};
  case Kind::Product:
    return {{"kind", "product"}, {"F1", impl_->f1->to_json()}, {"F2", impl_->f2->to_json()}};
  default:
    return {{"kind", name()}};
  }
}

FilterHandle FilterHandle::from_json(const json& j) {
  if (j.is_string())
    return from_name(j.get<std::string>());
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "countableBase") {
    const json& base = j.value("base", json("tails"));
    if (base.is_string()) {
      if (base.get<std::string>() != "tails")
        throw Error("invalid-argument", "unknown countable base '" + base.get<std::string>() + "'");
      return countable_base_tails();
    }
    std::vector<SetExpr> sets;
    for (const auto& s : base)
      sets.push_back(SetExpr::from_json(s));
    return countable_base(std::move(sets));
  }
  if (kind == "columnFD" || kind == "columnFd") {
    const std::string pairing = j.value("pairing", std::string("cantor-diagonal"));
    if (pairing != "cantor-diagonal")
      throw Error("invalid-argument", "only the cantor-diagonal pairing is available");
    return from_name(kind);
  }
  if (kind == "trace")
    return trace(from_json(j.at("parent")), SetExpr::from_json(j.at("I")));
  if (kind == "sum")
    return sum(from_json(j.at("F1")), SetExpr::from_json(j.at("N1")), from_json(j.at("F2")),
               SetExpr::from_json(j.at("N2")));
  if (kind == "product")
    return product(from_json(j.at("F1")), from_json(j.at("F2")));
  return from_name(kind);
}

FilterHandle FilterHandle::from_name(const std::string& name) {
  if (name == "frechet")
    return frechet();
  if (name == "statistical")
    return statistical();
  if (name == "countableBase")
    return countable_base_tails();
  if (name == "columnFD")
    return column_fd_tails();
  if (name == "columnFd")
    return column_fd_all();
  throw Error("invalid-argument", "unknown filter '" + name + "'");
}

// ---------------------------------------------------------------------------

Verdict contains(const FilterHandle& f, const SetExpr& a, Nat horizon) {
  switch (f.kind()) {
  case Kind::Frechet:
    return frechet_contains(a, horizon);
  case Kind::Statistical:
    return statistical_contains(a, horizon);
  case Kind::CountableBase:
    return countable_base_contains(f, a, horizon);
  case Kind::ColumnFD:
    return column_contains(true, a, horizon);
  case Kind::ColumnFd:
    return column_contains(false, a, horizon);
  case Kind::Trace:
    return contains(f.parent(), extend_outside(a, f.trace_set()), horizon);
  case Kind::Sum:
    return verdict_all({contains(f.part(0), extend_outside(a, f.part_set(0)), horizon),
                        contains(f.part(1), extend_outside(a, f.part_set(1)), horizon)},
                       "member iff each part is a member of the part filter", horizon);
  case Kind::Product:
    return product_contains(f, a, horizon);
  }
  return Verdict::consistent({}, horizon);
}

Verdict is_stationary(const FilterHandle& f, const SetExpr& a, Nat horizon) {
  return verdict_not(contains(f, ~a, horizon), "stationary iff the complement is not a member");
}

bool log_sparse_sets_null(const FilterHandle& f, const SetExpr& I) {
  if (I.facts().infinite == Tri::No)
    return true;
  switch (f.kind()) {
  case Kind::Statistical:
    return true;
  case Kind::Trace:
    return log_sparse_sets_null(f.parent(), I & f.trace_set());
  case Kind::Sum:
    return log_sparse_sets_null(f.part(0), I & f.part_set(0)) &&
           log_sparse_sets_null(f.part(1), I & f.part_set(1));
  default:
    return false;
  }
}

} // namespace filterlab
