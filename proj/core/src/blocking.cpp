#include <algorithm>
#include <bit>

#include "internal.hpp"

namespace filterlab {

Nat interval_piece_of(const Blocking::Impl& impl, Nat n) {
  if (impl.kind == Blocking::Kind::Dyadic)
    return n <= 1 ? 1 : static_cast<Nat>(std::bit_width(n - 1)) + 1;
  const auto& b = impl.boundaries;
  auto it = std::lower_bound(b.begin(), b.end(), n);
  if (it != b.end())
    return static_cast<Nat>(it - b.begin()) + 1;
  const Nat r = b.size();
  const Nat last = b.back();
  const Nat len = r >= 2 ? last - b[r - 2] : last;
  return r + (n - last + len - 1) / len;
}

std::pair<Nat, Nat> interval_bounds(const Blocking::Impl& impl, Nat k) {
  if (k == 0)
    throw Error("invalid-argument", "pieces are numbered from 1");
  if (impl.kind == Blocking::Kind::Dyadic) {
    if (k == 1)
      return {1, 1};
    if (k > 64)
      throw Error("overflow", "dyadic piece index too large");
    Nat hi = k - 1 == 64 ? ~Nat{0} : (Nat{1} << (k - 1));
    return {(Nat{1} << (k - 2)) + 1, hi};
  }
  const auto& b = impl.boundaries;
  const Nat r = b.size();
  if (k <= r)
    return {k == 1 ? 1 : b[k - 2] + 1, b[k - 1]};
  const Nat last = b.back();
  const Nat len = r >= 2 ? last - b[r - 2] : last;
  return {last + (k - r - 1) * len + 1, last + (k - r) * len};
}

Blocking Blocking::dyadic() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Dyadic;
  return Blocking(impl);
}

Blocking Blocking::explicit_boundaries(std::vector<Nat> boundaries) {
  if (boundaries.empty())
    throw Error("invalid-blocking", "explicit blocking needs at least one boundary");
  if (boundaries.front() == 0)
    throw Error("invalid-blocking", "boundaries must be positive");
  for (std::size_t i = 1; i < boundaries.size(); ++i)
    if (boundaries[i] <= boundaries[i - 1])
      throw Error("invalid-blocking", "boundaries must be strictly increasing (position " +
                                          std::to_string(i) + ")");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Explicit;
  impl->boundaries = std::move(boundaries);
  return Blocking(impl);
}

Blocking Blocking::derived(const SetExpr& ground, Blocking base) {
  if (!base.is_interval())
    throw Error("invalid-blocking", "derived blockings transport an interval blocking");
  if (ground.facts().infinite == Tri::No)
    throw Error("invalid-blocking", "a blocking needs an infinite ground set");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Derived;
  impl->ground = ground;
  impl->base = std::move(base);
  return Blocking(impl);
}

Blocking Blocking::restricted(const SetExpr& ground, Blocking base) {
  if (!base.is_interval())
    throw Error("invalid-blocking", "restricted blockings intersect an interval blocking");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Restricted;
  impl->ground = ground;
  impl->base = std::move(base);
  return Blocking(impl);
}

Blocking Blocking::of_set(const SetExpr& ground, Blocking base) {
  if (!base.is_interval())
    return base;
  const auto& normal = ground.facts().normal;
  if (normal && normal->is_all())
    return base;
  return derived(ground, std::move(base));
}

Blocking::Kind Blocking::kind() const { return impl_->kind; }

std::optional<Nat> Blocking::piece_of(Nat n) const {
  if (n == 0)
    return std::nullopt;
  switch (impl_->kind) {
  case Kind::Dyadic:
  case Kind::Explicit:
    return interval_piece_of(*impl_, n);
  case Kind::Derived:
    if (!impl_->ground->contains(n))
      return std::nullopt;
    return impl_->base->piece_of(counting(*impl_->ground, n));
  case Kind::Restricted:
    if (!impl_->ground->contains(n))
      return std::nullopt;
    return impl_->base->piece_of(n);
  }
  return std::nullopt;
}

std::pair<Nat, Nat> Blocking::bounds(Nat k) const {
  if (is_interval())
    return interval_bounds(*impl_, k);
  return impl_->base->bounds(k);
}

std::vector<Nat> Blocking::piece(Nat k) const {
  auto [lo, hi] = bounds(k);
  std::vector<Nat> out;
  switch (impl_->kind) {
  case Kind::Dyadic:
  case Kind::Explicit:
    for (Nat n = lo; n <= hi; ++n)
      out.push_back(n);
    break;
  case Kind::Derived: {
    const SetExpr& g = *impl_->ground;
    auto start = select(g, lo, ~Nat{0} >> 2);
    if (!start)
      break;
    Nat rank = lo;
    for (Nat n = *start; rank <= hi; ++n) {
      if (g.contains(n)) {
        out.push_back(n);
        ++rank;
      }
    }
    break;
  }
  case Kind::Restricted:
    for (Nat n = lo; n <= hi; ++n)
      if (impl_->ground->contains(n))
        out.push_back(n);
    break;
  }
  return out;
}

Nat Blocking::pieces_meeting(Nat n) const {
  if (n == 0)
    return 0;
  switch (impl_->kind) {
  case Kind::Dyadic:
  case Kind::Explicit:
    return interval_piece_of(*impl_, n);
  case Kind::Derived: {
    Nat c = counting(*impl_->ground, n);
    return c == 0 ? 0 : *impl_->base->piece_of(c);
  }
  case Kind::Restricted:
    return *impl_->base->piece_of(n);
  }
  return 0;
}

bool Blocking::logarithmic() const { return base().kind() == Kind::Dyadic; }

std::optional<Nat> Blocking::eventual_length() const {
  const Blocking& b = base();
  if (b.kind() != Kind::Explicit)
    return std::nullopt;
  auto [lo, hi] = b.bounds(b.boundaries().size() + 1);
  return hi - lo + 1;
}

const Blocking& Blocking::base() const { return impl_->base ? *impl_->base : *this; }

SetExpr Blocking::ground() const { return impl_->ground ? *impl_->ground : SetExpr::all(); }

const std::vector<Nat>& Blocking::boundaries() const { return impl_->boundaries; }

json Blocking::to_json() const {
  switch (impl_->kind) {
  case Kind::Dyadic:
    return {{"kind", "dyadic"}};
  case Kind::Explicit:
    return {{"kind", "explicit"}, {"boundaries", impl_->boundaries}};
  case Kind::Derived:
    return {{"kind", "derived"}, {"ground", impl_->ground->to_json()}, {"base", impl_->base->to_json()}};
  case Kind::Restricted:
    return {{"kind", "restricted"},
            {"ground", impl_->ground->to_json()},
            {"base", impl_->base->to_json()}};
  }
  return nullptr;
}

Blocking Blocking::from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "dyadic")
      return dyadic();
    throw Error("invalid-blocking", "unknown blocking name '" + j.get<std::string>() + "'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "dyadic")
    return dyadic();
  if (kind == "explicit")
    return explicit_boundaries(j.at("boundaries").get<std::vector<Nat>>());
  if (kind == "derived")
    return derived(SetExpr::from_json(j.at("ground")), from_json(j.at("base")));
  if (kind == "restricted")
    return restricted(SetExpr::from_json(j.at("ground")), from_json(j.at("base")));
  throw Error("invalid-blocking", "unknown blocking kind '" + kind + "'");
}

} // namespace filterlab
