#include "filterlab/l1seq.hpp"

#include <random>

namespace filterlab {

// ---------------------------------------------------------------------------
// L1Vec

L1Vec L1Vec::unit(Nat k, const Rational& value) {
  L1Vec v;
  v.set(k, value);
  return v;
}

Rational L1Vec::coord(Nat k) const {
  auto it = coords.find(k);
  return it == coords.end() ? Rational(0) : it->second;
}

void L1Vec::set(Nat k, const Rational& value) {
  if (k == 0) throw Error("invalid-argument", "coordinates start at 1");
  if (value == 0)
    coords.erase(k);
  else
    coords[k] = value;
}

Nat L1Vec::max_coordinate() const { return coords.empty() ? 0 : coords.rbegin()->first; }

json L1Vec::to_json() const {
  json c = json::object();
  for (const auto& [k, v] : coords) c[std::to_string(k)] = to_string(v);
  return {{"coords", c}, {"scaleSqrtHalf", scale_sqrt_half}};
}

L1Vec L1Vec::from_json(const json& j) {
  L1Vec v;
  try {
    for (const auto& [key, value] : j.at("coords").items())
      v.set(std::stoull(key), parse_rational(value.get<std::string>()));
    v.scale_sqrt_half = j.value("scaleSqrtHalf", false);
  } catch (const json::exception& e) {
    throw Error("invalid-argument", std::string("bad vector: ") + e.what());
  } catch (const std::logic_error&) {
    throw Error("invalid-argument", "bad vector coordinate index");
  }
  return v;
}

namespace {

void require_same_scale(const L1Vec& a, const L1Vec& b) {
  if (a.scale_sqrt_half != b.scale_sqrt_half && !a.empty() && !b.empty())
    throw Error("invalid-argument", "cannot mix scaled and unscaled vectors");
}

} // namespace

L1Vec operator+(const L1Vec& a, const L1Vec& b) {
  require_same_scale(a, b);
  L1Vec r = a;
  r.scale_sqrt_half = a.empty() ? b.scale_sqrt_half : a.scale_sqrt_half;
  for (const auto& [k, v] : b.coords) r.set(k, r.coord(k) + v);
  return r;
}

L1Vec operator-(const L1Vec& a, const L1Vec& b) { return a + Rational(-1) * b; }

L1Vec operator*(const Rational& c, const L1Vec& v) {
  L1Vec r;
  r.scale_sqrt_half = v.scale_sqrt_half;
  if (c == 0) return r;
  for (const auto& [k, x] : v.coords) r.coords[k] = c * x;
  return r;
}

namespace {
Rational raw_norm(const L1Vec& v) {
  Rational s = 0;
  for (const auto& [k, x] : v.coords) s += abs_value(x);
  return s;
}
} // namespace

Rational norm1(const L1Vec& v) {
  if (v.scale_sqrt_half && !v.empty())
    throw Error("invalid-argument", "norm of a scaled vector is irrational; use squared_norm1");
  return raw_norm(v);
}

Rational squared_norm1(const L1Vec& v) {
  Rational s = raw_norm(v);
  s *= s;
  if (v.scale_sqrt_half) s /= 2;
  return s;
}

Rational coord(const L1Vec& v, Nat k) { return v.coord(k); }

Rational tail_mass(const L1Vec& v, Nat m) {
  Rational s = 0;
  for (auto it = v.coords.lower_bound(m); it != v.coords.end(); ++it) s += abs_value(it->second);
  return s;
}

Rational head_mass(const L1Vec& v, Nat m) {
  Rational s = 0;
  for (auto it = v.coords.begin(); it != v.coords.end() && it->first <= m; ++it)
    s += abs_value(it->second);
  return s;
}

Rational signed_square(const Rational& value, bool scaled) {
  Rational s = value * abs_value(value);
  if (scaled) s /= 2;
  return s;
}

// ---------------------------------------------------------------------------
// TestFunctional

namespace {
void check_unit(const Rational& a) {
  if (abs_value(a) > 1) throw Error("invalid-functional", "functional value exceeds 1 in absolute value");
}
} // namespace

TestFunctional TestFunctional::signs(std::vector<Rational> prefix, std::vector<Rational> period) {
  if (period.empty()) throw Error("invalid-functional", "empty period");
  for (const auto& a : prefix) check_unit(a);
  for (const auto& a : period) check_unit(a);
  TestFunctional f;
  f.kind_ = Kind::Signs;
  f.prefix_ = std::move(prefix);
  f.period_ = std::move(period);
  return f;
}

TestFunctional TestFunctional::blocks(std::vector<Block> blocks) {
  for (const auto& b : blocks) {
    check_unit(b.value);
    if (b.lo == 0 || b.lo > b.hi) throw Error("invalid-functional", "bad block bounds");
  }
  TestFunctional f;
  f.kind_ = Kind::Blocks;
  f.blocks_ = std::move(blocks);
  return f;
}

TestFunctional TestFunctional::summing() { return TestFunctional{}; }

Rational TestFunctional::at(Nat k) const {
  switch (kind_) {
  case Kind::Summing:
    return 1;
  case Kind::Signs:
    if (k <= prefix_.size()) return prefix_[k - 1];
    return period_[(k - 1 - prefix_.size()) % period_.size()];
  case Kind::Blocks:
    for (const auto& b : blocks_)
      if (b.lo <= k && k <= b.hi) return b.value;
    return 0;
  }
  return 0;
}

json TestFunctional::to_json() const {
  auto strs = [](const std::vector<Rational>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(to_string(x));
    return a;
  };
  switch (kind_) {
  case Kind::Summing:
    return {{"kind", "summing"}};
  case Kind::Signs:
    return {{"kind", "signs"}, {"prefix", strs(prefix_)}, {"period", strs(period_)}};
  case Kind::Blocks: {
    json a = json::array();
    for (const auto& b : blocks_)
      a.push_back({{"lo", b.lo}, {"hi", b.hi}, {"value", to_string(b.value)}});
    return {{"kind", "blocks"}, {"blocks", a}};
  }
  }
  return {};
}

TestFunctional TestFunctional::from_json(const json& j) {
  try {
    auto rats = [](const json& a) {
      std::vector<Rational> v;
      for (const auto& x : a) v.push_back(parse_rational(x.get<std::string>()));
      return v;
    };
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "summing") return summing();
    if (kind == "signs") return signs(rats(j.value("prefix", json::array())), rats(j.at("period")));
    if (kind == "blocks") {
      std::vector<Block> bs;
      for (const auto& b : j.at("blocks"))
        bs.push_back({b.at("lo").get<Nat>(), b.at("hi").get<Nat>(),
                      parse_rational(b.at("value").get<std::string>())});
      return blocks(std::move(bs));
    }
    throw Error("invalid-functional", "unknown functional kind " + kind);
  } catch (const json::exception& e) {
    throw Error("invalid-functional", e.what());
  }
}

Rational apply_unscaled(const TestFunctional& f, const L1Vec& v) {
  Rational s = 0;
  for (const auto& [k, x] : v.coords) s += f.at(k) * x;
  return s;
}

Rational apply(const TestFunctional& f, const L1Vec& v) {
  if (v.scale_sqrt_half && !v.empty())
    throw Error("invalid-argument", "value on a scaled vector is irrational; use apply_unscaled");
  return apply_unscaled(f, v);
}

// ---------------------------------------------------------------------------
// SeqGen

SeqGen SeqGen::vector(VecRule rule, Meta meta) {
  SeqGen g;
  g.vec_ = std::move(rule);
  g.meta_ = std::move(meta);
  return g;
}

SeqGen SeqGen::scalar(ScalarRule rule, Meta meta) {
  SeqGen g;
  g.scal_ = std::move(rule);
  g.meta_ = std::move(meta);
  return g;
}

L1Vec SeqGen::at(Nat n) const {
  if (!vec_) throw Error("invalid-argument", meta_.name + " is a scalar sequence");
  if (n == 0) throw Error("invalid-argument", "sequence indices start at 1");
  return vec_(n);
}

Rational SeqGen::value(Nat n) const {
  if (!scal_) throw Error("invalid-argument", meta_.name + " is a vector sequence");
  if (n == 0) throw Error("invalid-argument", "sequence indices start at 1");
  return scal_(n);
}

namespace {

bool far(const Rational& x, const Rational& limit, const Rational& eps) {
  return abs_value(x - limit) >= eps;
}

SetExpr union_all(const std::vector<SetExpr>& sets) {
  if (sets.empty()) return SetExpr::empty();
  SetExpr r = sets[0];
  for (std::size_t i = 1; i < sets.size(); ++i) r = r | sets[i];
  return r;
}

// Pieces with values; elements outside every piece take `otherwise`.
std::optional<SetExpr> piecewise_bad(const std::vector<std::pair<SetExpr, Rational>>& pieces,
                                     const Rational& otherwise, const Rational& limit,
                                     const Rational& eps) {
  std::vector<SetExpr> bad;
  std::vector<SetExpr> earlier;
  for (const auto& [s, v] : pieces) {
    SetExpr own = earlier.empty() ? s : s - union_all(earlier);
    if (far(v, limit, eps)) bad.push_back(own);
    earlier.push_back(s);
  }
  if (far(otherwise, limit, eps)) bad.push_back(~union_all(earlier));
  return union_all(bad);
}

// {n : |a + b/n - limit| >= eps}.
std::optional<SetExpr> harmonic_bad(const Rational& a, const Rational& b, const Rational& limit,
                                    const Rational& eps) {
  Rational offset = abs_value(a - limit);
  if (b == 0) return far(a, limit, eps) ? SetExpr::all() : SetExpr::empty();
  if (offset == eps) return std::nullopt;
  // Beyond n0 the term b/n cannot move the distance across eps.
  Rational margin = offset > eps ? Rational(offset - eps) : Rational(eps - offset);
  mpz_class n0z = ceil(abs_value(b) / margin);
  if (n0z > (1 << 22)) return std::nullopt;
  Nat n0 = n0z.get_ui();
  std::vector<Nat> bad;
  for (Nat n = 1; n <= n0; ++n)
    if (far(a + b / from_nat(n), limit, eps)) bad.push_back(n);
  SetExpr head = SetExpr::finite(bad);
  return offset > eps ? head | SetExpr::tail(n0) : head;
}

std::optional<SetExpr> constant_bad(const Rational& c, const Rational& limit, const Rational& eps) {
  return far(c, limit, eps) ? SetExpr::all() : SetExpr::empty();
}

SeqGen::CoordBad piecewise_coordinates(
    std::function<std::pair<std::vector<std::pair<SetExpr, Rational>>, Rational>(Nat)> pieces) {
  return [pieces](Nat k, const Rational& lk, const Rational& eps) -> std::optional<SetExpr> {
    auto [ps, other] = pieces(k);
    return piecewise_bad(ps, other, lk, eps);
  };
}

// Norm distances for sequences of the form x_n = e_n-style units: the
// distance is computed exactly on the support of the limit and is
// constant outside it.
std::optional<SetExpr> split_norm_bad(const L1Vec& limit, const Rational& eps,
                                      const std::function<Rational(Nat)>& distance,
                                      const Rational& outside_distance, Nat check_upto) {
  if (limit.scale_sqrt_half && !limit.empty()) return std::nullopt;
  std::vector<Nat> bad, checked;
  for (Nat n = 1; n <= check_upto; ++n) {
    checked.push_back(n);
    if (distance(n) >= eps) bad.push_back(n);
  }
  SetExpr head = SetExpr::finite(bad);
  if (outside_distance >= eps) return head | ~SetExpr::finite(checked);
  return head;
}

} // namespace

SeqGen piecewise(std::string name, json params, std::vector<std::pair<SetExpr, Rational>> pieces,
                 Rational otherwise) {
  SeqGen::Meta m;
  m.name = std::move(name);
  m.params = std::move(params);
  Rational bound = abs_value(otherwise);
  for (const auto& p : pieces)
    if (abs_value(p.second) > bound) bound = abs_value(p.second);
  m.bound = bound;
  m.scalar_bad = [pieces, otherwise](const Rational& l, const Rational& e) {
    return piecewise_bad(pieces, otherwise, l, e);
  };
  return SeqGen::scalar(
      [pieces, otherwise](Nat n) {
        for (const auto& [s, v] : pieces)
          if (s.contains(n)) return v;
        return otherwise;
      },
      std::move(m));
}

SeqGen canonical_basis() {
  SeqGen::Meta m;
  m.name = "canonical_basis";
  m.bound = 1;
  m.support = SetExpr::all();
  m.squared_norm_on_support = 1;
  m.norm_bad = [](const L1Vec& l, const Rational& eps) {
    Rational ln = raw_norm(l);
    auto dist = [&](Nat n) { return ln - abs_value(l.coord(n)) + abs_value(1 - l.coord(n)); };
    return split_norm_bad(l, eps, dist, ln + 1, l.max_coordinate());
  };
  m.coordinate_bad = piecewise_coordinates([](Nat k) {
    return std::make_pair(std::vector<std::pair<SetExpr, Rational>>{{SetExpr::finite({k}), 1}},
                          Rational(0));
  });
  m.coordinate_support = [](Nat k) { return SetExpr::finite({k}); };
  return SeqGen::vector([](Nat n) { return L1Vec::unit(n); }, std::move(m));
}

SeqGen remark_sequence() {
  SeqGen::Meta m;
  m.name = "remark_sequence";
  m.bound = 2;
  m.support = SetExpr::all();
  m.squared_norm_on_support = 4;
  m.norm_bad = [](const L1Vec& l, const Rational& eps) -> std::optional<SetExpr> {
    if (!l.empty()) return std::nullopt;
    return constant_bad(2, 0, eps);
  };
  m.coordinate_bad = piecewise_coordinates([](Nat k) {
    std::vector<std::pair<SetExpr, Rational>> ps;
    if (k == 1) {
      ps.push_back({SetExpr::finite({1}), 2});
      ps.push_back({SetExpr::column(1), 1});
    } else {
      ps.push_back({SetExpr::finite({k}) | SetExpr::column(k), 1});
    }
    return std::make_pair(ps, Rational(0));
  });
  m.coordinate_support = [](Nat k) { return SetExpr::finite({k}) | SetExpr::column(k); };
  return SeqGen::vector(
      [](Nat n) {
        L1Vec v = L1Vec::unit(n);
        Nat c = unpair(n).column;
        v.set(c, v.coord(c) + 1);
        return v;
      },
      std::move(m));
}

SeqGen perturbed_basis() {
  SeqGen::Meta m;
  m.name = "perturbed_basis";
  m.bound = 2;
  m.support = SetExpr::all();
  m.norm_bad = [](const L1Vec& l, const Rational& eps) -> std::optional<SetExpr> {
    if (!l.empty()) return std::nullopt;
    return harmonic_bad(1, 1, 0, eps);
  };
  m.coordinate_bad = [](Nat k, const Rational& lk, const Rational& eps) -> std::optional<SetExpr> {
    if (k == 1) return harmonic_bad(0, 1, lk, eps);
    return piecewise_bad({{SetExpr::finite({k - 1}), 1}}, 0, lk, eps);
  };
  m.coordinate_support = [](Nat k) { return k == 1 ? SetExpr::all() : SetExpr::finite({k - 1}); };
  return SeqGen::vector(
      [](Nat n) {
        L1Vec v = L1Vec::unit(1, Rational(1) / from_nat(n));
        v.set(n + 1, 1);
        return v;
      },
      std::move(m));
}

SeqGen inverse_unit() {
  SeqGen::Meta m;
  m.name = "inverse_unit";
  m.bound = 1;
  m.support = SetExpr::all();
  m.norm_bad = [](const L1Vec& l, const Rational& eps) -> std::optional<SetExpr> {
    for (const auto& [k, x] : l.coords)
      if (k != 1) return std::nullopt;
    if (l.scale_sqrt_half && !l.empty()) return std::nullopt;
    return harmonic_bad(0, 1, l.coord(1), eps);
  };
  m.coordinate_bad = [](Nat k, const Rational& lk, const Rational& eps) {
    return k == 1 ? harmonic_bad(0, 1, lk, eps) : constant_bad(0, lk, eps);
  };
  m.coordinate_support = [](Nat k) { return k == 1 ? SetExpr::all() : SetExpr::empty(); };
  return SeqGen::vector([](Nat n) { return L1Vec::unit(1, Rational(1) / from_nat(n)); },
                        std::move(m));
}

SeqGen constant_vector(L1Vec v) {
  SeqGen::Meta m;
  m.name = "constant";
  m.params = {{"vector", v.to_json()}};
  if (!v.scale_sqrt_half) m.bound = raw_norm(v);
  m.support = v.empty() ? SetExpr::empty() : SetExpr::all();
  m.squared_norm_on_support = squared_norm1(v);
  m.norm_bad = [v](const L1Vec& l, const Rational& eps) -> std::optional<SetExpr> {
    if (v.scale_sqrt_half != l.scale_sqrt_half && !v.empty() && !l.empty()) return std::nullopt;
    L1Vec d = v - l;
    return squared_norm1(d) >= eps * eps ? SetExpr::all() : SetExpr::empty();
  };
  if (!v.scale_sqrt_half)
    m.coordinate_bad = [v](Nat k, const Rational& lk, const Rational& eps) {
      return constant_bad(v.coord(k), lk, eps);
    };
  m.coordinate_support = [v](Nat k) { return v.coord(k) == 0 ? SetExpr::empty() : SetExpr::all(); };
  return SeqGen::vector([v](Nat) { return v; }, std::move(m));
}

SeqGen user_defined(std::string name, SeqGen::VecRule rule) {
  SeqGen::Meta m;
  m.name = std::move(name);
  return SeqGen::vector(std::move(rule), std::move(m));
}

SeqGen harmonic(Rational a, Rational b) {
  SeqGen::Meta m;
  m.name = "harmonic";
  m.params = {{"a", to_string(a)}, {"b", to_string(b)}};
  m.bound = abs_value(a) + abs_value(b);
  m.scalar_bad = [a, b](const Rational& l, const Rational& e) { return harmonic_bad(a, b, l, e); };
  return SeqGen::scalar([a, b](Nat n) { return Rational(a + b / from_nat(n)); }, std::move(m));
}

SeqGen alternating() {
  return piecewise("alternating", json::object(), {{SetExpr::progression(2, 2), 1}}, -1);
}

SeqGen square_indicator() {
  return piecewise("square_indicator", json::object(), {{SetExpr::powers(2), 1}}, 0);
}

SeqGen identity_scalar() {
  SeqGen::Meta m;
  m.name = "identity";
  m.scalar_bad = [](const Rational& l, const Rational& eps) -> std::optional<SetExpr> {
    // Good indices form the finite window (l - eps, l + eps).
    std::vector<Nat> good;
    mpz_class lo = ceil(l - eps);
    if (lo < 1) lo = 1;
    for (mpz_class n = lo; Rational(n) < l + eps; ++n) {
      if (!(abs_value(Rational(n) - l) < eps)) continue;
      good.push_back(n.get_ui());
      if (good.size() > (1u << 22)) return std::nullopt;
    }
    return ~SetExpr::finite(good);
  };
  return SeqGen::scalar([](Nat n) { return from_nat(n); }, std::move(m));
}

SeqGen constant_scalar(Rational c) {
  return piecewise("constant", {{"value", to_string(c)}}, {}, c);
}

SeqGen mixture(Nat seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  Rational c = rational(pick(-4, 4), 2);
  Rational d = rational(pick(1, 6), 4) * (pick(0, 1) ? 1 : -1);
  long variant = pick(0, 4);
  json params = {{"seed", seed}};
  SeqGen g;
  switch (variant) {
  case 0: {
    auto k = static_cast<unsigned>(pick(2, 3));
    g = piecewise("mixture", params, {{SetExpr::powers(k), c + d}}, c);
    break;
  }
  case 1:
    g = piecewise("mixture", params,
                  {{SetExpr::selector(Blocking::dyadic(), SelectRule::Min), c + d}}, c);
    break;
  case 2: {
    g = harmonic(c, d);
    SeqGen::Meta m = g.meta();
    m.name = "mixture";
    m.params = params;
    g = SeqGen::scalar([c, d](Nat n) { return Rational(c + d / from_nat(n)); }, std::move(m));
    break;
  }
  case 3:
    g = piecewise("mixture", params, {{SetExpr::progression(2, 2), c + d}}, c - d);
    break;
  default: {
    Nat p = static_cast<Nat>(pick(2, 5));
    Nat r = static_cast<Nat>(pick(1, static_cast<long>(p)));
    g = piecewise("mixture", params, {{SetExpr::progression(r, p), c + d}}, c);
    break;
  }
  }
  return g;
}

SeqGen user_defined_scalar(std::string name, SeqGen::ScalarRule rule) {
  SeqGen::Meta m;
  m.name = std::move(name);
  return SeqGen::scalar(std::move(rule), std::move(m));
}

SeqGen SeqGen::from_json(const json& j) {
  std::string name;
  json p;
  try {
    name = j.is_string() ? j.get<std::string>() : j.at("name").get<std::string>();
    p = j.is_object() ? j.value("params", json::object()) : json::object();
    auto rat = [&](const char* key, const char* dflt) {
      return parse_rational(p.value(key, std::string(dflt)));
    };
    if (name == "canonical_basis") return canonical_basis();
    if (name == "remark_sequence") return remark_sequence();
    if (name == "perturbed_basis") return perturbed_basis();
    if (name == "inverse_unit") return inverse_unit();
    if (name == "alternating") return alternating();
    if (name == "square_indicator") return square_indicator();
    if (name == "identity") return identity_scalar();
    if (name == "harmonic") return harmonic(rat("a", "0"), rat("b", "1"));
    if (name == "inverse") return harmonic(0, rat("c", "1"));
    if (name == "mixture") return mixture(p.value("seed", Nat{0}));
    if (name == "constant") {
      if (p.contains("vector")) return constant_vector(L1Vec::from_json(p.at("vector")));
      return constant_scalar(rat("value", "0"));
    }
  } catch (const json::exception& e) {
    throw Error("invalid-argument", std::string("bad sequence: ") + e.what());
  }
  throw Error("invalid-argument", "unknown sequence " + name);
}

L1Vec cesaro_means(const SeqGen& g, Nat n) {
  if (n == 0) throw Error("invalid-argument", "empty average");
  L1Vec sum;
  for (Nat i = 1; i <= n; ++i) sum = sum + g.at(i);
  return Rational(1) / from_nat(n) * sum;
}

} // namespace filterlab
