#include <algorithm>
#include <memory>
#include <random>

#include "filterlab/constructions.hpp"

namespace filterlab {

namespace {

Rational from_i128(__int128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  std::string s;
  do {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  } while (u != 0);
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return Rational(mpz_class(s));
}

Rational pow2(unsigned e) { return Rational(mpz_class(1) << e); }

} // namespace

__int128 walsh_abs_sum(const std::vector<long long>& a) {
  const std::size_t d = a.size();
  if (d == 0 || d > 20) throw Error("invalid-argument", "Walsh dimension out of range");
  // Gray-code walk over the sign patterns; flipping bit b changes sign of a_b.
  __int128 s = 0;
  for (auto x : a) s += x;
  std::vector<int> sign(d, 1);
  __int128 total = s < 0 ? -s : s;
  const std::uint64_t count = std::uint64_t{1} << d;
  for (std::uint64_t g = 1; g < count; ++g) {
    unsigned b = static_cast<unsigned>(__builtin_ctzll(g));
    s -= 2 * static_cast<__int128>(sign[b]) * a[b];
    sign[b] = -sign[b];
    total += s < 0 ? -s : s;
  }
  return total;
}

WalshSystem walsh_system(unsigned d) {
  if (d < 1 || d > 16)
    throw Error("invalid-argument", "Walsh dimension must lie in [1, 16]; blocks of 2^d coordinates");
  WalshSystem w;
  w.d = d;
  const Rational mag = Rational(1) / pow2(d - 1);
  const Nat len = Nat{1} << d;
  for (unsigned r = 0; r < d; ++r) {
    L1Vec v;
    v.scale_sqrt_half = true;
    for (Nat j = 0; j < len; ++j) v.coords.emplace(j + 1, ((j >> r) & 1) ? Rational(-mag) : mag);
    w.vectors.push_back(std::move(v));
  }
  return w;
}

Verdict WalshSystem::verify(Nat samples, Nat seed) const {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<long long>> cases;
  for (unsigned r = 0; r < d; ++r) {
    std::vector<long long> e(d, 0);
    e[r] = 1;
    cases.push_back(e);
  }
  cases.emplace_back(d, 1);
  for (Nat s = 0; s < samples; ++s) {
    std::vector<long long> a(d);
    for (auto& x : a) x = static_cast<long long>(rng() % 41) - 20;
    if (std::all_of(a.begin(), a.end(), [](long long x) { return x == 0; })) a[0] = 1;
    cases.push_back(std::move(a));
  }
  json checks = json::array();
  bool ok = true;
  for (const auto& v : vectors) {
    Rational sq = squared_norm1(v);
    ok = ok && sq == 2;
  }
  checks.push_back(inequality("squared-norm", squared_norm1(vectors.front()), "=", 2,
                              {{"fn", "walsh_squared_norm"}, {"d", d}}));
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& a = cases[i];
    __int128 q = 0;
    for (auto x : a) q += static_cast<__int128>(x) * x;
    __int128 s = walsh_abs_sum(a);
    Rational s2 = from_i128(s) * from_i128(s);
    Rational lower = pow2(2 * d - 1) * from_i128(q);
    Rational upper = pow2(2 * d) * from_i128(q);
    json ev{{"fn", "walsh_abs_sum_squared"}, {"a", a}};
    json lo = inequality("khintchine-lower:" + std::to_string(i), s2, ">=", lower, ev);
    json hi = inequality("khintchine-upper:" + std::to_string(i), s2, "<=", upper, ev);
    ok = ok && relation_holds(s2, ">=", lower) && relation_holds(s2, "<=", upper);
    // Only the extremal cases and a prefix of the samples are recorded.
    if (i < d + 1 + 16) {
      checks.push_back(lo);
      checks.push_back(hi);
    }
  }
  json cert{{"kind", "walsh-system"}, {"d", d}, {"samples", samples}, {"seed", seed},
            {"cases", cases.size()}, {"checks", checks}};
  if (d <= 2) cert["closedForm"] = "sum over sign patterns equals 2(|a1 + a2| + |a1 - a2|) for d = 2";
  else cert["scope"] = "samples";
  return ok ? Verdict::proved(cert) : Verdict::refuted(cert);
}

// ---------------------------------------------------------------------------
// Block counterexample

namespace {

struct Layout {
  SetExpr ground = SetExpr::all();
  Blocking blocking = Blocking::dyadic();
  std::vector<std::vector<Nat>> pieces; // covered pieces, elements sorted
  std::vector<Nat> offsets;             // coordinate offset of each covered piece
  Nat coordinates = 0;
  Nat covered_upto = 0;
};

constexpr Nat kCoordinateBudget = Nat{1} << 17;
constexpr Nat kMaxPieces = 4096;

std::shared_ptr<const Layout> make_layout(const SetExpr& I, const Blocking& d) {
  auto l = std::make_shared<Layout>();
  l->ground = I;
  const bool everything = I.facts().normal && I.facts().normal->is_all();
  l->blocking = everything ? d : Blocking::restricted(I, d);
  for (Nat i = 1; i <= kMaxPieces; ++i) {
    auto [lo, hi] = l->blocking.bounds(i);
    if (hi - lo > (Nat{1} << 20)) break;
    std::vector<Nat> elems = l->blocking.piece(i);
    if (elems.size() > 16) break;
    Nat need = elems.empty() ? 0 : Nat{1} << elems.size();
    if (l->coordinates + need > kCoordinateBudget) break;
    l->offsets.push_back(l->coordinates);
    l->coordinates += need;
    l->covered_upto = std::max(l->covered_upto, hi);
    l->pieces.push_back(std::move(elems));
  }
  return l;
}

// Covered piece index (0-based) and row of n.
std::optional<std::pair<std::size_t, std::size_t>> locate(const Layout& l, Nat n) {
  auto k = l.blocking.piece_of(n);
  if (!k || *k > l.pieces.size()) return std::nullopt;
  const auto& p = l.pieces[*k - 1];
  auto it = std::lower_bound(p.begin(), p.end(), n);
  if (it == p.end() || *it != n) return std::nullopt;
  return std::make_pair(static_cast<std::size_t>(*k - 1), static_cast<std::size_t>(it - p.begin()));
}

L1Vec walsh_term(const Layout& l, std::size_t piece, std::size_t row) {
  const Nat d = l.pieces[piece].size();
  const Rational mag = Rational(1) / pow2(static_cast<unsigned>(d - 1));
  L1Vec v;
  v.scale_sqrt_half = true;
  const Nat len = Nat{1} << d;
  for (Nat j = 0; j < len; ++j)
    v.coords.emplace(l.offsets[piece] + j + 1, ((j >> row) & 1) ? Rational(-mag) : mag);
  return v;
}

} // namespace

SeqGen walsh_block_sequence(const SetExpr& I, const Blocking& d) {
  auto layout = make_layout(I, d);
  SeqGen::Meta m;
  m.name = "walsh_counterexample";
  m.params = {{"I", I.to_json()}, {"blocking", d.to_json()}};
  m.bound = rational(3, 2);
  m.support = I;
  m.squared_norm_on_support = 2;
  m.evaluable_upto = layout->covered_upto;
  m.coordinate_bad = [layout](Nat k, const Rational& lk, const Rational& eps) -> std::optional<SetExpr> {
    if (k > layout->coordinates || lk != 0) return std::nullopt;
    auto it = std::upper_bound(layout->offsets.begin(), layout->offsets.end(), k - 1);
    std::size_t piece = static_cast<std::size_t>(it - layout->offsets.begin()) - 1;
    const Nat dim = layout->pieces[piece].size();
    // |coordinate|^2 = 1 / (2 · 4^(dim-1)).
    Rational sq = Rational(1) / (2 * pow2(static_cast<unsigned>(2 * (dim - 1))));
    return sq >= eps * eps ? SetExpr::finite(layout->pieces[piece]) : SetExpr::empty();
  };
  m.coordinate_support = [layout](Nat k) {
    if (k > layout->coordinates) return layout->ground;
    auto it = std::upper_bound(layout->offsets.begin(), layout->offsets.end(), k - 1);
    return SetExpr::finite(layout->pieces[static_cast<std::size_t>(it - layout->offsets.begin()) - 1]);
  };
  return SeqGen::vector(
      [layout](Nat n) {
        if (!layout->ground.contains(n)) return L1Vec{};
        auto pos = locate(*layout, n);
        if (!pos)
          throw Error("out-of-range", "term " + std::to_string(n) +
                                          " lies in a piece of dimension above 16 or beyond the "
                                          "coordinate budget");
        return walsh_term(*layout, pos->first, pos->second);
      },
      std::move(m));
}

Counterexample build_block_counterexample(const FilterHandle& f, const SetExpr& I,
                                          const Blocking& d, const Rational& eps, Nat horizon) {
  if (eps <= 0) throw Error("invalid-argument", "eps must be positive");
  Verdict br = block_respecting_check(f, I, d, horizon);
  if (!br.is_refuted())
    throw Error("precondition", "block-respecting check is " + std::string(to_string(br.status)) +
                                    "; the construction needs a refutation with bounded selectors");
  auto layout = make_layout(I, d);
  Counterexample cx;
  cx.seq = walsh_block_sequence(I, d);
  cx.blocking = layout->blocking;
  cx.eps = eps;
  const Rational bound = Rational(2) / (eps * eps);
  cx.d_max = ceil(bound).get_ui();
  cx.covered_pieces = layout->pieces.size();
  cx.covered_upto = layout->covered_upto;
  cx.offsets = layout->offsets;

  json derivation = json::array(
      {"f(y_k) >= eps d_k, y_k the sum of the violating vectors of piece k",
       "f(y_k) <= ||y_k|| for sup-norm at most 1",
       "||y_k||^2 <= 2 d_k by the upper Walsh bound",
       "hence eps^2 d_k^2 <= 2 d_k and d_k <= 2 / eps^2"});
  json checks = json::array();
  checks.push_back(inequality("d-max-bound", from_nat(cx.d_max), ">=", bound));
  checks.push_back(inequality("d-max-minimal", from_nat(cx.d_max) - 1, "<", bound));
  json dims = json::array();
  for (std::size_t i = 0; i < layout->pieces.size(); ++i) {
    const Nat dim = layout->pieces[i].size();
    dims.push_back({{"piece", i + 1}, {"dimension", dim}, {"offset", layout->offsets[i]}});
    if (dim > 0) {
      L1Vec v = walsh_term(*layout, i, 0);
      checks.push_back(inequality("squared-norm:" + std::to_string(i + 1), squared_norm1(v), "=", 2,
                                  {{"fn", "walsh_squared_norm"}, {"d", dim}}));
    }
  }
  cx.certificate = {{"kind", "weak-convergence"},
                    {"eps", to_string(eps)},
                    {"dMax", cx.d_max},
                    {"derivation", derivation},
                    {"checks", checks},
                    {"blockRespecting", to_json(br)},
                    {"sequence", cx.seq.to_json()},
                    {"coverage",
                     {{"pieces", cx.covered_pieces},
                      {"upto", cx.covered_upto},
                      {"coordinates", layout->coordinates},
                      {"dimensions", dims},
                      {"note", "pieces of dimension above 16 are described but not materialized"}}}};
  return cx;
}

std::vector<Nat> block_violations(const Counterexample& cx, const TestFunctional& f) {
  auto layout = make_layout(cx.seq.meta().support.value_or(SetExpr::all()),
                            Blocking::from_json(cx.seq.meta().params.at("blocking")));
  std::vector<Nat> counts;
  const Rational e2 = cx.eps * cx.eps;
  for (std::size_t i = 0; i < layout->pieces.size(); ++i) {
    Nat c = 0;
    for (std::size_t r = 0; r < layout->pieces[i].size(); ++r) {
      Rational u = apply_unscaled(f, walsh_term(*layout, i, r));
      if (u > 0 && signed_square(u, true) >= e2) ++c;
    }
    counts.push_back(c);
  }
  return counts;
}

Verdict validate_weak_certificate(const Counterexample& cx, Nat functionals, Nat seed) {
  auto layout = make_layout(cx.seq.meta().support.value_or(SetExpr::all()),
                            Blocking::from_json(cx.seq.meta().params.at("blocking")));
  // f(x_n) = u / (8 · 2^(d-1) · sqrt 2) for the integer u computed below.
  const mpz_class num = cx.eps.get_num(), den = cx.eps.get_den();
  std::vector<long long> fv(layout->coordinates);
  std::vector<Nat> worst(layout->pieces.size(), 0);
  Nat overall = 0, overall_index = 0;
  for (Nat t = 0; t < functionals; ++t) {
    std::mt19937_64 rng(seed * 1000003 + t);
    const bool aligned = t % 2 == 1;
    for (std::size_t i = 0; i < layout->pieces.size(); ++i) {
      const Nat dim = layout->pieces[i].size();
      const Nat len = dim == 0 ? 0 : Nat{1} << dim;
      const Nat base = layout->offsets[i];
      Nat subset = dim == 0 ? 0 : 1 + rng() % ((Nat{1} << dim) - 1);
      for (Nat j = 0; j < len; ++j) {
        if (!aligned) {
          fv[base + j] = static_cast<long long>(rng() % 17) - 8;
          continue;
        }
        long long s = 0;
        for (Nat r = 0; r < dim; ++r)
          if ((subset >> r) & 1) s += ((j >> r) & 1) ? -1 : 1;
        fv[base + j] = s > 0 ? 8 : (s < 0 ? -8 : 0);
      }
    }
    for (std::size_t i = 0; i < layout->pieces.size(); ++i) {
      const Nat dim = layout->pieces[i].size();
      const Nat len = dim == 0 ? 0 : Nat{1} << dim;
      const Nat base = layout->offsets[i];
      const mpz_class scale = mpz_class(8) << (dim == 0 ? 0 : dim - 1);
      // u > 0 and u^2 den^2 >= 2 num^2 scale^2.
      const mpz_class rhs = 2 * num * num * scale * scale;
      Nat count = 0;
      for (Nat r = 0; r < dim; ++r) {
        long long u = 0;
        for (Nat j = 0; j < len; ++j) u += ((j >> r) & 1) ? -fv[base + j] : fv[base + j];
        if (u > 0) {
          mpz_class uu = static_cast<long>(u);
          if (uu * uu * den * den >= rhs) ++count;
        }
      }
      worst[i] = std::max(worst[i], count);
      if (count > overall) overall = count, overall_index = t;
    }
  }
  json per_piece = json::array();
  for (std::size_t i = 0; i < worst.size(); ++i)
    per_piece.push_back({{"piece", i + 1}, {"maxViolations", worst[i]}});
  json cert{{"kind", "weak-certificate-validation"},
            {"scope", "samples"},
            {"functionals", functionals},
            {"seed", seed},
            {"values", "k/8 for |k| <= 8; odd-numbered functionals are aligned with block sums"},
            {"coordinates", layout->coordinates},
            {"perPiece", per_piece},
            {"checks", json::array({inequality("max-violations", from_nat(overall), "<=",
                                               from_nat(cx.d_max))})},
            {"worstFunctional", overall_index}};
  return overall <= cx.d_max ? Verdict::proved(cert) : Verdict::refuted(cert);
}

SeqGen sequence_from_json(const json& j) {
  if (j.is_object() && j.value("name", std::string()) == "walsh_counterexample") {
    try {
      const json& p = j.at("params");
      return walsh_block_sequence(SetExpr::from_json(p.at("I")), Blocking::from_json(p.at("blocking")));
    } catch (const json::exception& e) {
      throw Error("invalid-argument", std::string("bad sequence: ") + e.what());
    }
  }
  return SeqGen::from_json(j);
}

} // namespace filterlab
