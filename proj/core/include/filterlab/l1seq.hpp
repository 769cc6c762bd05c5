#pragma once

// Finitely supported vectors in l1 with exact rational coordinates, test
// functionals of sup-norm at most one and deterministic sequence generators.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "filterlab/rational.hpp"
#include "filterlab/setalg.hpp"
#include "filterlab/verdict.hpp"

namespace filterlab {

/// Sparse vector; with `scale_sqrt_half` the represented vector is
/// coords / sqrt(2). Quantities of scaled vectors are compared squared.
struct L1Vec {
  std::map<Nat, Rational> coords; // zero entries are never stored
  bool scale_sqrt_half = false;

  static L1Vec unit(Nat k, const Rational& value = 1);
  Rational coord(Nat k) const; // unscaled coordinate
  void set(Nat k, const Rational& value);
  bool empty() const { return coords.empty(); }
  Nat max_coordinate() const;

  json to_json() const;
  static L1Vec from_json(const json& j);
  friend bool operator==(const L1Vec& a, const L1Vec& b) = default;
};

L1Vec operator+(const L1Vec& a, const L1Vec& b);
L1Vec operator-(const L1Vec& a, const L1Vec& b);
L1Vec operator*(const Rational& c, const L1Vec& v);

/// Exact l1 norm. Throws Error("invalid-argument") for scaled vectors.
Rational norm1(const L1Vec& v);
/// (l1 norm)^2, exact for scaled and unscaled vectors.
Rational squared_norm1(const L1Vec& v);
Rational coord(const L1Vec& v, Nat k);
/// Σ_{k >= m} |v_k| and Σ_{k <= m} |v_k| (unscaled coordinates).
Rational tail_mass(const L1Vec& v, Nat m);
Rational head_mass(const L1Vec& v, Nat m);
/// sign(x) * x^2 of a possibly scaled quantity x = value (/ sqrt 2).
Rational signed_square(const Rational& value, bool scaled);

class TestFunctional {
public:
  enum class Kind { Signs, Blocks, Summing };
  struct Block {
    Nat lo = 1, hi = 1;
    Rational value;
  };

  /// Coordinate k gets prefix[k-1], then the period values repeat.
  static TestFunctional signs(std::vector<Rational> prefix, std::vector<Rational> period);
  /// Coordinates in [lo, hi] get `value`; other coordinates get 0.
  static TestFunctional blocks(std::vector<Block> blocks);
  static TestFunctional summing();

  Kind kind() const { return kind_; }
  Rational at(Nat k) const;
  json to_json() const;
  static TestFunctional from_json(const json& j);

private:
  Kind kind_ = Kind::Summing;
  std::vector<Rational> prefix_, period_;
  std::vector<Block> blocks_;
};

/// Σ_k f(k) v_k. Throws for scaled vectors; see apply_unscaled.
Rational apply(const TestFunctional& f, const L1Vec& v);
Rational apply_unscaled(const TestFunctional& f, const L1Vec& v);

// ---------------------------------------------------------------------------
// Sequence generators

class SeqGen {
public:
  using VecRule = std::function<L1Vec(Nat)>;
  using ScalarRule = std::function<Rational(Nat)>;
  /// {n : |x_n - limit| >= eps} as a set expression, when known exactly.
  using ScalarBad = std::function<std::optional<SetExpr>(const Rational& limit, const Rational& eps)>;
  /// {n : ||x_n - limit|| >= eps}.
  using NormBad = std::function<std::optional<SetExpr>(const L1Vec& limit, const Rational& eps)>;
  /// {n : |e_k*(x_n) - limit_k| >= eps}.
  using CoordBad =
      std::function<std::optional<SetExpr>(Nat k, const Rational& limit_k, const Rational& eps)>;

  struct Meta {
    std::string name;
    json params = json::object();
    std::optional<Rational> bound;                 // declared sup |x_n| or sup ||x_n||
    std::optional<SetExpr> support;                // declared {n : x_n != 0}
    std::optional<Rational> squared_norm_on_support; // declared ||x_n||^2 for n in support
    ScalarBad scalar_bad;
    NormBad norm_bad;
    CoordBad coordinate_bad;
    std::function<SetExpr(Nat)> coordinate_support; // {n : e_k*(x_n) != 0}
    std::optional<Nat> evaluable_upto; // terms beyond it are not materialized
  };

  static SeqGen vector(VecRule rule, Meta meta);
  static SeqGen scalar(ScalarRule rule, Meta meta);

  bool is_vector() const { return static_cast<bool>(vec_); }
  L1Vec at(Nat n) const;
  Rational value(Nat n) const;
  const Meta& meta() const { return meta_; }
  const std::string& name() const { return meta_.name; }

  json to_json() const { return {{"name", meta_.name}, {"params", meta_.params}}; }
  /// Named constructors from this module; see also sequence_from_json.
  static SeqGen from_json(const json& j);

private:
  VecRule vec_;
  ScalarRule scal_;
  Meta meta_;
};

/// Scalar sequence equal to `value` on the first listed set containing n,
/// and to `otherwise` elsewhere.
SeqGen piecewise(std::string name, json params, std::vector<std::pair<SetExpr, Rational>> pieces,
                 Rational otherwise);

// Vector sequences.
SeqGen canonical_basis();
/// n ↦ e_n + e_(column(n)).
SeqGen remark_sequence();
/// n ↦ (1/n) e_1 + e_(n+1).
SeqGen perturbed_basis();
/// n ↦ (1/n) e_1.
SeqGen inverse_unit();
SeqGen constant_vector(L1Vec v);
SeqGen user_defined(std::string name, SeqGen::VecRule rule);

// Scalar sequences.
/// n ↦ a + b/n.
SeqGen harmonic(Rational a, Rational b);
/// n ↦ (-1)^n.
SeqGen alternating();
/// n ↦ 1 on squares, 0 elsewhere.
SeqGen square_indicator();
SeqGen identity_scalar();
SeqGen constant_scalar(Rational c);
/// Seeded bounded scalar sequence: a constant plus a density-zero
/// perturbation, a decaying term, or an oscillator.
SeqGen mixture(Nat seed);
SeqGen user_defined_scalar(std::string name, SeqGen::ScalarRule rule);

/// Exact average of x_1, ..., x_n.
L1Vec cesaro_means(const SeqGen& g, Nat n);

} // namespace filterlab
