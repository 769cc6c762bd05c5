#pragma once

// Finitely describable subsets of N = {1, 2, ...}: exact membership,
// counting, density analysis, blockings and the column partition.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "filterlab/rational.hpp"
#include "filterlab/verdict.hpp"

namespace filterlab {

// ---------------------------------------------------------------------------
// Column partition

struct Cell {
  Nat row = 1;
  Nat column = 1;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Cantor diagonal pairing of N x N onto N. Cell (r, c) lives on diagonal
/// s = r + c and gets index T(s - 2) + c with T the triangular numbers, so
/// 1 = (1,1), 2 = (2,1), 3 = (1,2), 4 = (3,1), ...
Nat pair_index(Nat row, Nat column);
Cell unpair(Nat n);

/// Partition of N into the infinite columns D_c = {pair_index(r, c) : r >= 1}.
/// Rows enumerate each column in increasing order.
class ColumnPartition {
public:
  Nat column(Nat n) const { return unpair(n).column; }
  Nat row(Nat n) const { return unpair(n).row; }
  Nat element(Nat column, Nat row) const { return pair_index(row, column); }
  std::string_view pairing() const { return "cantor-diagonal"; }
};

// ---------------------------------------------------------------------------
// Eventually periodic sets

/// Bit i of the prefix describes n = i + 1; afterwards the period word repeats.
class EventuallyPeriodic {
public:
  EventuallyPeriodic(std::vector<bool> prefix, std::vector<bool> period);
  static EventuallyPeriodic parse(std::string_view prefix, std::string_view period);

  bool contains(Nat n) const;
  Nat count_upto(Nat n) const;
  Rational density() const;
  bool is_finite() const;   // period is all zeros
  bool is_cofinite() const; // period is all ones
  bool is_empty() const;
  bool is_all() const;

  const std::vector<bool>& prefix() const { return prefix_; }
  const std::vector<bool>& period() const { return period_; }
  std::string prefix_string() const;
  std::string period_string() const;

  /// Shortest period, then shortest prefix.
  EventuallyPeriodic canonical() const;
  EventuallyPeriodic complement() const;

  friend bool operator==(const EventuallyPeriodic& a, const EventuallyPeriodic& b) {
    return a.prefix_ == b.prefix_ && a.period_ == b.period_;
  }

private:
  std::vector<bool> prefix_;
  std::vector<bool> period_;
  std::vector<Nat> prefix_counts_; // prefix_counts_[i] = ones among first i prefix bits
  std::vector<Nat> period_counts_;
};

enum class BoolOp { Union, Intersection, Difference };

/// Period lengths above this are not materialized; normalization gives up.
inline constexpr Nat kMaxPeriod = Nat{1} << 20;

std::optional<EventuallyPeriodic> combine(const EventuallyPeriodic& a, const EventuallyPeriodic& b,
                                          BoolOp op);

// ---------------------------------------------------------------------------
// Column profiles

/// Row pattern that a column eventually follows: row r belongs iff
/// word[r % word.size()] for every sufficiently large r.
using RowWord = std::vector<bool>;

/// What is known about A ∩ D_c for one column c.
struct ColumnContent {
  Tri infinite = Tri::Unknown;   // |A ∩ D_c| = ∞
  Tri coinfinite = Tri::Unknown; // |D_c \ A| = ∞
  std::optional<RowWord> word;

  static ColumnContent from_word(RowWord word);
  static ColumnContent empty();
};

/// Eventually periodic (in the column index) description of a set's columns.
struct ColumnProfile {
  std::vector<ColumnContent> prefix; // columns 1..prefix.size()
  std::vector<ColumnContent> period; // then repeating

  const ColumnContent& at(Nat column) const;
  /// Columns c with |A ∩ D_c| = ∞ form an infinite set.
  Tri infinitely_many_infinite() const;
  /// Some column has |A ∩ D_c| = ∞.
  Tri some_infinite() const;
  /// All but finitely many columns are cofinite in A.
  Tri almost_all_cofinite() const;
  /// Every column is cofinite in A.
  Tri all_cofinite() const;
};

// ---------------------------------------------------------------------------
// Column rules

struct ColumnRule {
  enum class Kind { Empty, Cofinite, Finite, Subsample, Periodic };
  Kind kind = Kind::Cofinite;
  Nat from_row = 1;       // Cofinite: rows >= from_row ...
  std::vector<Nat> rows;  // ... minus these (Cofinite) / the members (Finite)
  Nat first = 1;          // Subsample: first, first + step, ...
  Nat step = 1;
  RowWord word;           // Periodic: row r iff word[r % word.size()]

  static ColumnRule empty() {
    ColumnRule r;
    r.kind = Kind::Empty;
    return r;
  }
  static ColumnRule cofinite(Nat from_row = 1, std::vector<Nat> except = {});
  static ColumnRule finite(std::vector<Nat> rows);
  static ColumnRule subsample(Nat first, Nat step);
  static ColumnRule periodic(RowWord word);

  bool contains(Nat row) const;
  RowWord eventual_word() const;
  /// Largest row that deviates from the eventual word (0 if none).
  Nat irregular_rows() const;

  json to_json() const;
  static ColumnRule from_json(const json& j);
};

// ---------------------------------------------------------------------------
// Blocking and SetExpr

class SetExpr;

/// Disjoint partition of a ground set into finite pieces numbered 1, 2, ...
///  - Dyadic:     D_1 = {1}, D_k = (2^(k-2), 2^(k-1)] for k >= 2.
///  - Explicit:   (b_(k-1), b_k] for the listed boundaries (b_0 = 0); after
///                the last boundary the last piece length repeats.
///  - Derived:    blocks of a ground set G by rank: the piece of n ∈ G is the
///                base piece containing |G ∩ [1, n]|.
///  - Restricted: G ∩ (base piece); pieces may be empty.
class Blocking {
public:
  enum class Kind { Dyadic, Explicit, Derived, Restricted };

  static Blocking dyadic();
  static Blocking explicit_boundaries(std::vector<Nat> boundaries);
  static Blocking derived(const SetExpr& ground, Blocking base);
  static Blocking restricted(const SetExpr& ground, Blocking base);
  /// Blocking of `ground` transported from an interval blocking of N.
  /// Returns `base` unchanged when the ground set is all of N.
  static Blocking of_set(const SetExpr& ground, Blocking base);

  Kind kind() const;
  bool is_interval() const { return kind() == Kind::Dyadic || kind() == Kind::Explicit; }

  std::optional<Nat> piece_of(Nat n) const;
  /// Interval blocks: the piece's interval. Derived: the rank interval.
  /// Restricted: the base interval.
  std::pair<Nat, Nat> bounds(Nat k) const;
  /// Elements of piece k (materialized).
  std::vector<Nat> piece(Nat k) const;
  /// Number of pieces with an element <= n, or an upper bound on it for
  /// restricted blockings.
  Nat pieces_meeting(Nat n) const;
  /// The underlying interval blocking has O(log n) pieces below n.
  bool logarithmic() const;
  /// Piece length of the underlying interval blocking from some point on.
  std::optional<Nat> eventual_length() const;

  const Blocking& base() const; // self for interval kinds
  SetExpr ground() const;       // N for interval kinds
  const std::vector<Nat>& boundaries() const;

  json to_json() const;
  static Blocking from_json(const json& j);

  struct Impl;

private:
  explicit Blocking(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

enum class SelectRule { Min, Max, Nth };

/// Additive bound on |A ∩ [1, n]|:
///   constant + log_coef * (dyadic pieces meeting [1, n])
///            + Σ coef * (floor((scale * n)^(1/k)) + 1).
/// Any such bound forces natural density 0.
struct SparseBound {
  struct Root {
    unsigned k = 2;
    Nat scale = 1;
    Nat coef = 1;
  };
  Nat constant = 0;
  Nat log_coef = 0;
  std::vector<Root> roots;

  Nat eval(Nat n) const;
  SparseBound operator+(const SparseBound& other) const;
  json to_json() const;
  static SparseBound from_json(const json& j);
};

/// Structural facts, computed once per node and certified by construction.
struct SetFacts {
  std::optional<EventuallyPeriodic> normal;
  Tri infinite = Tri::Unknown;
  Rational lower = 0; // lower bound on liminf |A ∩ [1,n]| / n
  Rational upper = 1; // upper bound on limsup |A ∩ [1,n]| / n
  std::optional<SparseBound> sparse;   // bound on counting of A
  std::optional<SparseBound> cosparse; // bound on counting of N \ A
  std::optional<ColumnProfile> columns;
};

class StandardMap;

/// Immutable expression tree describing a subset of N.
class SetExpr {
public:
  enum class Op {
    Finite,
    Progression,
    Periodic,
    Columns,
    Selector,
    Powers,
    Rect,
    Image,
    Complement,
    Union,
    Intersection,
    Difference,
  };

  static SetExpr finite(std::vector<Nat> elements);
  /// {n >= max(first, 1) : n ≡ first (mod step)}.
  static SetExpr progression(Nat first, Nat step);
  static SetExpr periodic(EventuallyPeriodic ep);
  static SetExpr periodic(std::string_view prefix, std::string_view period);
  /// Column c is governed by `overrides[c]` if present, otherwise by `rule`
  /// when c ∈ `which` and is empty otherwise. `which` must normalize.
  static SetExpr columns(const SetExpr& which, ColumnRule rule,
                         std::map<Nat, ColumnRule> overrides = {});
  static SetExpr selector(Blocking blocking, SelectRule rule, Nat nth = 1);
  /// {m^k : m >= 1}, k >= 2.
  static SetExpr powers(unsigned exponent);
  /// {pair_index(r, c) : r ∈ rows, c ∈ cols}. Both factors must normalize.
  static SetExpr rect(const SetExpr& rows, const SetExpr& cols);
  /// s(source) for the order-preserving bijection s : N -> J of a standard set.
  static SetExpr image(const SetExpr& standard, const SetExpr& source);

  static SetExpr all();
  static SetExpr empty();
  /// {n : n > k}.
  static SetExpr tail(Nat k);
  static SetExpr column(Nat c);

  friend SetExpr operator~(const SetExpr& a);
  friend SetExpr operator|(const SetExpr& a, const SetExpr& b);
  friend SetExpr operator&(const SetExpr& a, const SetExpr& b);
  friend SetExpr operator-(const SetExpr& a, const SetExpr& b);

  Op op() const;
  bool contains(Nat n) const;
  const SetFacts& facts() const;
  const std::vector<SetExpr>& args() const;

  // Generator payloads (valid for the matching op only).
  const std::vector<Nat>& elements() const;
  Nat first() const;
  Nat step() const;
  const EventuallyPeriodic& periodic_form() const;
  const ColumnRule& rule() const;
  const std::map<Nat, ColumnRule>& overrides() const;
  const Blocking& blocking() const;
  SelectRule select_rule() const;
  Nat nth() const;
  unsigned exponent() const;
  const StandardMap& standard_map() const;

  json to_json() const;
  static SetExpr from_json(const json& j);
  std::string key() const { return to_json().dump(); }

  struct Node;

private:
  explicit SetExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static SetExpr make(Node node);
  std::shared_ptr<const Node> node_;
  friend struct Node;
  friend class SetFactsBuilder;
};

bool member(const SetExpr& s, Nat n);
/// |s ∩ [1, n]|.
Nat counting(const SetExpr& s, Nat n);
std::vector<Nat> enumerate(const SetExpr& s, Nat limit);
/// Membership bitmap of s ∩ [1, limit]; entry 0 is unused.
std::vector<bool> materialize(const SetExpr& s, Nat limit);
/// The element of rank `rank` (1-based), searching up to `limit`.
std::optional<Nat> select(const SetExpr& s, Nat rank, Nat limit);
std::optional<EventuallyPeriodic> normalize(const SetExpr& s);
/// Structural proof that a ⊆ b (false means "not proved").
bool provably_subset(const SetExpr& a, const SetExpr& b);

struct DensityReport {
  std::optional<Rational> value; // present iff exact
  Rational upper;                // empirical counting(h)/h unless exact
  Rational lower;
  bool exact = false;
  Nat horizon = 0;
  Rational certified_lower = 0; // bound on the liminf
  Rational certified_upper = 1; // bound on the limsup
  json to_json() const;
};

DensityReport density(const SetExpr& s, Nat horizon);

/// The order-preserving bijection s : N -> J for a standard set J (a union
/// of infinite column pieces over infinitely many columns): column m of N
/// goes to the m-th column M_m where J is infinite, row r to the r-th row
/// of J in that column.
class StandardMap {
public:
  /// Throws Error("invalid-argument") when J is not provably standard.
  /// Columns that J meets finitely must be empty; that is checked for the
  /// cells with index <= `check_limit`.
  explicit StandardMap(SetExpr standard, Nat check_limit = 1 << 14);

  const SetExpr& standard() const { return standard_; }
  const ColumnProfile& profile() const { return profile_; }
  bool column_used(Nat column) const;
  /// 1-based rank of a used column among the used columns.
  Nat column_rank(Nat column) const;
  Nat column_at(Nat rank) const;
  /// s(n).
  Nat forward(Nat n) const;
  /// s^{-1}(n) when n ∈ J.
  std::optional<Nat> inverse(Nat n) const;

private:
  SetExpr standard_;
  ColumnProfile profile_;
  std::vector<Nat> used_counts_prefix_; // used columns among the first i prefix columns
  Nat used_per_period_ = 0;
};

} // namespace filterlab
