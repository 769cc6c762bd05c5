#pragma once

// Concrete filters on N with three-valued membership and stationarity
// decisions, the filter algebra (trace, sum, product) and the witness
// procedures for the combinatorial properties.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "filterlab/setalg.hpp"
#include "filterlab/verdict.hpp"

namespace filterlab {

class FilterHandle {
public:
  enum class Kind { Frechet, Statistical, CountableBase, ColumnFD, ColumnFd, Trace, Sum, Product };

  static FilterHandle frechet();
  static FilterHandle statistical();
  /// Filter generated by B_1 ⊇ B_2 ⊇ ...; B_k = N \ {1..k}.
  static FilterHandle countable_base_tails();
  /// Filter generated by the listed decreasing sets, continued by
  /// B_k = B_r \ {1..k} for k > r. B_r must be infinite.
  static FilterHandle countable_base(std::vector<SetExpr> base);
  /// Generated by B_{m,C} = ⋃_{n>=m} (D_n \ C_n), C_n finite.
  static FilterHandle column_fd_tails();
  /// Generated by B_C = ⋃_n (D_n \ C_n), C_n finite.
  static FilterHandle column_fd_all();
  /// Throws Error("invalid-trace") when I is provably not stationary.
  static FilterHandle trace(const FilterHandle& parent, const SetExpr& I);
  /// {A : A ∩ N1 ∈ F1(N1) and A ∩ N2 ∈ F2(N2)} for disjoint N1, N2.
  static FilterHandle sum(const FilterHandle& f1, const SetExpr& n1, const FilterHandle& f2,
                          const SetExpr& n2);
  /// Generated by rectangles A1 × A2 (rows from F1, columns from F2) under
  /// the diagonal pairing.
  static FilterHandle product(const FilterHandle& f1, const FilterHandle& f2);

  Kind kind() const;
  std::string name() const;

  // Composite accessors.
  const FilterHandle& parent() const;   // Trace
  const SetExpr& trace_set() const;     // Trace
  const FilterHandle& part(int i) const; // Sum, Product (i = 0, 1)
  const SetExpr& part_set(int i) const;  // Sum

  /// CountableBase: B_k for k >= 1.
  SetExpr base_set(Nat k) const;
  /// CountableBase: the last listed base set (B_1 ⊇ ... ⊇ B_r).
  const SetExpr& base_tail() const;
  bool tails_base() const;

  json to_json() const;
  static FilterHandle from_json(const json& j);
  /// "frechet", "statistical", "countableBase", "columnFD", "columnFd".
  static FilterHandle from_name(const std::string& name);

  struct Impl;

private:
  explicit FilterHandle(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

Verdict contains(const FilterHandle& f, const SetExpr& a, Nat horizon);
/// A is stationary iff N \ A is not a member.
Verdict is_stationary(const FilterHandle& f, const SetExpr& a, Nat horizon);

/// Every subset of I with counting O(log n) is F-null.
bool log_sparse_sets_null(const FilterHandle& f, const SetExpr& I);

// ---------------------------------------------------------------------------
// Decreasing chains of members

class BaseChain {
public:
  enum class Kind { Tails, ColumnTails, ColumnRows, Constant, IntersectTails, Explicit };

  /// A_n = N \ {1..step·n}.
  static BaseChain tails(Nat step = 1);
  /// A_n = ⋃_{c>=n} D_c.
  static BaseChain column_tails();
  /// A_n = cells in rows > n.
  static BaseChain column_rows();
  /// A_n = S for all n.
  static BaseChain constant(SetExpr s);
  /// A_n = S ∩ (N \ {1..step·n}).
  static BaseChain intersect_tails(SetExpr s, Nat step = 1);
  /// A_1, ..., A_r as listed, then A_n = A_r. Decreasingness is verified.
  static BaseChain explicit_list(std::vector<SetExpr> sets, Nat check_limit = 1 << 12);

  Kind kind() const { return kind_; }
  SetExpr at(Nat n) const;
  /// The n with j ∈ A_n \ A_(n+1); absent when j ∉ A_1 or j lies in every A_n.
  std::optional<Nat> layer(Nat j) const;
  bool in_first(Nat j) const;

  json to_json() const;
  static BaseChain from_json(const json& j);

private:
  Kind kind_ = Kind::Tails;
  Nat step_ = 1;
  std::vector<SetExpr> sets_;
};

// ---------------------------------------------------------------------------
// Witnesses and refuters

Verdict block_respecting_check(const FilterHandle& f, const SetExpr& I, const Blocking& d,
                               Nat horizon);
Verdict diagonal_check(const FilterHandle& f, const BaseChain& chain, const SetExpr& I, Nat horizon);
Verdict strongly_diagonal_witness(const FilterHandle& f, const BaseChain& chain, const SetExpr& I,
                                  Nat horizon);

struct SplitResult {
  SetExpr first;
  SetExpr second;
  Verdict first_stationary;
  Verdict second_stationary;
};

SplitResult split_stationary(const FilterHandle& f, const SetExpr& I, Nat horizon);

struct EmbeddingReport {
  std::shared_ptr<const StandardMap> map;
  json descriptor;
  Verdict property;
};

/// Order-preserving bijection N -> J for a standard J and the check
/// A ∈ F  <=>  s(A) ∈ F(J) on `samples` seeded sets.
EmbeddingReport standard_embedding(const FilterHandle& f, const SetExpr& J, Nat samples, Nat seed,
                                   Nat horizon);

} // namespace filterlab
