#pragma once

// Constructive procedures for l1 sequences: block-basis perturbation
// checks, gliding-hump extraction, triangular extraction over columns,
// Walsh block systems and the block counterexample sequence.

#include <optional>
#include <vector>

#include "filterlab/convergence.hpp"
#include "filterlab/filters.hpp"
#include "filterlab/l1seq.hpp"

namespace filterlab {

/// δ_k = first · ratio^(k-1), with Σ δ_k = first / (1 - ratio) <= eps/8.
class DeltaSchedule {
public:
  /// Throws Error("invalid-argument") unless 0 < ratio < 1, first > 0 and
  /// the closed-form sum is at most eps/8.
  static DeltaSchedule geometric(Rational eps, Rational first, Rational ratio);
  /// first = eps/32, ratio = 1/2 (sum eps/16).
  static DeltaSchedule standard(Rational eps);

  Rational at(Nat k) const;
  Rational total() const;
  const Rational& eps() const { return eps_; }

  json to_json() const;
  static DeltaSchedule from_json(const json& j);

private:
  Rational eps_, first_, ratio_;
};

/// Inclusive coordinate interval [lo, hi]; lo > hi is empty.
struct CoordBlock {
  Nat lo = 1, hi = 0;
  json to_json() const { return {{"lo", lo}, {"hi", hi}}; }
};

struct PerturbationReport {
  bool accepted = false;
  std::string reason;              // rejection reason
  std::optional<Nat> offending;    // 1-based index of the rejected vector
  Rational eps, eps0;
  Rational c1;                     // 1 - eps/eps0
  Rational c1_statement_form;      // 1 - eps0/eps, recorded for comparison
  Nat samples = 0;
  Rational worst_ratio;            // min ||Σ a y|| / Σ |a| ||y|| over samples
  bool bounds_hold = false;
  json checks = json::array();

  json to_json() const;
};

/// Lower bound c1 Σ|a_n| ||y_n|| <= ||Σ a_n y_n|| <= Σ|a_n| ||y_n|| on seeded
/// coefficient vectors. Preconditions: ||y_n|| >= eps0 > eps > 0, disjoint
/// blocks and ||y_n - z_n|| < eps/2 strictly, z_n = y_n restricted to its block.
PerturbationReport perturbation_check(const std::vector<L1Vec>& ys,
                                      const std::vector<CoordBlock>& blocks, const Rational& eps,
                                      const Rational& eps0, Nat samples, Nat seed);

struct ExtractionResult {
  Verdict verdict; // Proved, or Consistent with a partial certificate
  std::vector<Nat> cuts;         // m(n) for n = 1..last used index
  std::vector<Nat> boundaries;   // n_1 < n_2 < ...
  std::vector<Nat> selected;     // j_1 < j_2 < ... (one per block)
  std::vector<Nat> kept;         // the stationary half
  std::optional<PerturbationReport> perturbation;
  json certificate;
};

/// Gliding-hump extraction of a subsequence equivalent to a weighted
/// canonical basis. Throws Error("precondition") when the sequence is not
/// coordinate-wise null along I or has a term of norm <= eps on I.
ExtractionResult extract_basic_subsequence(const FilterHandle& f, const SeqGen& seq,
                                           const SetExpr& I, const DeltaSchedule& schedule,
                                           Nat horizon);

struct ClaimResult {
  std::vector<Nat> picks;   // n_1, n_2, ... in triangular column order
  std::vector<Nat> columns; // the column of each pick
  PerturbationReport perturbation;
  json certificate;
};

/// Triangular extraction over the columns D_1, D_1, D_2, D_1, D_2, D_3, ...
/// with head masses below eps / 2^(i+3). Throws Error("precondition") when a
/// column has no admissible element within the horizon.
ClaimResult extract_fd_claim(const SeqGen& z, const DeltaSchedule& schedule, Nat picks, Nat horizon);

// ---------------------------------------------------------------------------
// Walsh systems and the block counterexample

/// Rows r = 1..d of the 2^d Walsh matrix: entry j (0-based) is
/// (-1)^(bit r-1 of j), scaled by 1 / (2^(d-1) sqrt 2).
struct WalshSystem {
  unsigned d = 1;
  std::vector<L1Vec> vectors; // coordinates 1..2^d, scale_sqrt_half set

  /// 2^(2d-1) Σ a^2 <= (Σ_j |<a, σ_j>|)^2 <= 2^(2d) Σ a^2 on seeded integer
  /// coefficient vectors plus unit and all-ones vectors.
  Verdict verify(Nat samples, Nat seed) const;
};

/// Σ over all 2^d sign patterns σ of |Σ_r a_r σ_r|, exact.
__int128 walsh_abs_sum(const std::vector<long long>& a);

/// Throws Error("invalid-argument") unless 1 <= d <= 16.
WalshSystem walsh_system(unsigned d);

struct Counterexample {
  SeqGen seq;
  Blocking blocking = Blocking::dyadic(); // the blocking of I used for the vectors
  Rational eps;
  Nat d_max = 0;              // ceil(2 / eps^2)
  Nat covered_pieces = 0;     // pieces with dimension <= 16
  Nat covered_upto = 0;       // largest index in a covered piece
  std::vector<Nat> offsets;   // coordinate offset of covered piece i (1-based)
  json certificate;
};

/// x_n = 0 off I; for n the p-th element of piece i, x_n is the p-th Walsh
/// vector of dimension |D_i| in a fresh coordinate block. Pieces of
/// dimension above 16 are not materialized.
SeqGen walsh_block_sequence(const SetExpr& I, const Blocking& d);

/// Throws Error("precondition") unless block_respecting_check(f, I, d)
/// is Refuted.
Counterexample build_block_counterexample(const FilterHandle& f, const SetExpr& I,
                                          const Blocking& d, const Rational& eps, Nat horizon);

/// Counts |{n ∈ D_k : f(x_n) >= eps}| for every covered piece k.
std::vector<Nat> block_violations(const Counterexample& cx, const TestFunctional& f);

/// Seeded functionals with values in {k/8 : |k| <= 8}; half are aligned with
/// sums of random subsets of each block's vectors. Proved when no piece
/// exceeds d_max for any functional.
Verdict validate_weak_certificate(const Counterexample& cx, Nat functionals, Nat seed);

struct OscillationReport {
  TestFunctional functional = TestFunctional::summing();
  json columns = json::array(); // per column: max, min, oscillation
  Rational inf_norm;
  bool refutes = false;         // some column oscillates by >= 2 inf ||z_n||
  json to_json() const;
};

/// Sign functional with f(z_n) = a_n ||z_n||, a_n = +1 on `positive` and
/// -1 elsewhere. Throws Error("invalid-argument") when supports of
/// z_1..z_horizon overlap.
OscillationReport oscillation_functional(const SeqGen& z, const SetExpr& positive, Nat horizon);

/// SeqGen::from_json plus {"name":"walsh_counterexample","params":{"I":..,"blocking":..}}.
SeqGen sequence_from_json(const json& j);

} // namespace filterlab
