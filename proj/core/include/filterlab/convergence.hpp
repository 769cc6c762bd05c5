#pragma once

// Filter limits of scalar and l1-valued sequences, the stationary-set
// refuter for cluster points, almost-Schur checks and the comparison of
// statistical convergence with strong Cesàro summability.

#include <optional>
#include <vector>

#include "filterlab/filters.hpp"
#include "filterlab/l1seq.hpp"

namespace filterlab {

enum class Mode { Scalar, Coordinatewise, Weak, Norm };

std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view text);

struct ConvergenceQuery {
  FilterHandle filter = FilterHandle::frechet();
  SeqGen seq = canonical_basis();
  Rational scalar_limit = 0; // Scalar mode
  L1Vec vector_limit;        // other modes
  Mode mode = Mode::Norm;
  std::vector<TestFunctional> family; // Weak mode, non-empty
  Rational eps = 1;
  Nat horizon = 1 << 12;
  /// Coordinatewise mode checks coordinates 1..coordinates.
  Nat coordinates = 32;

  void validate() const;
  json to_json() const;
  static ConvergenceQuery from_json(const json& j);
};

/// Decides whether {n : x_n is eps-close to the limit} belongs to the
/// filter. The index set is exact when the sequence declares it, detected
/// as an eventually periodic pattern on the second half of the horizon, or
/// bracketed between the good indices up to the horizon and that set plus
/// everything beyond the horizon.
Verdict f_limit(const ConvergenceQuery& q);

struct ClusterRefutation {
  SetExpr bad;     // {j : x_j outside the eps-neighborhood}
  Rational eps;
  Verdict stationary;
  std::string source; // "exact", "pattern" or "horizon"
  json context;       // which coordinate or functional failed

  json to_json() const;
};

/// The set of violating indices behind a refuted limit, with its
/// stationarity verdict. Absent unless f_limit refutes.
std::optional<ClusterRefutation> cluster_refuter(const ConvergenceQuery& q);

/// Proved when {n : ||x_n|| < tolerance} is stationary (proved exactly, or
/// when every tested window [h - window, h] up to the horizon contains a
/// small norm); Refuted when that set is certified non-stationary.
Verdict almost_schur_check(const FilterHandle& f, const SeqGen& seq, const Rational& tolerance,
                           Nat window, Nat horizon);

struct CesaroCheckpoint {
  Nat n = 0;
  bool exact = false;
  Rational average; // exact (1/n) Σ |x - x_j| when `exact`
  Rational lower;   // otherwise lower <= average <= upper
  Rational upper;
};

struct CesaroReport {
  Rational candidate;
  std::vector<CesaroCheckpoint> checkpoints;
  json to_json() const;
};

/// Averages (1/n) Σ_{j<=n} |x - x_j| at n = 10^k and at the horizon.
CesaroReport strong_cesaro(const SeqGen& seq, const Rational& candidate, Nat horizon);

/// Statistical diagnostic (the tolerance-bad set is statistically null)
/// against the Cesàro diagnostic (average below tolerance at the horizon).
/// Proved when they agree, Refuted when they disagree. Requires a declared
/// bound; throws Error("invalid-argument") otherwise.
Verdict stat_vs_cesaro(const SeqGen& seq, const Rational& candidate, Nat horizon,
                       const Rational& tolerance);

} // namespace filterlab
