#pragma once

// Independent re-checking of certificates. Every inequality record
// {id, lhs, relation, rhs} found anywhere in the document is re-evaluated;
// records with an `eval` descriptor have their lhs recomputed from scratch.

#include <string>
#include <vector>

#include "filterlab/verdict.hpp"

namespace filterlab {

struct CertificateCheck {
  bool valid = true;
  Nat inequalities = 0; // records whose relation was checked
  Nat recomputed = 0;   // records whose lhs was recomputed from `eval`
  Nat skipped = 0;      // eval descriptors that cannot be rebuilt (user-defined sequences)
  std::vector<std::string> failures;

  json to_json() const;
};

/// Descriptors: counting {set, n}, counting_ratio {set, n},
/// pieces_meeting {blocking, n}, layer_count {chain, witness},
/// tail_mass / head_mass {seq, n, m}, perturbation {seq, n, lo, hi},
/// walsh_abs_sum_squared {a}, walsh_squared_norm {d}.
CertificateCheck verify_certificate(const json& document);

} // namespace filterlab
