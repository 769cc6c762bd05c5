#pragma once

#include <string_view>
#include <vector>

#include <json.hpp>

#include "filterlab/rational.hpp"

namespace filterlab {

using json = nlohmann::json;

enum class Status { Proved, Refuted, Consistent };

/// Three-valued truth used by the structural set analysis.
enum class Tri { Yes, No, Unknown };

std::string_view to_string(Status status);
Status status_from_string(std::string_view text);

Tri tri_and(Tri a, Tri b);
Tri tri_or(Tri a, Tri b);
Tri tri_not(Tri a);
inline Tri tri(bool b) { return b ? Tri::Yes : Tri::No; }

/// Result of every check. Proved and Refuted verdicts carry a certificate
/// that `verify_certificate` can re-check; Consistent records the largest
/// horizon at which no contradiction was found.
struct Verdict {
  Status status = Status::Consistent;
  json certificate = json::object();
  Nat horizon = 0;

  static Verdict proved(json certificate, Nat horizon = 0) {
    return {Status::Proved, std::move(certificate), horizon};
  }
  static Verdict refuted(json certificate, Nat horizon = 0) {
    return {Status::Refuted, std::move(certificate), horizon};
  }
  static Verdict consistent(json certificate, Nat horizon = 0) {
    return {Status::Consistent, std::move(certificate), horizon};
  }

  bool is_proved() const { return status == Status::Proved; }
  bool is_refuted() const { return status == Status::Refuted; }
  bool is_consistent() const { return status == Status::Consistent; }
};

json to_json(const Verdict& verdict);
Verdict verdict_from_json(const json& j);

/// Proved iff all parts are Proved; Refuted iff any part is Refuted.
Verdict verdict_all(std::vector<Verdict> parts, std::string_view reason, Nat horizon);
/// Proved iff some part is Proved; Refuted iff all parts are Refuted.
Verdict verdict_any(std::vector<Verdict> parts, std::string_view reason, Nat horizon);
/// Swaps Proved and Refuted.
Verdict verdict_not(Verdict v, std::string_view reason);

/// An inequality record {lhs, rhs, relation} as stored in certificates.
/// `eval`, when present, tells the independent checker how to recompute lhs.
json inequality(std::string_view id, const Rational& lhs, std::string_view relation,
                const Rational& rhs, json eval = nullptr);
bool relation_holds(const Rational& lhs, std::string_view relation, const Rational& rhs);

} // namespace filterlab
