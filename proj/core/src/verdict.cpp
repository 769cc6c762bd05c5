#include "filterlab/verdict.hpp"

namespace filterlab {

std::string_view to_string(Status status) {
  switch (status) {
  case Status::Proved:
    return "Proved";
  case Status::Refuted:
    return "Refuted";
  case Status::Consistent:
    return "Consistent";
  }
  return "Consistent";
}

Status status_from_string(std::string_view text) {
  if (text == "Proved")
    return Status::Proved;
  if (text == "Refuted")
    return Status::Refuted;
  if (text == "Consistent")
    return Status::Consistent;
  throw Error("invalid-verdict", "unknown verdict status '" + std::string(text) + "'");
}

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::No || b == Tri::No)
    return Tri::No;
  if (a == Tri::Yes && b == Tri::Yes)
    return Tri::Yes;
  return Tri::Unknown;
}

Tri tri_or(Tri a, Tri b) {
  if (a == Tri::Yes || b == Tri::Yes)
    return Tri::Yes;
  if (a == Tri::No && b == Tri::No)
    return Tri::No;
  return Tri::Unknown;
}

Tri tri_not(Tri a) {
  if (a == Tri::Yes)
    return Tri::No;
  if (a == Tri::No)
    return Tri::Yes;
  return Tri::Unknown;
}

json to_json(const Verdict& verdict) {
  return {{"status", to_string(verdict.status)},
          {"certificate", verdict.certificate},
          {"horizon", verdict.horizon}};
}

Verdict verdict_from_json(const json& j) {
  Verdict v;
  v.status = status_from_string(j.at("status").get<std::string>());
  v.certificate = j.value("certificate", json::object());
  v.horizon = j.value("horizon", Nat{0});
  return v;
}

namespace {
json parts_json(const std::vector<Verdict>& parts) {
  json arr = json::array();
  for (const auto& p : parts)
    arr.push_back(to_json(p));
  return arr;
}
} // namespace

Verdict verdict_all(std::vector<Verdict> parts, std::string_view reason, Nat horizon) {
  bool all_proved = true;
  for (const auto& p : parts) {
    if (p.is_refuted())
      return Verdict::refuted({{"kind", "conjunction"}, {"reason", reason}, {"failing", to_json(p)}},
                              horizon);
    all_proved = all_proved && p.is_proved();
  }
  json cert{{"kind", "conjunction"}, {"reason", reason}, {"parts", parts_json(parts)}};
  return all_proved ? Verdict::proved(cert, horizon) : Verdict::consistent(cert, horizon);
}

Verdict verdict_any(std::vector<Verdict> parts, std::string_view reason, Nat horizon) {
  bool all_refuted = true;
  for (const auto& p : parts) {
    if (p.is_proved())
      return Verdict::proved({{"kind", "disjunction"}, {"reason", reason}, {"witness", to_json(p)}},
                             horizon);
    all_refuted = all_refuted && p.is_refuted();
  }
  json cert{{"kind", "disjunction"}, {"reason", reason}, {"parts", parts_json(parts)}};
  return all_refuted ? Verdict::refuted(cert, horizon) : Verdict::consistent(cert, horizon);
}

Verdict verdict_not(Verdict v, std::string_view reason) {
  if (v.status == Status::Proved)
    v.status = Status::Refuted;
  else if (v.status == Status::Refuted)
    v.status = Status::Proved;
  v.certificate = {{"kind", "negation"}, {"reason", reason}, {"inner", v.certificate}};
  return v;
}

json inequality(std::string_view id, const Rational& lhs, std::string_view relation,
                const Rational& rhs, json eval) {
  json rec{{"id", id}, {"lhs", to_string(lhs)}, {"relation", relation}, {"rhs", to_string(rhs)}};
  if (!eval.is_null())
    rec["eval"] = std::move(eval);
  return rec;
}

bool relation_holds(const Rational& lhs, std::string_view relation, const Rational& rhs) {
  if (relation == "<")
    return lhs < rhs;
  if (relation == "<=")
    return lhs <= rhs;
  if (relation == "=")
    return lhs == rhs;
  if (relation == ">=")
    return lhs >= rhs;
  if (relation == ">")
    return lhs > rhs;
  throw Error("invalid-relation", "unknown relation '" + std::string(relation) + "'");
}

} // namespace filterlab
