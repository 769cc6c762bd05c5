#include "filterlab/certificate.hpp"

#include <map>

#include "filterlab/constructions.hpp"

namespace filterlab {

json CertificateCheck::to_json() const {
  return {{"valid", valid},
          {"inequalities", inequalities},
          {"recomputed", recomputed},
          {"skipped", skipped},
          {"failures", failures}};
}

namespace {

bool is_inequality(const json& j) {
  return j.is_object() && j.contains("id") && j.contains("lhs") && j.contains("relation") &&
         j.contains("rhs") && j["lhs"].is_string() && j["rhs"].is_string();
}

Rational recompute(const json& ev) {
  const std::string fn = ev.at("fn").get<std::string>();
  if (fn == "counting")
    return from_nat(counting(SetExpr::from_json(ev.at("set")), ev.at("n").get<Nat>()));
  if (fn == "counting_ratio") {
    const Nat n = ev.at("n").get<Nat>();
    return from_nat(counting(SetExpr::from_json(ev.at("set")), n)) / from_nat(n);
  }
  if (fn == "pieces_meeting")
    return from_nat(Blocking::from_json(ev.at("blocking")).pieces_meeting(ev.at("n").get<Nat>()));
  if (fn == "layer_count") {
    const BaseChain chain = BaseChain::from_json(ev.at("chain"));
    std::map<Nat, Nat> per_layer;
    Nat worst = 0;
    for (const auto& j : ev.at("witness"))
      if (auto l = chain.layer(j.get<Nat>())) worst = std::max(worst, ++per_layer[*l]);
    return from_nat(worst);
  }
  if (fn == "tail_mass" || fn == "head_mass") {
    const SeqGen seq = sequence_from_json(ev.at("seq"));
    const L1Vec v = seq.at(ev.at("n").get<Nat>());
    const Nat m = ev.at("m").get<Nat>();
    return fn == "tail_mass" ? tail_mass(v, m) : head_mass(v, m);
  }
  if (fn == "perturbation") {
    const SeqGen seq = sequence_from_json(ev.at("seq"));
    const L1Vec v = seq.at(ev.at("n").get<Nat>());
    const Nat lo = ev.at("lo").get<Nat>(), hi = ev.at("hi").get<Nat>();
    Rational s = 0;
    for (const auto& [k, x] : v.coords)
      if (k < lo || k > hi) s += abs_value(x);
    return s;
  }
  if (fn == "walsh_abs_sum_squared") {
    std::vector<long long> a = ev.at("a").get<std::vector<long long>>();
    const __int128 s = walsh_abs_sum(a);
    // |s| < 2^96 for the admissible dimensions and coefficient sizes.
    const auto hi = static_cast<long long>(s >> 48);
    const auto lo = static_cast<long long>(s & ((static_cast<__int128>(1) << 48) - 1));
    mpz_class z = mpz_class(static_cast<long>(hi)) * (mpz_class(1) << 48) + mpz_class(static_cast<long>(lo));
    return Rational(z * z);
  }
  if (fn == "walsh_squared_norm") {
    const WalshSystem w = walsh_system(ev.at("d").get<unsigned>());
    return squared_norm1(w.vectors.front());
  }
  throw Error("invalid-certificate", "unknown eval function " + fn);
}

void walk(const json& j, CertificateCheck& out) {
  if (is_inequality(j)) {
    const std::string id = j["id"].get<std::string>();
    try {
      const Rational lhs = parse_rational(j["lhs"].get<std::string>());
      const Rational rhs = parse_rational(j["rhs"].get<std::string>());
      const std::string rel = j["relation"].get<std::string>();
      ++out.inequalities;
      if (!relation_holds(lhs, rel, rhs)) {
        out.valid = false;
        out.failures.push_back(id + ": recorded values violate the relation");
      }
      if (j.contains("eval")) {
        try {
          const Rational again = recompute(j["eval"]);
          ++out.recomputed;
          if (again != lhs) {
            out.valid = false;
            out.failures.push_back(id + ": recomputed lhs " + to_string(again) + " differs from " +
                                   to_string(lhs));
          }
        } catch (const Error& e) {
          if (e.code() != "invalid-argument") throw;
          ++out.skipped; // the descriptor names something that cannot be rebuilt
        }
      }
    } catch (const Error& e) {
      out.valid = false;
      out.failures.push_back(id + ": " + e.what());
    } catch (const json::exception& e) {
      out.valid = false;
      out.failures.push_back(id + ": malformed record (" + e.what() + ")");
    }
    return;
  }
  if (j.is_object() || j.is_array())
    for (const auto& child : j) walk(child, out);
}

} // namespace

CertificateCheck verify_certificate(const json& document) {
  CertificateCheck out;
  walk(document, out);
  return out;
}

} // namespace filterlab
