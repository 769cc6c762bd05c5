#include <doctest.h>

#include "filterlab/certificate.hpp"
#include "filterlab/constructions.hpp"

using namespace filterlab;

TEST_CASE("block-respecting certificate re-verifies") {
  const Verdict v = block_respecting_check(FilterHandle::statistical(), SetExpr::all(), Blocking::dyadic(), 1 << 20);
  const CertificateCheck c = verify_certificate(to_json(v));
  CHECK(c.valid);
  CHECK(c.recomputed >= 3);
  CHECK(c.failures.empty());
}

TEST_CASE("tampering is detected") {
  json cert = to_json(block_respecting_check(FilterHandle::statistical(), SetExpr::all(), Blocking::dyadic(), 1 << 20));
  json& checks = cert.at("certificate").at("checks");

  json relation_broken = cert;
  relation_broken["certificate"]["checks"][0]["lhs"] = "22";
  CHECK_FALSE(verify_certificate(relation_broken).valid);

  // still satisfies the relation, but the recomputed value differs
  json value_broken = cert;
  value_broken["certificate"]["checks"][0]["lhs"] = "20";
  const CertificateCheck c = verify_certificate(value_broken);
  CHECK_FALSE(c.valid);
  CHECK(c.failures.size() == 1);
  CHECK(checks.size() >= 1);
}

TEST_CASE("extraction and Walsh certificates re-verify") {
  const auto sch = DeltaSchedule::geometric(rational(1, 2), rational(1, 32), rational(1, 2));
  const ExtractionResult e = extract_basic_subsequence(FilterHandle::frechet(), perturbed_basis(), SetExpr::all(), sch, 2000);
  const CertificateCheck ce = verify_certificate(e.certificate);
  CHECK(ce.valid);
  CHECK(ce.recomputed > 0);

  const Verdict w = walsh_system(4).verify(50, 2);
  const CertificateCheck cw = verify_certificate(w.certificate);
  CHECK(cw.valid);
  CHECK(cw.recomputed > 0);
}

TEST_CASE("non-certificates") {
  CHECK(verify_certificate(json::object()).valid);
  CHECK(verify_certificate(json::object()).inequalities == 0);
  json bad = {{"checks", {{{"id", "x"}, {"lhs", "1"}, {"relation", "~"}, {"rhs", "1"}}}}};
  CHECK_FALSE(verify_certificate(bad).valid);
}
