#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli/cli.hpp"

using namespace filterlab;

namespace {

struct Outcome {
  int code;
  std::string out, err;
  json report() const { return json::parse(out); }
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "filterlab");
  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / ("filterlab-test-" + name);
  std::ofstream(p) << body;
  return p.string();
}

json without_elapsed(json r) {
  r.erase("elapsedMs");
  return r;
}

} // namespace

TEST_CASE("statistical block-respecting example exits 10") {
  const Outcome o = run_cli({"check-block-respecting", "--filter", "statistical", "--blocking", "dyadic", "--horizon", "1048576"});
  CHECK(o.code == cli::kExitRefuted);
  const json r = o.report();
  CHECK(r.at("status") == "Refuted");
  CHECK(r.at("command") == "check-block-respecting");
  CHECK(r.at("certificates").at("block-respecting").at("checks").size() >= 3);
  for (const char* key : {"inputsDigest", "verdicts", "horizon", "seed", "elapsedMs", "toolVersion"})
    CHECK(r.contains(key));
}

TEST_CASE("exit codes follow the verdict") {
  CHECK(run_cli({"check-block-respecting", "--filter", "frechet", "--set", "evens", "--horizon", "1000"}).code == 0);
  CHECK(run_cli({"check-diagonal", "--filter", "statistical", "--chain", "tails", "--horizon", "1000"}).code ==
        cli::kExitConsistent);
  CHECK(run_cli({"check-convergence", "--filter", "statistical", "--seq", "square_indicator", "--limit", "0"}).code == 0);
  const Outcome bad = run_cli({"check-convergence", "--filter", "frechet", "--seq", "alternating", "--limit", "1"});
  CHECK(bad.code == cli::kExitRefuted);
  CHECK(bad.report().contains("clusterRefutation"));
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"no-such-command"}).code == cli::kExitUsage);
  CHECK(run_cli({"check-block-respecting", "--filter", "ultrafilter"}).code == cli::kExitUsage);
  CHECK(run_cli({"demo", "theorem99"}).code == cli::kExitUsage);
  CHECK(run_cli({"build-counterexample", "--filter", "frechet", "--horizon", "4096"}).code == cli::kExitUsage);
}

TEST_CASE("malformed JSON reports a location") {
  const std::string path = temp_file("bad.json", "{\n  \"kind\": \"trace\",\n  \"parent\": ,\n}");
  const Outcome o = run_cli({"check-block-respecting", "--filter", path});
  CHECK(o.code == cli::kExitUsage);
  CHECK(o.err.find(path + ":3:") != std::string::npos);
}

TEST_CASE("tampered certificate fails verification") {
  const Outcome o = run_cli({"check-block-respecting", "--filter", "statistical", "--horizon", "65536"});
  json r = o.report();
  const std::string good = temp_file("good.json", r.dump());
  CHECK(run_cli({"verify-certificate", "--in", good}).code == 0);
  r["certificates"]["block-respecting"]["checks"][0]["lhs"] = "99";
  const std::string bad = temp_file("tampered.json", r.dump());
  const Outcome v = run_cli({"verify-certificate", "--in", bad});
  CHECK(v.code == cli::kExitRefuted);
  CHECK(v.report().at("certificates").at("certificate").at("failures").size() >= 1);
}

TEST_CASE("reports are deterministic apart from elapsed time") {
  const std::vector<std::string> args = {"build-counterexample", "--filter", "statistical", "--samples", "10", "--seed", "4", "--horizon", "4096"};
  const Outcome a = run_cli(args), b = run_cli(args);
  REQUIRE(a.code == 0);
  CHECK(without_elapsed(a.report()) == without_elapsed(b.report()));
  const Outcome c = run_cli({"build-counterexample", "--filter", "statistical", "--samples", "10", "--seed", "5", "--horizon", "4096"});
  CHECK(a.report().at("inputsDigest") != c.report().at("inputsDigest"));
}

TEST_CASE("horizon cap from the environment") {
  setenv("FILTERLAB_MAX_HORIZON", "5000", 1);
  const Outcome o = run_cli({"check-block-respecting", "--filter", "statistical", "--horizon", "1048576"});
  unsetenv("FILTERLAB_MAX_HORIZON");
  CHECK(o.report().at("horizon") == 5000);
}

TEST_CASE("sum filter demo") {
  const Outcome o = run_cli({"demo", "theorem15", "--horizon", "100000"});
  CHECK(o.code == 0);
  const json r = o.report();
  CHECK(r.at("certificates").size() == 2);
  std::map<std::string, std::string> status;
  for (const auto& v : r.at("verdicts"))
    status[v.at("id")] = v.at("status");
  CHECK(status.at("sum-block-respecting") == "Refuted");
  CHECK(status.at("trace-odds-block-respecting") == "Proved");
}

TEST_CASE("remaining subcommands") {
  CHECK(run_cli({"split-stationary", "--filter", "statistical", "--set", "evens", "--horizon", "10000"}).code == 0);
  CHECK(run_cli({"check-strongly-diagonal", "--filter", "countableBase", "--chain", "{\"kind\":\"tails\",\"step\":2}",
                 "--horizon", "1000"})
            .code == 0);
  CHECK(run_cli({"extract-gliding-hump", "--seq", "perturbed_basis", "--delta-first", "1/32", "--delta-ratio", "1/2",
                 "--horizon", "2000"})
            .code == 0);
  CHECK(run_cli({"cesaro", "--seq", "alternating", "--horizon", "10000"}).code == 0);
  const std::string out = (std::filesystem::temp_directory_path() / "filterlab-test-out.json").string();
  CHECK(run_cli({"demo", "remark5", "--horizon", "20000", "--out", out}).code == 0);
  std::ifstream in(out);
  CHECK(json::parse(in).at("command") == "demo");
}
