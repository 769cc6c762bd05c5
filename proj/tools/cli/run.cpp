#include <chrono>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "cli.hpp"
#include "filterlab/certificate.hpp"

namespace filterlab::cli {

namespace {

struct Options {
  std::string filter = "frechet";
  std::string set = "all";
  std::string blocking = "dyadic";
  std::string seq;
  std::string chain;
  std::string mode;
  std::string limit;
  std::string family;
  std::string epsilon = "1/2";
  std::string delta_first, delta_ratio;
  std::string in;
  std::string out;
  Nat horizon = Nat{1} << 16;
  Nat seed = 1;
  Nat samples = 200;
  Nat coordinates = 32;
};

Rational parse_eps(const std::string& text, const char* flag) {
  try {
    return parse_rational(text);
  } catch (const Error& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--horizon", o.horizon, "Largest index examined")->capture_default_str();
  sub->add_option("--seed", o.seed, "Seed for sampled checks")->capture_default_str();
  sub->add_option("--out", o.out, "Write the report here instead of stdout");
}

DeltaSchedule schedule_of(const Options& o, const Rational& eps) {
  if (o.delta_first.empty() && o.delta_ratio.empty())
    return DeltaSchedule::standard(eps);
  try {
    return DeltaSchedule::geometric(eps, parse_eps(o.delta_first.empty() ? "0" : o.delta_first, "--delta-first"),
                                    parse_eps(o.delta_ratio.empty() ? "1/2" : o.delta_ratio, "--delta-ratio"));
  } catch (const Error& e) {
    throw UsageError(std::string("--delta-first/--delta-ratio: ") + e.what());
  }
}

json nat_list(const std::vector<Nat>& v) { return json(v); }

// Each command fills the report; the caller handles timing and output.
using Command = std::function<Report(const Options&)>;

Report check_convergence(const Options& o) {
  if (o.seq.empty())
    throw UsageError("--seq is required");
  ConvergenceQuery q;
  q.filter = parse_filter(o.filter);
  q.seq = parse_sequence(o.seq);
  q.mode = o.mode.empty() ? (q.seq.is_vector() ? Mode::Norm : Mode::Scalar) : mode_from_string(o.mode);
  q.eps = parse_eps(o.epsilon, "--epsilon");
  q.horizon = capped_horizon(o.horizon);
  q.coordinates = o.coordinates;
  if (!o.limit.empty()) {
    if (q.mode == Mode::Scalar)
      q.scalar_limit = parse_eps(o.limit, "--limit");
    else
      q.vector_limit = L1Vec::from_json(load_definition(o.limit, "--limit"));
  }
  if (!o.family.empty()) {
    const json fam = load_definition(o.family, "--family");
    if (!fam.is_array())
      throw UsageError("--family: expected a JSON array of functionals");
    for (const auto& f : fam)
      q.family.push_back(TestFunctional::from_json(f));
  }
  q.validate();
  Report r("check-convergence", q.to_json(), q.horizon, o.seed);
  const Verdict v = f_limit(q);
  r.add("f-limit", v);
  if (v.is_refuted())
    if (auto c = cluster_refuter(q))
      r.note("clusterRefutation", c->to_json());
  return r;
}

json set_inputs(const Options& o, Nat horizon) {
  return {{"filter", parse_filter(o.filter).to_json()}, {"set", parse_set(o.set).to_json()}, {"horizon", horizon}};
}

Report check_block_respecting(const Options& o) {
  const Nat h = capped_horizon(o.horizon);
  const FilterHandle f = parse_filter(o.filter);
  const SetExpr I = parse_set(o.set);
  const Blocking d = parse_blocking(o.blocking);
  json inputs = set_inputs(o, h);
  inputs["blocking"] = d.to_json();
  Report r("check-block-respecting", inputs, h, o.seed);
  r.add("block-respecting", block_respecting_check(f, I, d, h));
  return r;
}

Report check_chain(const Options& o, bool strongly) {
  if (o.chain.empty())
    throw UsageError("--chain is required");
  const Nat h = capped_horizon(o.horizon);
  const FilterHandle f = parse_filter(o.filter);
  const SetExpr I = parse_set(o.set);
  const BaseChain chain = parse_chain(o.chain);
  json inputs = set_inputs(o, h);
  inputs["chain"] = chain.to_json();
  Report r(strongly ? "check-strongly-diagonal" : "check-diagonal", inputs, h, o.seed);
  if (strongly)
    r.add("strongly-diagonal", strongly_diagonal_witness(f, chain, I, h));
  else
    r.add("diagonal", diagonal_check(f, chain, I, h));
  return r;
}

Report split(const Options& o) {
  const Nat h = capped_horizon(o.horizon);
  const FilterHandle f = parse_filter(o.filter);
  const SetExpr I = parse_set(o.set);
  Report r("split-stationary", set_inputs(o, h), h, o.seed);
  const SplitResult s = split_stationary(f, I, h);
  r.add("first-stationary", s.first_stationary);
  r.add("second-stationary", s.second_stationary);
  r.note("halves", {{"first", s.first.to_json()}, {"second", s.second.to_json()}});
  return r;
}

Report extract(const Options& o) {
  if (o.seq.empty())
    throw UsageError("--seq is required");
  const Nat h = capped_horizon(o.horizon);
  const FilterHandle f = parse_filter(o.filter);
  const SetExpr I = parse_set(o.set);
  const SeqGen seq = parse_sequence(o.seq);
  const Rational eps = parse_eps(o.epsilon, "--epsilon");
  const DeltaSchedule sch = schedule_of(o, eps);
  json inputs = set_inputs(o, h);
  inputs["seq"] = seq.to_json();
  inputs["schedule"] = sch.to_json();
  Report r("extract-gliding-hump", inputs, h, o.seed);
  const ExtractionResult e = extract_basic_subsequence(f, seq, I, sch, h);
  r.add("extraction", e.verdict);
  r.note("extraction", {{"cuts", nat_list(e.cuts)},
                        {"boundaries", nat_list(e.boundaries)},
                        {"selected", nat_list(e.selected)},
                        {"kept", nat_list(e.kept)}});
  return r;
}

Report counterexample(const Options& o) {
  const Nat h = capped_horizon(o.horizon);
  const FilterHandle f = parse_filter(o.filter);
  const SetExpr I = parse_set(o.set);
  const Blocking d = parse_blocking(o.blocking);
  const Rational eps = parse_eps(o.epsilon, "--epsilon");
  json inputs = set_inputs(o, h);
  inputs["blocking"] = d.to_json();
  inputs["epsilon"] = to_string(eps);
  inputs["samples"] = o.samples;
  inputs["seed"] = o.seed;
  Report r("build-counterexample", inputs, h, o.seed);
  const Counterexample cx = build_block_counterexample(f, I, d, eps, h);
  r.add("weak-certificate", validate_weak_certificate(cx, o.samples, o.seed));
  r.note("counterexample", {{"sequence", cx.seq.to_json()},
                            {"dMax", cx.d_max},
                            {"coveredPieces", cx.covered_pieces},
                            {"coveredUpto", cx.covered_upto},
                            {"certificate", cx.certificate}});
  return r;
}

Report cesaro(const Options& o) {
  if (o.seq.empty())
    throw UsageError("--seq is required");
  const Nat h = capped_horizon(o.horizon);
  const SeqGen seq = parse_sequence(o.seq);
  if (seq.is_vector())
    throw UsageError("--seq: cesaro needs a scalar sequence");
  const Rational candidate = o.limit.empty() ? Rational(0) : parse_eps(o.limit, "--limit");
  const Rational tol = parse_eps(o.epsilon, "--epsilon");
  json inputs = {{"seq", seq.to_json()}, {"limit", to_string(candidate)}, {"epsilon", to_string(tol)}, {"horizon", h}};
  Report r("cesaro", inputs, h, o.seed);
  r.add("stat-vs-cesaro", stat_vs_cesaro(seq, candidate, h, tol));
  return r;
}

Report verify(const Options& o) {
  if (o.in.empty())
    throw UsageError("--in is required");
  const json doc = load_definition(o.in, "--in");
  Report r("verify-certificate", {{"documentDigest", fnv1a_hex(doc.dump())}}, 0, o.seed);
  const CertificateCheck c = verify_certificate(doc);
  r.add("certificate", c.valid ? Verdict::proved(c.to_json()) : Verdict::refuted(c.to_json()));
  return r;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Filter convergence checks and constructions on N"};
  app.set_version_flag("--version", std::string(FILTERLAB_VERSION));
  app.require_subcommand(1);
  Options o;
  std::string demo_name;
  std::map<CLI::App*, Command> commands;

  auto filter_opt = [&](CLI::App* s) { s->add_option("--filter", o.filter, "Filter name or JSON file")->capture_default_str(); };
  auto set_opt = [&](CLI::App* s) { s->add_option("--set", o.set, "Ground set name or JSON file")->capture_default_str(); };
  auto blocking_opt = [&](CLI::App* s) { s->add_option("--blocking", o.blocking, "Blocking name or JSON file")->capture_default_str(); };
  auto seq_opt = [&](CLI::App* s) { s->add_option("--seq", o.seq, "Sequence name or JSON file"); };
  auto eps_opt = [&](CLI::App* s) { s->add_option("--epsilon", o.epsilon, "Tolerance p/q")->capture_default_str(); };

  CLI::App* s = app.add_subcommand("check-convergence", "Decide F-convergence of a sequence");
  filter_opt(s), seq_opt(s), eps_opt(s), add_common(s, o);
  s->add_option("--mode", o.mode, "scalar, norm, weak or coordinatewise");
  s->add_option("--limit", o.limit, "Limit: p/q for scalars, L1Vec JSON for vectors");
  s->add_option("--family", o.family, "JSON array of test functionals (weak mode)");
  s->add_option("--coordinates", o.coordinates, "Coordinates checked in coordinatewise mode")->capture_default_str();
  commands[s] = check_convergence;

  s = app.add_subcommand("check-block-respecting", "Block-respecting check on a ground set");
  filter_opt(s), set_opt(s), blocking_opt(s), add_common(s, o);
  commands[s] = check_block_respecting;

  s = app.add_subcommand("check-diagonal", "Diagonality along a decreasing chain");
  filter_opt(s), set_opt(s), add_common(s, o);
  s->add_option("--chain", o.chain, "Chain name (tails, columnTails, columnRows) or JSON file");
  commands[s] = [](const Options& opt) { return check_chain(opt, false); };

  s = app.add_subcommand("check-strongly-diagonal", "Strong diagonality witness along a chain");
  filter_opt(s), set_opt(s), add_common(s, o);
  s->add_option("--chain", o.chain, "Chain name (tails, columnTails, columnRows) or JSON file");
  commands[s] = [](const Options& opt) { return check_chain(opt, true); };

  s = app.add_subcommand("split-stationary", "Split a stationary set into two stationary halves");
  filter_opt(s), set_opt(s), add_common(s, o);
  commands[s] = split;

  s = app.add_subcommand("extract-gliding-hump", "Extract a subsequence equivalent to a weighted basis");
  filter_opt(s), set_opt(s), seq_opt(s), eps_opt(s), add_common(s, o);
  s->add_option("--delta-first", o.delta_first, "First perturbation budget p/q");
  s->add_option("--delta-ratio", o.delta_ratio, "Geometric ratio of the budgets p/q");
  commands[s] = extract;

  s = app.add_subcommand("build-counterexample", "Walsh block counterexample with weak-null validation");
  filter_opt(s), set_opt(s), blocking_opt(s), eps_opt(s), add_common(s, o);
  s->add_option("--samples", o.samples, "Number of sampled functionals")->capture_default_str();
  commands[s] = counterexample;

  s = app.add_subcommand("cesaro", "Statistical against strong Cesaro convergence");
  seq_opt(s), add_common(s, o);
  s->add_option("--limit", o.limit, "Candidate limit p/q (default 0)");
  CLI::Option* cesaro_eps = s->add_option("--epsilon", o.epsilon, "Tolerance p/q (default 1/100)");
  commands[s] = [cesaro_eps](Options opt) {
    if (!cesaro_eps->count())
      opt.epsilon = "1/100";
    return cesaro(opt);
  };

  s = app.add_subcommand("verify-certificate", "Re-check every inequality of a certificate or report");
  s->add_option("--in", o.in, "Certificate or report JSON file");
  s->add_option("--out", o.out, "Write the report here instead of stdout");
  commands[s] = verify;

  s = app.add_subcommand("demo", "Run a packaged scenario");
  s->add_option("name", demo_name, "Scenario name")->required()->check(CLI::IsMember(demo_names()));
  add_common(s, o);
  s->add_option("--samples", o.samples, "Sample count for seeded checks")->capture_default_str();
  CLI::Option* demo_horizon = s->get_option("--horizon");
  commands[s] = [&demo_name, demo_horizon](const Options& opt) {
    // Demos default to 2^20 and cap their own sweeps below that.
    const Nat h = capped_horizon(demo_horizon->count() ? opt.horizon : Nat{1} << 20);
    Report r("demo", {{"demo", demo_name}, {"horizon", h}, {"seed", opt.seed}, {"samples", opt.samples}}, h, opt.seed);
    run_demo(demo_name, r, h, opt.seed, opt.samples);
    return r;
  };


  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::Success& e) {
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "filterlab: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Report> report;
  try {
    report = commands.at(chosen)(o);
  } catch (const UsageError& e) {
    err << "filterlab: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "filterlab: " << e.code() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "filterlab: invalid definition: " << e.what() << "\n";
    return kExitUsage;
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const std::string text = report->to_json(ms).dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!(f << text)) {
      err << "filterlab: cannot write " << o.out << "\n";
      return kExitUsage;
    }
  }
  return exit_code(report->status());
}

} // namespace filterlab::cli
