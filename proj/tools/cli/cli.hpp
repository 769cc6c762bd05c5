#pragma once

#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "filterlab/constructions.hpp"

namespace filterlab::cli {

inline constexpr int kExitProved = 0;
inline constexpr int kExitRefuted = 10;
inline constexpr int kExitConsistent = 20;
inline constexpr int kExitUsage = 2;

/// Bad flags, unreadable files or malformed definitions; maps to exit 2.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Reads a definition given as a file path, inline JSON or a bare name.
/// Parse errors report the source with line and column.
json load_definition(const std::string& text, const std::string& flag);

FilterHandle parse_filter(const std::string& text);
SetExpr parse_set(const std::string& text);
Blocking parse_blocking(const std::string& text);
BaseChain parse_chain(const std::string& text);
SeqGen parse_sequence(const std::string& text);

/// The requested horizon, lowered to FILTERLAB_MAX_HORIZON when set.
Nat capped_horizon(Nat requested);

std::string fnv1a_hex(const std::string& bytes);

/// Collects the checks of one invocation and renders the run report.
class Report {
public:
  Report(std::string command, json inputs, Nat horizon, Nat seed);

  void add(const std::string& id, const Verdict& v);
  void note(const std::string& key, json value) { extra_[key] = std::move(value); }
  /// Overrides the status derived from the checks.
  void set_status(Status s) { status_ = s; has_status_ = true; }

  Status status() const;
  json to_json(double elapsed_ms) const;

private:
  std::string command_;
  json inputs_;
  Nat horizon_, seed_;
  std::map<std::string, Verdict> checks_;
  json extra_ = json::object();
  Status status_ = Status::Consistent;
  bool has_status_ = false;
};

int exit_code(Status s);

/// Names accepted by `demo`.
const std::vector<std::string>& demo_names();
/// Runs a named demo into `report`; `horizon` and `samples` are upper bounds.
void run_demo(const std::string& name, Report& report, Nat horizon, Nat seed, Nat samples);

/// Parses argv, runs the subcommand and writes the report to `out` (or
/// --out). Diagnostics go to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace filterlab::cli
