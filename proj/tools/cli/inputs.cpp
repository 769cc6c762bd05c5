#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace filterlab::cli {

namespace {

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

json parse_located(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(source + ":" + location(text, e.byte) + ": malformed JSON (" + e.what() + ")");
  }
}

bool looks_inline(const std::string& text) {
  auto it = std::find_if(text.begin(), text.end(), [](char c) { return !std::isspace(static_cast<unsigned char>(c)); });
  return it != text.end() && (*it == '{' || *it == '[' || *it == '"');
}

// Runs a library parser and turns its complaints into usage errors.
template <class F>
auto guarded(const std::string& flag, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw UsageError(flag + ": invalid definition: " + e.what());
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.code() + ": " + e.what());
  }
}

} // namespace

json load_definition(const std::string& text, const std::string& flag) {
  if (looks_inline(text))
    return parse_located(text, flag);
  std::error_code ec;
  if (std::filesystem::is_regular_file(text, ec)) {
    std::ifstream in(text, std::ios::binary);
    if (!in)
      throw UsageError(flag + ": cannot read " + text);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_located(buf.str(), text);
  }
  if (text.find('/') != std::string::npos || text.ends_with(".json"))
    throw UsageError(flag + ": no such file " + text);
  return json(text);
}

FilterHandle parse_filter(const std::string& text) {
  return guarded("--filter", [&] { return FilterHandle::from_json(load_definition(text, "--filter")); });
}

SetExpr parse_set(const std::string& text) {
  const json j = load_definition(text, "--set");
  return guarded("--set", [&] {
    if (j.is_string()) {
      const std::string name = j.get<std::string>();
      if (name == "all") return SetExpr::all();
      if (name == "evens") return SetExpr::progression(2, 2);
      if (name == "odds") return SetExpr::progression(1, 2);
      if (name == "squares") return SetExpr::powers(2);
      throw Error("invalid-set", "unknown set name '" + name + "'");
    }
    return SetExpr::from_json(j);
  });
}

Blocking parse_blocking(const std::string& text) {
  return guarded("--blocking", [&] { return Blocking::from_json(load_definition(text, "--blocking")); });
}

BaseChain parse_chain(const std::string& text) {
  json j = load_definition(text, "--chain");
  if (j.is_string())
    j = json{{"kind", j}};
  return guarded("--chain", [&] { return BaseChain::from_json(j); });
}

SeqGen parse_sequence(const std::string& text) {
  return guarded("--seq", [&] { return sequence_from_json(load_definition(text, "--seq")); });
}

Nat capped_horizon(Nat requested) {
  const char* cap = std::getenv("FILTERLAB_MAX_HORIZON");
  if (cap == nullptr || *cap == '\0')
    return requested;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(cap, &end, 10);
  if (*end != '\0' || v == 0)
    throw UsageError("FILTERLAB_MAX_HORIZON must be a positive integer");
  return std::min<Nat>(requested, v);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------

Report::Report(std::string command, json inputs, Nat horizon, Nat seed)
    : command_(std::move(command)), inputs_(std::move(inputs)), horizon_(horizon), seed_(seed) {}

void Report::add(const std::string& id, const Verdict& v) { checks_[id] = v; }

Status Report::status() const {
  if (has_status_)
    return status_;
  if (checks_.size() == 1)
    return checks_.begin()->second.status;
  std::vector<Verdict> parts;
  for (const auto& [id, v] : checks_)
    parts.push_back(v);
  return verdict_all(std::move(parts), "", horizon_).status;
}

json Report::to_json(double elapsed_ms) const {
  json verdicts = json::array();
  json certificates = json::object();
  for (const auto& [id, v] : checks_) {
    verdicts.push_back({{"id", id}, {"status", to_string(v.status)}, {"horizon", v.horizon}});
    certificates[id] = v.certificate;
  }
  json r = {{"command", command_},
            {"inputs", inputs_},
            {"inputsDigest", fnv1a_hex(inputs_.dump())},
            {"status", to_string(status())},
            {"verdicts", verdicts},
            {"certificates", certificates},
            {"horizon", horizon_},
            {"seed", seed_},
            {"elapsedMs", elapsed_ms},
            {"toolVersion", FILTERLAB_VERSION}};
  for (const auto& [k, v] : extra_.items())
    r[k] = v;
  return r;
}

int exit_code(Status s) {
  switch (s) {
  case Status::Proved:
    return kExitProved;
  case Status::Refuted:
    return kExitRefuted;
  case Status::Consistent:
    return kExitConsistent;
  }
  return kExitConsistent;
}

} // namespace filterlab::cli
