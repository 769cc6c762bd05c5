#include <algorithm>
#include <bit>
#include <numeric>

#include "filterlab/setalg.hpp"

namespace filterlab {

Nat pair_index(Nat row, Nat column) {
  if (row == 0 || column == 0)
    throw Error("invalid-argument", "pairing is defined on rows, columns >= 1");
  Nat diag = row + column - 2;
  return diag * (diag + 1) / 2 + column;
}

Cell unpair(Nat n) {
  if (n == 0)
    throw Error("invalid-argument", "unpair is defined on n >= 1");
  // largest d with T(d) < n, T(d) = d(d+1)/2
  Nat d = (isqrt(8 * n + 1) - 1) / 2;
  while (d * (d + 1) / 2 >= n)
    --d;
  while ((d + 1) * (d + 2) / 2 < n)
    ++d;
  Nat column = n - d * (d + 1) / 2;
  Nat row = d + 2 - column;
  return {row, column};
}

namespace {

std::vector<Nat> prefix_counts(const std::vector<bool>& bits) {
  std::vector<Nat> counts(bits.size() + 1, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    counts[i + 1] = counts[i] + (bits[i] ? 1 : 0);
  return counts;
}

std::vector<bool> parse_bits(std::string_view text) {
  std::vector<bool> bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1')
      throw Error("invalid-set", "bit strings may only contain '0' and '1'");
    bits.push_back(ch == '1');
  }
  return bits;
}

std::string bits_string(const std::vector<bool>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (bool b : bits)
    s.push_back(b ? '1' : '0');
  return s;
}

} // namespace

EventuallyPeriodic::EventuallyPeriodic(std::vector<bool> prefix, std::vector<bool> period)
    : prefix_(std::move(prefix)), period_(std::move(period)) {
  if (period_.empty())
    throw Error("invalid-set", "eventually periodic set needs a non-empty period word");
  prefix_counts_ = prefix_counts(prefix_);
  period_counts_ = prefix_counts(period_);
}

EventuallyPeriodic EventuallyPeriodic::parse(std::string_view prefix, std::string_view period) {
  return {parse_bits(prefix), parse_bits(period)};
}

bool EventuallyPeriodic::contains(Nat n) const {
  if (n == 0)
    return false;
  Nat i = n - 1;
  if (i < prefix_.size())
    return prefix_[i];
  return period_[(i - prefix_.size()) % period_.size()];
}

Nat EventuallyPeriodic::count_upto(Nat n) const {
  if (n <= prefix_.size())
    return prefix_counts_[n];
  Nat rest = n - prefix_.size();
  Nat full = rest / period_.size();
  Nat part = rest % period_.size();
  return prefix_counts_.back() + full * period_counts_.back() + period_counts_[part];
}

Rational EventuallyPeriodic::density() const {
  Rational d(static_cast<unsigned long>(period_counts_.back()),
             static_cast<unsigned long>(period_.size()));
  d.canonicalize();
  return d;
}

bool EventuallyPeriodic::is_finite() const { return period_counts_.back() == 0; }
bool EventuallyPeriodic::is_cofinite() const { return period_counts_.back() == period_.size(); }
bool EventuallyPeriodic::is_empty() const { return is_finite() && prefix_counts_.back() == 0; }
bool EventuallyPeriodic::is_all() const {
  return is_cofinite() && prefix_counts_.back() == prefix_.size();
}

std::string EventuallyPeriodic::prefix_string() const { return bits_string(prefix_); }
std::string EventuallyPeriodic::period_string() const { return bits_string(period_); }

EventuallyPeriodic EventuallyPeriodic::canonical() const {
  std::vector<bool> period = period_;
  const std::size_t len = period.size();
  for (std::size_t d = 1; d < len; ++d) {
    if (len % d != 0)
      continue;
    bool ok = true;
    for (std::size_t i = d; i < len && ok; ++i)
      ok = period[i] == period[i - d];
    if (ok) {
      period.resize(d);
      break;
    }
  }
  std::vector<bool> prefix = prefix_;
  while (!prefix.empty() && prefix.back() == period.back()) {
    prefix.pop_back();
    std::rotate(period.rbegin(), period.rbegin() + 1, period.rend());
  }
  return {std::move(prefix), std::move(period)};
}

EventuallyPeriodic EventuallyPeriodic::complement() const {
  std::vector<bool> prefix = prefix_, period = period_;
  prefix.flip();
  period.flip();
  return {std::move(prefix), std::move(period)};
}

std::optional<EventuallyPeriodic> combine(const EventuallyPeriodic& a, const EventuallyPeriodic& b,
                                          BoolOp op) {
  const Nat la = a.period().size(), lb = b.period().size();
  const Nat len = std::lcm(la, lb);
  if (len > kMaxPeriod)
    return std::nullopt;
  const Nat pre = std::max(a.prefix().size(), b.prefix().size());
  if (pre > kMaxPeriod * 4)
    return std::nullopt;
  auto bit = [&](Nat i) {
    bool x = a.contains(i + 1), y = b.contains(i + 1);
    switch (op) {
    case BoolOp::Union:
      return x || y;
    case BoolOp::Intersection:
      return x && y;
    case BoolOp::Difference:
      return x && !y;
    }
    return false;
  };
  std::vector<bool> prefix(pre), period(len);
  for (Nat i = 0; i < pre; ++i)
    prefix[i] = bit(i);
  for (Nat i = 0; i < len; ++i)
    period[i] = bit(pre + i);
  return EventuallyPeriodic(std::move(prefix), std::move(period)).canonical();
}

// ---------------------------------------------------------------------------

ColumnContent ColumnContent::from_word(RowWord word) {
  // shortest period keeps combined words small
  const std::size_t len = word.size();
  for (std::size_t d = 1; d < len; ++d) {
    if (len % d != 0)
      continue;
    bool ok = true;
    for (std::size_t i = d; i < len && ok; ++i)
      ok = word[i] == word[i - d];
    if (ok) {
      word.resize(d);
      break;
    }
  }
  bool any = false, all = true;
  for (bool b : word) {
    any = any || b;
    all = all && b;
  }
  ColumnContent c;
  c.infinite = tri(any);
  c.coinfinite = tri(!all);
  c.word = std::move(word);
  return c;
}

ColumnContent ColumnContent::empty() { return from_word(RowWord{false}); }

const ColumnContent& ColumnProfile::at(Nat column) const {
  if (column == 0)
    throw Error("invalid-argument", "columns are numbered from 1");
  if (column <= prefix.size())
    return prefix[column - 1];
  return period[(column - 1 - prefix.size()) % period.size()];
}

Tri ColumnProfile::infinitely_many_infinite() const {
  Tri acc = Tri::No;
  for (const auto& c : period)
    acc = tri_or(acc, c.infinite);
  return acc;
}

Tri ColumnProfile::some_infinite() const {
  Tri acc = infinitely_many_infinite();
  for (const auto& c : prefix)
    acc = tri_or(acc, c.infinite);
  return acc;
}

Tri ColumnProfile::almost_all_cofinite() const {
  Tri acc = Tri::Yes;
  for (const auto& c : period)
    acc = tri_and(acc, tri_not(c.coinfinite));
  return acc;
}

Tri ColumnProfile::all_cofinite() const {
  Tri acc = almost_all_cofinite();
  for (const auto& c : prefix)
    acc = tri_and(acc, tri_not(c.coinfinite));
  return acc;
}

// ---------------------------------------------------------------------------

ColumnRule ColumnRule::cofinite(Nat from_row, std::vector<Nat> except) {
  ColumnRule r;
  r.kind = Kind::Cofinite;
  r.from_row = std::max<Nat>(from_row, 1);
  std::sort(except.begin(), except.end());
  except.erase(std::unique(except.begin(), except.end()), except.end());
  r.rows = std::move(except);
  return r;
}

ColumnRule ColumnRule::finite(std::vector<Nat> rows) {
  ColumnRule r;
  r.kind = Kind::Finite;
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  r.rows = std::move(rows);
  return r;
}

ColumnRule ColumnRule::subsample(Nat first, Nat step) {
  if (first == 0 || step == 0)
    throw Error("invalid-set", "subsample needs first >= 1 and step >= 1");
  ColumnRule r;
  r.kind = Kind::Subsample;
  r.first = first;
  r.step = step;
  return r;
}

ColumnRule ColumnRule::periodic(RowWord word) {
  if (word.empty())
    throw Error("invalid-set", "periodic column rule needs a non-empty word");
  ColumnRule r;
  r.kind = Kind::Periodic;
  r.word = std::move(word);
  return r;
}

bool ColumnRule::contains(Nat row) const {
  switch (kind) {
  case Kind::Empty:
    return false;
  case Kind::Cofinite:
    return row >= from_row && !std::binary_search(rows.begin(), rows.end(), row);
  case Kind::Finite:
    return std::binary_search(rows.begin(), rows.end(), row);
  case Kind::Subsample:
    return row >= first && (row - first) % step == 0;
  case Kind::Periodic:
    return word[row % word.size()];
  }
  return false;
}

RowWord ColumnRule::eventual_word() const {
  switch (kind) {
  case Kind::Empty:
  case Kind::Finite:
    return {false};
  case Kind::Cofinite:
    return {true};
  case Kind::Subsample: {
    RowWord w(step, false);
    w[first % step] = true;
    return w;
  }
  case Kind::Periodic:
    return word;
  }
  return {false};
}

Nat ColumnRule::irregular_rows() const {
  switch (kind) {
  case Kind::Empty:
  case Kind::Periodic:
    return 0;
  case Kind::Finite:
    return rows.empty() ? 0 : rows.back();
  case Kind::Cofinite:
    return std::max(from_row - 1, rows.empty() ? Nat{0} : rows.back());
  case Kind::Subsample:
    return first;
  }
  return 0;
}

json ColumnRule::to_json() const {
  switch (kind) {
  case Kind::Empty:
    return {{"kind", "empty"}};
  case Kind::Cofinite:
    return {{"kind", "cofinite"}, {"fromRow", from_row}, {"except", rows}};
  case Kind::Finite:
    return {{"kind", "finite"}, {"rows", rows}};
  case Kind::Subsample:
    return {{"kind", "subsample"}, {"first", first}, {"step", step}};
  case Kind::Periodic:
    return {{"kind", "periodic"}, {"word", bits_string(word)}};
  }
  return nullptr;
}

ColumnRule ColumnRule::from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "empty")
    return empty();
  if (kind == "cofinite")
    return cofinite(j.value("fromRow", Nat{1}), j.value("except", std::vector<Nat>{}));
  if (kind == "finite")
    return finite(j.at("rows").get<std::vector<Nat>>());
  if (kind == "subsample")
    return subsample(j.at("first").get<Nat>(), j.at("step").get<Nat>());
  if (kind == "periodic")
    return periodic(parse_bits(j.at("word").get<std::string>()));
  throw Error("invalid-set", "unknown column rule kind '" + kind + "'");
}

// ---------------------------------------------------------------------------

Nat SparseBound::eval(Nat n) const {
  Nat total = constant;
  if (log_coef > 0) {
    // dyadic pieces meeting [1, n]
    Nat pieces = n <= 1 ? n : static_cast<Nat>(std::bit_width(n - 1)) + 1;
    total += log_coef * pieces;
  }
  for (const auto& r : roots)
    total += r.coef * (iroot(r.scale * n, r.k) + 1);
  return total;
}

SparseBound SparseBound::operator+(const SparseBound& other) const {
  SparseBound s = *this;
  s.constant += other.constant;
  s.log_coef += other.log_coef;
  s.roots.insert(s.roots.end(), other.roots.begin(), other.roots.end());
  return s;
}

json SparseBound::to_json() const {
  json roots_json = json::array();
  for (const auto& r : roots)
    roots_json.push_back({{"k", r.k}, {"scale", r.scale}, {"coef", r.coef}});
  return {{"constant", constant}, {"logCoef", log_coef}, {"roots", roots_json}};
}

SparseBound SparseBound::from_json(const json& j) {
  SparseBound s;
  s.constant = j.value("constant", Nat{0});
  s.log_coef = j.value("logCoef", Nat{0});
  for (const auto& r : j.value("roots", json::array()))
    s.roots.push_back({r.at("k").get<unsigned>(), r.at("scale").get<Nat>(), r.at("coef").get<Nat>()});
  return s;
}

} // namespace filterlab
