#pragma once

#include <memory>
#include <optional>

#include "filterlab/setalg.hpp"

namespace filterlab {

struct Blocking::Impl {
  Kind kind = Kind::Dyadic;
  std::vector<Nat> boundaries;
  std::optional<SetExpr> ground;
  std::optional<Blocking> base;
};

struct SetExpr::Node {
  Op op = Op::Finite;
  std::vector<Nat> elements;
  Nat first = 0;
  Nat step = 1;
  std::optional<EventuallyPeriodic> ep;
  ColumnRule rule;
  std::map<Nat, ColumnRule> overrides;
  std::optional<Blocking> blocking;
  SelectRule select = SelectRule::Min;
  Nat nth = 1;
  unsigned exponent = 2;
  std::shared_ptr<const StandardMap> map;
  std::vector<SetExpr> args;
  SetFacts facts;
};

SetFacts compute_facts(const SetExpr::Node& node);

/// Interval-blocking helpers shared by Blocking and the fact builder.
Nat interval_piece_of(const Blocking::Impl& impl, Nat n);
std::pair<Nat, Nat> interval_bounds(const Blocking::Impl& impl, Nat k);

} // namespace filterlab
