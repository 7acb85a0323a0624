#pragma once

#include <cassert>
#include <compare>
#include <set>
#include <string>

#include "ccsr/errors.hpp"

namespace ccsr {

enum class ActKind { Silent, Input, Output };

// A CCS action: an input x, an output ~x, or the silent action tau.
struct Action {
  ActKind kind = ActKind::Silent;
  std::string channel;  // empty iff silent

  static Action tau() { return Action{}; }
  static Action in(std::string ch) { return Action{ActKind::Input, std::move(ch)}; }
  static Action out(std::string ch) { return Action{ActKind::Output, std::move(ch)}; }

  bool silent() const { return kind == ActKind::Silent; }

  // Defined for non-silent actions only; an involution.
  Action complement() const {
    assert(!silent());
    return Action{kind == ActKind::Input ? ActKind::Output : ActKind::Input, channel};
  }

  std::string str() const {
    switch (kind) {
      case ActKind::Silent: return "tau";
      case ActKind::Input: return channel;
      case ActKind::Output: return "~" + channel;
    }
    return {};
  }

  auto operator<=>(const Action&) const = default;
};

// A transition label: an action, possibly decorated as a backward move.
// Backward labels only occur in reversible-machine LTSs; they are never
// observable.
struct Label {
  Action action;
  bool backward = false;

  std::string str() const { return action.str() + (backward ? "-" : ""); }

  auto operator<=>(const Label&) const = default;
};

// The distinguished set K of observable (commit) actions. Polarity
// sensitive: holding the input x says nothing about the output ~x.
class ObsSet {
 public:
  ObsSet() = default;

  void insert(const Action& a) {
    if (a.silent()) throw ValidationError("tau cannot be declared observable");
    acts_.insert(a);
  }

  bool contains(const Action& a) const { return acts_.count(a) != 0; }
  bool observable(const Label& l) const { return !l.backward && contains(l.action); }

  const std::set<Action>& actions() const { return acts_; }
  std::size_t size() const { return acts_.size(); }
  bool empty() const { return acts_.empty(); }

  std::string str() const {
    std::string s;
    for (const auto& a : acts_) {
      if (!s.empty()) s += ",";
      s += a.str();
    }
    return s;
  }

 private:
  std::set<Action> acts_;
};

}  // namespace ccsr
