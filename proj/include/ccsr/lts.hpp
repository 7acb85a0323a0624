#pragma once

#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "ccsr/action.hpp"

namespace ccsr {

// A finite labelled transition system. States carry a textual payload
// (their name in the text format); edges are a set.
class Lts {
 public:
  struct Edge {
    int src;
    Label label;
    int dst;
    auto operator<=>(const Edge&) const = default;
  };

  std::string name = "lts";
  int initial = -1;
  bool truncated = false;  // a budget was exhausted; the result is partial

  int add_state(const std::string& payload);
  int find_state(const std::string& payload) const;  // -1 if absent
  int state_count() const { return static_cast<int>(states_.size()); }
  const std::string& payload(int s) const { return states_[s]; }

  bool add_edge(int src, Label label, int dst);  // false if already present
  const std::vector<Edge>& edges() const { return edges_; }

  // Outgoing edges of a state, in insertion order.
  std::vector<Edge> out(int s) const;

  std::set<Label> labels() const;

 private:
  std::vector<std::string> states_;
  std::unordered_map<std::string, int> index_;
  std::vector<Edge> edges_;
  std::set<std::tuple<int, Label, int>> edge_set_;
};

// Line-based text format:
//   lts NAME
//   init STATE
//   trans SRC LABEL DST
// `#` starts a comment; labels use the CCS action syntax, with a trailing
// `-` marking a backward label.
std::string write_lts(const Lts& l);
Lts read_lts(const std::string& text);

std::string lts_to_dot(const Lts& l);

}  // namespace ccsr
