#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccsr/lts.hpp"

namespace ccsr {

// Saturation of an LTS relative to K: `eps` is the reflexive-transitive
// closure over edges whose labels are unobservable (anything outside K,
// including tau and backward decorations); `obs[k]` relates s to t when
// some word in (K^c)* k (K^c)* leads from s to t.
struct SaturatedLts {
  const Lts* base = nullptr;
  std::vector<std::vector<int>> eps;            // sorted successor lists
  std::map<Action, std::vector<std::vector<int>>> obs;

  bool eps_reaches(int s, int t) const;
  bool obs_reaches(const Action& k, int s, int t) const;
};

SaturatedLts saturate(const Lts& l, const ObsSet& k);

struct BisimResult {
  bool equivalent = false;
  // On failure: a pair of states (left LTS, right LTS) that every weak
  // bisimulation must separate, and the first label found to split them.
  int left_state = -1;
  int right_state = -1;
  std::optional<Label> split;
  std::string describe() const;
};

// Weak bisimilarity of the initial states relative to K, by partition
// refinement on the disjoint union of the saturated systems.
BisimResult weak_bisim(const Lts& a, const Lts& b, const ObsSet& k);

}  // namespace ccsr
