#pragma once

#include <utility>
#include <vector>

#include "ccsr/lts.hpp"
#include "ccsr/process.hpp"

namespace ccsr {

// Guards recursion unfolding inside a single transition computation.
// Crossing the budget, or re-entering a definition instance that is
// already being unfolded, signals unguarded recursion.
struct UnfoldBudget {
  int remaining = 10000;
};

// One-step derivatives per the interleaving rules, as a set: results are
// deduplicated on (label, normalized target) and the targets are
// normalized. Non-prefix choice operands contribute no transitions of
// their own.
std::vector<std::pair<Action, Process>> transitions(const Process& p, const Env& env,
                                                    UnfoldBudget budget = {});

// Reachable state graph with states keyed by their canonical form.
// `max_states` exhaustion yields a partial LTS flagged `truncated`.
Lts build_lts(const Process& p, const Env& env, int max_states = 100000);

// Splits a flattened choice into its operands, unfolding definition
// calls. Exposed for the reversible machine, which needs the leftover
// branches of a choice.
std::vector<Process> choice_operands(const Process& p, const Env& env, UnfoldBudget& budget);

// Rejects observable actions that could synchronize: if some channel
// occurs in both polarities among the reachable prefixes and either
// polarity is in K, the backward rules would have no answer for the
// resulting silent commit. Throws ValidationError.
void validate_commit_polarity(const Process& p, const Env& env, const ObsSet& k);

}  // namespace ccsr
