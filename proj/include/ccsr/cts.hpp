#pragma once

#include "ccsr/fes.hpp"
#include "ccsr/lts.hpp"

namespace ccsr {

struct CtsLimits {
  int max_states = 100000;
  long max_events = 1000000;
};

// The causal compression of p relative to K, by iterated e-minimal
// commit configurations over the partial unfolding: states are residual
// structures up to isomorphism, edges are commits. Exceeding a budget
// yields a partial LTS flagged `truncated`.
Lts compute_cts(const Process& p, const Env& env, const ObsSet& k, CtsLimits limits = {});

}  // namespace ccsr
