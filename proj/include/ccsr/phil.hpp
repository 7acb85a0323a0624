#pragma once

#include <string>
#include <vector>

#include "ccsr/lts.hpp"
#include "ccsr/process.hpp"

namespace ccsr {

struct PhilSystem {
  Process main;
  Env env;
  ObsSet obs;
};

// Dining philosophers, the partial implementation: once a chopstick is
// taken it is only returned after a successful meal. Philosophers eat,
// release, and respawn their chopsticks alongside the recursive call;
// eat_i and rel_i are the observable commits. Take channels t_i are
// restricted.
PhilSystem phil_partial(int n);

// The fully correct implementation: a silent release branch after each
// acquisition puts the chopsticks back, so the forward semantics never
// deadlocks. Only used for direct state-space baselines.
PhilSystem phil_full(int n);

// The specification: sets of concurrently eating philosophers with no
// adjacent pair, moved by eat_i and rel_i.
Lts phil_spec(int n);

struct BenchRecord {
  int n = 0;
  int cts_states = 0;
  int cts_edges = 0;
  double wall_time = 0;  // seconds spent in the compression
  std::string verdict;   // equivalent | not | truncated
};

// Runs the compression (or, in full mode, the direct construction) for
// each count up to n_max and checks the result against phil_spec.
std::vector<BenchRecord> run_bench(int n_max, bool full_mode);

std::string bench_table(const std::vector<BenchRecord>& records);

// A state with no outgoing edges whose payload is not the terminated
// process.
bool has_deadlock(const Lts& l);

}  // namespace ccsr
