#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccsr/lts.hpp"
#include "ccsr/process.hpp"
#include "ccsr/semantics.hpp"

namespace ccsr {

// Memory element kinds. Open records an undoable action together with the
// abandoned choice branches; Closed marks a commit. Fork markers record
// which side of a parallel split a thread took when its memory was
// distributed; they keep sibling memories distinct, which the causality
// relation needs.
enum class MemKind { Open, Closed, ForkL, ForkR };

struct MemNode {
  MemKind kind;
  int tid = -1;     // Open, Closed
  Action action;    // Open
  Process alt;      // Open: the leftover choice branches
  std::shared_ptr<const MemNode> below;
  int len = 1;
};

// Persistent stack; the most recent element is on top.
class Memory {
 public:
  Memory() = default;

  bool empty() const { return !top_; }
  int size() const { return top_ ? top_->len : 0; }
  const MemNode* top() const { return top_.get(); }
  Memory below() const;

  Memory push_open(int tid, Action a, Process alt) const;
  Memory push_closed(int tid) const;
  Memory push_fork(bool left) const;

  // m ⊑ m' : some stack extends this one to the other.
  bool is_prefix_of(const Memory& other) const;

  // The memory below the element carrying the identifier, if any element
  // in this stack does.
  std::optional<Memory> below_elem(int tid) const;

  friend bool operator==(const Memory& a, const Memory& b);

 private:
  explicit Memory(std::shared_ptr<const MemNode> t) : top_(std::move(t)) {}
  std::shared_ptr<const MemNode> top_;
};

enum class RKind { Thread, Par, Res };

struct RNode;

// Reversible process: memory-carrying threads composed in parallel under
// restrictions. Threads always carry sequential code; parallel code is
// distributed over fork-marked memories at construction.
class RProcess {
 public:
  RProcess();  // empty thread over 0

  static RProcess thread(Memory m, Process code);  // distributes Par code
  static RProcess par(RProcess l, RProcess r);
  static RProcess res(std::string channel, RProcess body);

  RKind kind() const;
  const Memory& mem() const;          // Thread
  const Process& code() const;        // Thread
  RProcess left() const;              // Par
  RProcess right() const;             // Par
  const std::string& name() const;    // Res
  RProcess body() const;              // Res

 private:
  explicit RProcess(std::shared_ptr<const RNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const RNode> node_;
};

struct RTransition {
  RProcess source;
  Action action;
  int tid = -1;
  bool backward = false;
  bool commit = false;  // label in K; never backward
  RProcess target;

  Label label() const { return Label{action, backward}; }
};

using Trace = std::vector<RTransition>;

// Shared context for a run of the reversible machine: the definition
// environment, the observable set, and the thread-identifier counter that
// implements the freshness side conditions.
struct RCtx {
  const Env* env;
  const ObsSet* obs;
  int next_tid = 1;
  UnfoldBudget budget_per_step{};
};

RProcess lift(const Process& p);
Process forget(const RProcess& r);

// Human-readable rendering: memories top-first, threads as `mem |> code`.
std::string rprint(const RProcess& r);

// Canonical key: equal for states that differ only by thread-identifier
// names, alpha renaming, and the structural congruence (including
// unfolding of definition calls in head position).
std::string rkey(const RProcess& r, const Env& env);

// All one-step moves of r under the Fig-3 rules: forward actions and
// commits, backward moves, and synchronizations in both directions.
std::vector<RTransition> rtransitions(const RProcess& r, RCtx& ctx);

// Memories consumed by a forward transition; one element without
// communication, two with. Rejects backward transitions.
std::vector<Memory> mu(const RTransition& t);

// Direct causality between positions i < j of a forward trace.
bool direct_cause(const Trace& trace, std::size_t i, std::size_t j);

// The final transition is caused by every earlier one.
bool is_causal(const Trace& trace);

// Causal, the last label is a commit, and every earlier label is
// unobservable.
bool is_k_causal(const Trace& trace, const ObsSet& k);

// Exhausts backward transitions; backtracking is confluent on reachable
// states, so the result is unique up to the canonical key.
RProcess backtrack_normal_form(const RProcess& r, RCtx& ctx, int max_steps = 100000);

struct OracleLimits {
  int trace_depth = 64;
  long trace_nodes = 1000000;
  int max_states = 100000;
};

// Brute-force causal compression: enumerates forward traces from the lift
// of every discovered state and keeps the k-causal ones. Used as the
// independent reference for the event-structure pipeline.
Lts oracle_cts(const Process& p, const Env& env, const ObsSet& k, OracleLimits limits = {});

struct RccsLtsLimits {
  int max_states = 100000;
  long max_edges = 1000000;
};

// The reachable LTS of lift(p), labels kept verbatim (backward labels
// decorated); finite for non-recursive processes.
Lts rccs_lts(const Process& p, const Env& env, const ObsSet& k, RccsLtsLimits limits = {});

}  // namespace ccsr
