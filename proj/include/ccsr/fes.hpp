#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ccsr/process.hpp"

namespace ccsr {

using OccId = int;
using EventId = int;

// A prefix occurrence of the translated source. `guard` is the occurrence
// of the prefix immediately above (for the roots of grafted units, the
// anchor occurrence of the stub that grafted them). `index` is the
// post-order position within the unit, so every subterm covers a
// contiguous interval.
struct Occurrence {
  Action label;
  OccId guard = -1;
  int unit = 0;
  int index = 0;
  bool restricted = false;
};

// Interval tree mirroring one translation unit. Choice nodes make every
// pair of occurrences from different children conflict.
struct ConflictNode {
  bool choice = false;
  int lo = 0, hi = -1;  // inclusive; empty when lo > hi
  std::vector<ConflictNode> kids;
};

// Append-only across residuals and grafts; shared between the structures
// derived from one unfolding.
struct OccTable {
  std::vector<Occurrence> occs;
  std::vector<ConflictNode> units;
  std::set<std::string> reserved;  // channel names in use

  bool tree_conflict(OccId a, OccId b) const;
  // indices within the unit that conflict with the given index
  const std::vector<int>& conflicting_indices(int unit, int index) const;

 private:
  // per-unit pairwise answers, built on first query; units never change
  // once translated
  mutable std::vector<std::vector<std::uint64_t>> unit_cache_;
  mutable std::vector<std::vector<std::vector<int>>> unit_adj_;
  mutable std::vector<int> unit_width_;
  void build_unit_cache(int unit) const;
};

struct Event {
  Action label;
  OccId cons[2] = {-1, -1};
  int ncons = 0;
  // A restricted non-synchronization occurrence keeps its event as a
  // blocked placeholder: it can never fire, still guards its successors,
  // and stays available as a synchronization partner for later grafts.
  bool blocked = false;

  bool is_sync() const { return ncons == 2; }
};

// A parked recursive call. It is instantiated into the residual when the
// trigger commit executes; the grafted unit's roots are guarded by the
// anchor occurrence.
struct Stub {
  std::string def;
  std::vector<std::string> actuals;
  EventId trigger = -1;
  OccId anchor = -1;
  std::set<std::string> pending;  // restricted channels in scope
};

struct FesResidual;

// Flow event structure with derived flow and conflict: flow follows the
// guard relation through constituents, conflict comes from shared
// constituents and the per-unit conflict trees.
class Fes {
 public:
  int event_count() const { return static_cast<int>(events_.size()); }
  int alive_count() const;
  const Event& event(EventId e) const { return events_[e]; }
  const Action& label(EventId e) const { return events_[e].label; }
  bool blocked(EventId e) const { return events_[e].blocked; }
  std::vector<EventId> alive_events() const;

  const std::vector<EventId>& preds(EventId e) const { return preds_[e]; }
  const std::vector<EventId>& succs(EventId e) const { return succs_[e]; }
  bool flow(EventId d, EventId e) const;
  bool conflict(EventId a, EventId b) const;
  int conflict_degree(EventId e) const;

  const std::vector<Stub>& stubs() const { return stubs_; }
  const OccTable& occs() const { return *occs_; }

  bool is_configuration(const std::vector<EventId>& x) const;

  // All configurations containing e whose members are flow-ancestors of
  // e, by backward branching over causes. With `skip_observable` set,
  // histories through observable events are pruned: callers interested
  // in single-commit steps never use those, and the pruning keeps the
  // search local.
  std::vector<std::vector<EventId>> e_minimal_configs(
      EventId e, const ObsSet* skip_observable = nullptr) const;

  // `finished` controls whether derived caches are rebuilt immediately;
  // callers that graft stubs into the result first pass false and call
  // finish() themselves.
  FesResidual residual(const std::vector<EventId>& x, bool finished = true) const;

  // Grafts a fresh translation of the stub's definition into this
  // structure, adding synchronizations with every existing complementary
  // occurrence. Call finish() after the last graft.
  void instantiate(const Stub& stub, const Env& env, const ObsSet& k, long max_events,
                   const std::set<std::string>* recursive_defs = nullptr);
  void finish();

  // Order-independent fingerprint; isomorphic structures agree on it.
  std::uint64_t signature() const;

  std::string to_dot() const;

  // Flow-ancestors of e (reflexive).
  std::vector<EventId> ancestors(EventId e) const;

 private:
  friend class FesBuilder;
  friend class UnitTranslator;
  friend bool isomorphic(const Fes& a, const Fes& b);
  friend Fes partial_unfold(const Process&, const Env&, const ObsSet&, long);

  std::shared_ptr<OccTable> occs_ = std::make_shared<OccTable>();
  std::vector<Event> events_;
  std::vector<Stub> stubs_;
  // explicit relations, used by hand-built structures in tests
  std::set<std::pair<EventId, EventId>> extra_flow_;
  std::set<std::pair<EventId, EventId>> extra_conflict_;

  // derived; the bit matrices are row-major with `words_` words per row
  std::vector<std::vector<EventId>> preds_, succs_;
  int words_ = 0;
  std::vector<std::uint64_t> conflict_bits_;
  std::vector<std::uint64_t> flow_in_bits_;
  std::vector<std::uint64_t> flow_out_bits_;
  // per-event isomorphism-invariant summaries, rebuilt by finish()
  std::vector<std::uint64_t> class_hashes_;

  void set_conflict(EventId a, EventId b);
  void rebuild_classes();
};

// Hand construction for tests and experiments: events with explicit flow
// and conflict.
class FesBuilder {
 public:
  EventId add_event(Action label, bool blocked = false);
  void add_flow(EventId d, EventId e);
  void add_conflict(EventId a, EventId b);
  Fes build();

 private:
  Fes fes_;
};

struct FesResidual {
  Fes fes;
  std::vector<Stub> to_instantiate;  // stubs whose trigger was executed
};

// Guard check: every cycle of recursive definitions crosses a commit
// prefix. Throws ValidationError naming an offending definition.
void check_commit_guarded(const Process& p, const Env& env, const ObsSet& k);

// The partial unfolding: translates p without unfolding recursive
// definitions, parking commit-guarded recursive calls as stubs.
Fes partial_unfold(const Process& p, const Env& env, const ObsSet& k,
                   long max_events = 1000000);

// Exact label-, flow-, conflict-, blockedness- and stub-preserving
// bijection, found by backtracking inside signature classes.
bool isomorphic(const Fes& a, const Fes& b);

// Definitions that can reach themselves through calls.
std::set<std::string> recursive_definitions(const Env& env);

}  // namespace ccsr
