#include "ccsr/cts.hpp"

#include <deque>
#include <map>
#include <set>
#include <vector>

#include "ccsr/errors.hpp"

namespace ccsr {

namespace {

// Registry of discovered states: signature buckets resolved by the exact
// isomorphism check.
struct Registry {
  std::deque<Fes> states;  // stable references while expanding
  std::map<std::uint64_t, std::vector<int>> buckets;

  // returns (id, freshly inserted)
  std::pair<int, bool> intern(Fes&& f) {
    std::uint64_t sig = f.signature();
    auto& bucket = buckets[sig];
    for (int id : bucket)
      if (isomorphic(states[id], f)) return {id, false};
    int id = static_cast<int>(states.size());
    bucket.push_back(id);
    states.push_back(std::move(f));
    return {id, true};
  }
};

}  // namespace

Lts compute_cts(const Process& p, const Env& env, const ObsSet& k, CtsLimits limits) {
  Lts lts;
  lts.name = "cts";

  Registry reg;
  std::deque<int> work;
  {
    Fes init = partial_unfold(p, env, k, limits.max_events);
    auto [id, fresh] = reg.intern(std::move(init));
    lts.initial = lts.add_state("s0");
    work.push_back(id);
  }

  std::set<std::string> recursive = recursive_definitions(env);
  while (!work.empty()) {
    int src = work.front();
    work.pop_front();
    const Fes& fes = reg.states[src];

    for (EventId e = 0; e < fes.event_count(); ++e) {
      if (fes.blocked(e) || !k.contains(fes.label(e))) continue;
      for (const auto& x : fes.e_minimal_configs(e, &k)) {
        // a commit may not ride on the back of another commit: the rest
        // of the history must be unobservable
        bool clean = true;
        for (EventId m : x)
          if (m != e && k.contains(fes.label(m))) { clean = false; break; }
        if (!clean) continue;

        FesResidual res = fes.residual(x, false);
        bool budget_hit = false;
        try {
          for (const Stub& stub : res.to_instantiate)
            res.fes.instantiate(stub, env, k, limits.max_events, &recursive);
        } catch (const BudgetError&) {
          budget_hit = true;
        }
        if (budget_hit) {
          lts.truncated = true;
          continue;
        }
        res.fes.finish();

        auto [dst, fresh] = reg.intern(std::move(res.fes));
        if (fresh && static_cast<int>(reg.states.size()) > limits.max_states) {
          lts.truncated = true;
          continue;
        }
        int dst_state = lts.add_state("s" + std::to_string(dst));
        if (fresh) work.push_back(dst);
        lts.add_edge(lts.find_state("s" + std::to_string(src)), Label{fes.label(e)},
                     dst_state);
      }
    }
  }
  return lts;
}

}  // namespace ccsr
