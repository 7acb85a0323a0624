#pragma once

// Random term generators shared by the property suites. Deterministic:
// every generator takes an explicit engine.

#include <random>
#include <string>
#include <vector>

#include "ccsr/parser.hpp"
#include "ccsr/process.hpp"

namespace ccsr::testgen {

using Rng = std::mt19937;

inline int pick(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0, 1)(rng) < p;
}

inline std::string some_channel(Rng& rng) {
  static const char* pool[] = {"a", "b", "c", "x", "y"};
  return pool[pick(rng, 0, 4)];
}

inline Action some_action(Rng& rng, bool allow_tau = true) {
  int r = pick(rng, 0, allow_tau ? 4 : 3);
  if (r == 4) return Action::tau();
  std::string ch = some_channel(rng);
  return r % 2 ? Action::out(ch) : Action::in(ch);
}

// Arbitrary well-formed process over a small channel pool; `defs` lists
// zero-argument definition names that may be called.
inline Process arbitrary_process(Rng& rng, int depth,
                                 const std::vector<std::string>& defs = {}) {
  if (depth <= 0) return chance(rng, 0.7) ? Process::nil()
                                          : Process::prefix(some_action(rng), Process::nil());
  switch (pick(rng, 0, 5)) {
    case 0:
      return Process::nil();
    case 1:
      return Process::prefix(some_action(rng), arbitrary_process(rng, depth - 1, defs));
    case 2:
      return Process::par(arbitrary_process(rng, depth - 1, defs),
                          arbitrary_process(rng, depth - 1, defs));
    case 3:
      return Process::sum(arbitrary_process(rng, depth - 1, defs),
                          arbitrary_process(rng, depth - 1, defs));
    case 4:
      return Process::res(some_channel(rng), arbitrary_process(rng, depth - 1, defs));
    default:
      if (!defs.empty() && chance(rng, 0.5))
        return Process::call(defs[pick(rng, 0, static_cast<int>(defs.size()) - 1)], {});
      return Process::prefix(some_action(rng), arbitrary_process(rng, depth - 1, defs));
  }
}

// Replaces every call of `def` with one carrying the given actuals.
inline Process with_actuals(const Process& p, const std::string& def,
                            const std::vector<std::string>& actuals) {
  switch (p.kind()) {
    case ProcKind::Nil:
      return p;
    case ProcKind::Prefix:
      return Process::prefix(p.action(), with_actuals(p.body(), def, actuals));
    case ProcKind::Call:
      return p.name() == def ? Process::call(def, actuals) : p;
    case ProcKind::Restrict:
      return Process::res(p.name(), with_actuals(p.body(), def, actuals));
    case ProcKind::Sum:
      return Process::sum(with_actuals(p.left(), def, actuals),
                          with_actuals(p.right(), def, actuals));
    case ProcKind::Par:
      return Process::par(with_actuals(p.left(), def, actuals),
                          with_actuals(p.right(), def, actuals));
  }
  return p;
}

// Non-recursive process with a bounded number of prefixes and parallel
// components: the corpus shape used by the oracle-agreement suites.
// Commit channels k1,k2 occur only as inputs, so commits can never
// synchronize.
struct CorpusParams {
  int max_prefixes = 8;
  int max_par = 3;
  bool allow_recursion = false;
};

struct CorpusGen {
  Rng& rng;
  CorpusParams params;
  int prefixes_left = 0;
  int defs_made = 0;
  Env env;

  std::string commit_channel() { return pick(rng, 0, 1) ? "k1" : "k2"; }

  // A sequential component: prefix chains with choices and commits.
  Process seq(int depth) {
    if (prefixes_left <= 0 || depth <= 0) return Process::nil();
    int r = pick(rng, 0, 9);
    if (r < 5) {  // reversible prefix
      --prefixes_left;
      Action a = chance(rng, 0.15) ? Action::tau() : some_action(rng, false);
      return Process::prefix(a, seq(depth - 1));
    }
    if (r < 8) {  // commit prefix
      --prefixes_left;
      return Process::prefix(Action::in(commit_channel()), seq(depth - 1));
    }
    if (r == 8 && prefixes_left >= 2) {
      return Process::sum(seq(depth - 1), seq(depth - 1));
    }
    return Process::nil();
  }

  // A commit-guarded loop over a private token channel. The respawned
  // token is consumed by the next round, so the compressed state space
  // stays finite.
  Process recursive_component() {
    std::string t = "t" + std::to_string(defs_made + 1);
    std::string name = "R" + std::to_string(defs_made++);
    Action k = Action::in(commit_channel());
    Process token = Process::prefix(Action::out(t), Process::nil());
    Process body = Process::prefix(
        Action::in(t), Process::prefix(k, Process::par(token, Process::call(name, {}))));
    if (prefixes_left > 2 && chance(rng, 0.5)) {
      --prefixes_left;
      body = Process::prefix(some_action(rng, false), body);
    }
    prefixes_left -= 2;
    auto fn = free_names(body);
    std::vector<std::string> formals(fn.begin(), fn.end());
    body = with_actuals(body, name, formals);
    env[name] = Def{formals, body};
    return Process::res(t, Process::par(token, Process::call(name, formals)));
  }

  Process toplevel() {
    prefixes_left = pick(rng, 2, params.max_prefixes);
    int parts = pick(rng, 1, params.max_par);
    std::vector<Process> comps;
    for (int i = 0; i < parts; ++i) {
      if (params.allow_recursion && defs_made < 2 && prefixes_left >= 2 &&
          chance(rng, 0.4)) {
        comps.push_back(recursive_component());
      } else {
        comps.push_back(seq(4));
      }
    }
    Process acc = comps[0];
    for (std::size_t i = 1; i < comps.size(); ++i) acc = Process::par(acc, comps[i]);
    if (chance(rng, 0.5)) acc = Process::res(some_channel(rng), acc);
    return acc;
  }
};

inline ObsSet corpus_obs() { return parse_obs("k1,k2"); }

}  // namespace ccsr::testgen
