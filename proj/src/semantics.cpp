#include "ccsr/semantics.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "ccsr/errors.hpp"

namespace ccsr {

namespace {

using CallKey = std::pair<std::string, std::vector<std::string>>;

struct Unfolder {
  const Env* env;
  UnfoldBudget* budget;
  std::set<CallKey> active;

  Process resolve(const Process& call) {
    auto it = env->find(call.name());
    if (it == env->end())
      throw ValidationError("unbound definition '" + call.name() + "'");
    const Def& def = it->second;
    if (def.formals.size() != call.actuals().size())
      throw ValidationError("arity mismatch calling '" + call.name() + "'");
    if (--budget->remaining < 0)
      throw UnguardedRecursionError("recursion unfolding budget exhausted at '" +
                                    call.name() + "'");
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < def.formals.size(); ++i)
      m[def.formals[i]] = call.actuals()[i];
    return subst(def.body, m);
  }

  void operands(const Process& p, std::vector<Process>& out) {
    switch (p.kind()) {
      case ProcKind::Sum:
        operands(p.left(), out);
        operands(p.right(), out);
        return;
      case ProcKind::Call: {
        CallKey key{p.name(), p.actuals()};
        if (!active.insert(key).second)
          throw UnguardedRecursionError("definition '" + p.name() +
                                        "' unfolds to itself without consuming a prefix");
        operands(resolve(p), out);
        active.erase(key);
        return;
      }
      default:
        out.push_back(p);
        return;
    }
  }
};

struct StepCtx {
  const Env* env;
  UnfoldBudget budget;
  // Memoized per (definition, actuals): raw steps of the unfolded body.
  std::map<CallKey, std::vector<std::pair<Action, Process>>> memo;
  std::set<CallKey> active;

  std::vector<std::pair<Action, Process>> steps(const Process& p);
};

std::vector<std::pair<Action, Process>> StepCtx::steps(const Process& p) {
  std::vector<std::pair<Action, Process>> out;
  switch (p.kind()) {
    case ProcKind::Nil:
      return out;
    case ProcKind::Prefix:
      out.emplace_back(p.action(), p.body());
      return out;
    case ProcKind::Sum: {
      // (act) through the congruence. Unit laws first: operands congruent
      // to 0 vanish, and a one-operand choice is no choice at all. In a
      // genuine choice only prefix-shaped operands fire.
      Unfolder uf{env, &budget, active};
      std::vector<Process> ops;
      uf.operands(p, ops);
      std::vector<Process> live;
      for (const auto& s : ops) {
        Process n = normalize(s);
        if (n.is_nil()) continue;
        if (n.kind() == ProcKind::Sum) {
          // an operand collapsed into a choice of its own; splice it
          std::vector<Process> inner;
          Unfolder uf2{env, &budget, active};
          uf2.operands(n, inner);
          live.insert(live.end(), inner.begin(), inner.end());
        } else {
          live.push_back(n);
        }
      }
      if (live.empty()) return out;
      if (live.size() == 1) return steps(live.front());
      for (const auto& s : live)
        if (s.kind() == ProcKind::Prefix) out.emplace_back(s.action(), s.body());
      return out;
    }
    case ProcKind::Call: {
      CallKey key{p.name(), p.actuals()};
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
      if (!active.insert(key).second)
        throw UnguardedRecursionError("definition '" + p.name() +
                                      "' unfolds to itself without consuming a prefix");
      Unfolder uf{env, &budget, {}};
      out = steps(uf.resolve(p));
      active.erase(key);
      memo[key] = out;
      return out;
    }
    case ProcKind::Restrict: {
      for (auto& [a, q] : steps(p.body()))
        if (a.silent() || a.channel != p.name())
          out.emplace_back(a, Process::res(p.name(), q));
      return out;
    }
    case ProcKind::Par: {
      auto ls = steps(p.left());
      auto rs = steps(p.right());
      for (auto& [a, q] : ls) out.emplace_back(a, Process::par(q, p.right()));
      for (auto& [a, q] : rs) out.emplace_back(a, Process::par(p.left(), q));
      for (auto& [a, q] : ls) {
        if (a.silent()) continue;
        Action want = a.complement();
        for (auto& [b, r] : rs)
          if (b == want) out.emplace_back(Action::tau(), Process::par(q, r));
      }
      return out;
    }
  }
  return out;
}

}  // namespace

std::vector<Process> choice_operands(const Process& p, const Env& env, UnfoldBudget& budget) {
  Unfolder uf{&env, &budget, {}};
  std::vector<Process> out;
  uf.operands(p, out);
  return out;
}

std::vector<std::pair<Action, Process>> transitions(const Process& p, const Env& env,
                                                    UnfoldBudget budget) {
  StepCtx ctx{&env, budget, {}, {}};
  auto raw = ctx.steps(p);
  std::vector<std::pair<Action, Process>> out;
  std::set<std::pair<Action, std::string>> seen;
  for (auto& [a, q] : raw) {
    Process nq = normalize(q);
    if (seen.emplace(a, print(nq)).second) out.emplace_back(a, nq);
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return compare(x.second, y.second) < 0;
  });
  return out;
}

Lts build_lts(const Process& p, const Env& env, int max_states) {
  Lts l;
  l.name = "ts";
  std::deque<Process> work;
  Process init = normalize(p);
  l.initial = l.add_state(print(init));
  work.push_back(init);
  while (!work.empty()) {
    Process q = work.front();
    work.pop_front();
    int src = l.find_state(print(q));
    for (auto& [a, t] : transitions(q, env)) {
      std::string key = print(t);
      int dst = l.find_state(key);
      if (dst < 0) {
        if (l.state_count() >= max_states) {
          l.truncated = true;
          continue;
        }
        dst = l.add_state(key);
        work.push_back(t);
      }
      l.add_edge(src, Label{a}, dst);
    }
  }
  return l;
}

namespace {

struct PolarityScan {
  const Env* env;
  std::set<CallKey> seen;
  std::set<std::string> inputs, outputs;
  int fuel = 100000;

  void walk(const Process& p) {
    if (--fuel < 0) return;  // conservative cutoff; the scan is a best-effort filter
    switch (p.kind()) {
      case ProcKind::Nil:
        return;
      case ProcKind::Prefix:
        if (!p.action().silent())
          (p.action().kind == ActKind::Input ? inputs : outputs).insert(p.action().channel);
        walk(p.body());
        return;
      case ProcKind::Call: {
        CallKey key{p.name(), p.actuals()};
        if (!seen.insert(key).second) return;
        auto it = env->find(p.name());
        if (it == env->end()) return;
        std::map<std::string, std::string> m;
        for (std::size_t i = 0; i < it->second.formals.size() && i < p.actuals().size(); ++i)
          m[it->second.formals[i]] = p.actuals()[i];
        walk(subst(it->second.body, m));
        return;
      }
      case ProcKind::Restrict:
        walk(p.body());
        return;
      case ProcKind::Sum:
      case ProcKind::Par:
        walk(p.left());
        walk(p.right());
        return;
    }
  }
};

}  // namespace

void validate_commit_polarity(const Process& p, const Env& env, const ObsSet& k) {
  PolarityScan scan{&env, {}, {}, {}};
  scan.walk(normalize(p));
  for (const Action& a : k.actions()) {
    if (scan.inputs.count(a.channel) && scan.outputs.count(a.channel))
      throw ValidationError(
          "observable channel '" + a.channel +
          "' occurs in both polarities; commits that can synchronize are not supported");
  }
}

}  // namespace ccsr
