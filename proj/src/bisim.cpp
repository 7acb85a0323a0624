#include "ccsr/bisim.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace ccsr {

namespace {

bool sorted_contains(const std::vector<int>& v, int x) {
  return std::binary_search(v.begin(), v.end(), x);
}

// Reflexive-transitive closure of `step`, per source state.
std::vector<std::vector<int>> closure(int n, const std::vector<std::vector<int>>& step) {
  std::vector<std::vector<int>> out(n);
  std::vector<int> mark(n, -1);
  for (int s = 0; s < n; ++s) {
    std::queue<int> q;
    q.push(s);
    mark[s] = s;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      out[s].push_back(u);
      for (int v : step[u])
        if (mark[v] != s) {
          mark[v] = s;
          q.push(v);
        }
    }
    std::sort(out[s].begin(), out[s].end());
  }
  return out;
}

}  // namespace

bool SaturatedLts::eps_reaches(int s, int t) const { return sorted_contains(eps[s], t); }

bool SaturatedLts::obs_reaches(const Action& k, int s, int t) const {
  auto it = obs.find(k);
  return it != obs.end() && sorted_contains(it->second[s], t);
}

SaturatedLts saturate(const Lts& l, const ObsSet& k) {
  int n = l.state_count();
  SaturatedLts sat;
  sat.base = &l;
  std::vector<std::vector<int>> silent(n);
  std::map<Action, std::vector<std::vector<int>>> strong;
  for (const auto& e : l.edges()) {
    if (k.observable(e.label)) {
      auto& rel = strong.try_emplace(e.label.action, n).first->second;
      rel[e.src].push_back(e.dst);
    } else {
      silent[e.src].push_back(e.dst);
    }
  }
  sat.eps = closure(n, silent);
  for (auto& [act, rel] : strong) {
    // obs = eps ; step ; eps
    std::vector<std::vector<int>> out(n);
    for (int s = 0; s < n; ++s) {
      std::set<int> acc;
      for (int u : sat.eps[s])
        for (int v : rel[u]) acc.insert(sat.eps[v].begin(), sat.eps[v].end());
      out[s].assign(acc.begin(), acc.end());
    }
    sat.obs.emplace(act, std::move(out));
  }
  return sat;
}

namespace {

// Relations of the disjoint union, per label index (0 = eps).
struct Union {
  int n = 0;
  std::vector<Action> obs_labels;
  std::vector<std::vector<std::vector<int>>> rel;  // [label][state] -> successors

  Union(const SaturatedLts& a, const SaturatedLts& b, const ObsSet& k) {
    int na = a.base->state_count();
    n = na + b.base->state_count();
    for (const Action& act : k.actions()) obs_labels.push_back(act);
    rel.resize(obs_labels.size() + 1);
    auto splice = [&](const std::vector<std::vector<int>>& lhs,
                      const std::vector<std::vector<int>>& rhs,
                      std::vector<std::vector<int>>& out) {
      out.assign(n, {});
      for (int s = 0; s < static_cast<int>(lhs.size()); ++s) out[s] = lhs[s];
      for (int s = 0; s < static_cast<int>(rhs.size()); ++s) {
        auto& o = out[na + s];
        o.reserve(rhs[s].size());
        for (int t : rhs[s]) o.push_back(na + t);
      }
    };
    splice(a.eps, b.eps, rel[0]);
    static const std::vector<std::vector<int>> kEmpty;
    for (std::size_t i = 0; i < obs_labels.size(); ++i) {
      auto ia = a.obs.find(obs_labels[i]);
      auto ib = b.obs.find(obs_labels[i]);
      splice(ia == a.obs.end() ? kEmpty : ia->second,
             ib == b.obs.end() ? kEmpty : ib->second, rel[i + 1]);
    }
  }
};

}  // namespace

std::string BisimResult::describe() const {
  if (equivalent) return "equivalent";
  std::string s = "not equivalent";
  if (split) s += " (split on label '" + split->str() + "')";
  return s;
}

BisimResult weak_bisim(const Lts& a, const Lts& b, const ObsSet& k) {
  SaturatedLts sa = saturate(a, k);
  SaturatedLts sb = saturate(b, k);
  Union u(sa, sb, k);
  int na = a.state_count();

  // Partition refinement to the coarsest partition stable under every
  // saturated relation. Weak bisimilarity of the originals is strong
  // bisimilarity of the saturated systems.
  std::vector<int> block(u.n, 0);
  int blocks = 1;
  for (bool changed = true; changed;) {
    changed = false;
    // signature: for each label, the set of blocks reachable
    std::map<std::vector<std::vector<int>>, int> classes;
    std::vector<int> next(u.n);
    for (int s = 0; s < u.n; ++s) {
      std::vector<std::vector<int>> sig;
      sig.reserve(u.rel.size() + 1);
      sig.push_back({block[s]});
      for (const auto& rel : u.rel) {
        std::set<int> tgt;
        for (int t : rel[s]) tgt.insert(block[t]);
        sig.emplace_back(tgt.begin(), tgt.end());
      }
      auto [it, fresh] = classes.emplace(std::move(sig), static_cast<int>(classes.size()));
      next[s] = it->second;
    }
    if (static_cast<int>(classes.size()) != blocks) changed = true;
    blocks = static_cast<int>(classes.size());
    block = std::move(next);
  }

  BisimResult res;
  int ia = a.initial, ib = na + b.initial;
  res.equivalent = block[ia] == block[ib];
  if (!res.equivalent) {
    res.left_state = a.initial;
    res.right_state = b.initial;
    // The final partition is stable, so the initial states differ on some
    // label's reachable block set. Observable labels first; the eps
    // relation reaches the own block reflexively, which is no evidence.
    for (std::size_t li = 1; li <= u.rel.size(); ++li) {
      std::size_t idx = li % u.rel.size();  // 1..n-1, then 0 (eps) last
      std::set<int> ta, tb;
      for (int t : u.rel[idx][ia]) ta.insert(block[t]);
      for (int t : u.rel[idx][ib]) tb.insert(block[t]);
      if (idx == 0) {
        ta.erase(block[ia]);
        tb.erase(block[ib]);
      }
      if (ta != tb) {
        res.split = idx == 0 ? Label{Action::tau()} : Label{u.obs_labels[idx - 1]};
        break;
      }
    }
  }
  return res;
}

}  // namespace ccsr
