#include "ccsr/fes.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <cassert>
#include <functional>
#include <map>
#include <queue>
#include <sstream>

#include "ccsr/errors.hpp"
#include "ccsr/semantics.hpp"

namespace ccsr {

// ---------------------------------------------------------------------------
// Conflict trees

namespace {
bool node_contains(const ConflictNode& n, int i) { return n.lo <= i && i <= n.hi; }
}  // namespace

void OccTable::build_unit_cache(int unit) const {
  if (static_cast<int>(unit_cache_.size()) <= unit) {
    unit_cache_.resize(units.size());
    unit_adj_.resize(units.size());
    unit_width_.resize(units.size(), -1);
  }
  const ConflictNode& root = units[unit];
  int width = root.hi + 1;
  unit_width_[unit] = width;
  int words = (width * width + 63) / 64;
  auto& bits = unit_cache_[unit];
  bits.assign(static_cast<std::size_t>(words), 0);
  auto set = [&](int i, int j) {
    long at = static_cast<long>(i) * width + j;
    bits[at >> 6] |= std::uint64_t{1} << (at & 63);
  };
  auto& adj = unit_adj_[unit];
  adj.assign(static_cast<std::size_t>(std::max(width, 0)), {});
  std::function<void(const ConflictNode&)> walk = [&](const ConflictNode& n) {
    if (n.choice) {
      for (std::size_t x = 0; x < n.kids.size(); ++x) {
        for (std::size_t y = x + 1; y < n.kids.size(); ++y) {
          for (int i = n.kids[x].lo; i <= n.kids[x].hi; ++i)
            for (int j = n.kids[y].lo; j <= n.kids[y].hi; ++j) {
              set(i, j);
              set(j, i);
              adj[i].push_back(j);
              adj[j].push_back(i);
            }
        }
      }
    }
    for (const auto& kid : n.kids) walk(kid);
  };
  walk(root);
}

const std::vector<int>& OccTable::conflicting_indices(int unit, int index) const {
  if (static_cast<int>(unit_width_.size()) <= unit || unit_width_[unit] < 0)
    build_unit_cache(unit);
  static const std::vector<int> kEmpty;
  const auto& adj = unit_adj_[unit];
  if (index < 0 || index >= static_cast<int>(adj.size())) return kEmpty;
  return adj[index];
}

bool OccTable::tree_conflict(OccId a, OccId b) const {
  const Occurrence& oa = occs[a];
  const Occurrence& ob = occs[b];
  if (a == b || oa.unit != ob.unit) return false;
  if (static_cast<int>(unit_width_.size()) <= oa.unit || unit_width_[oa.unit] < 0)
    build_unit_cache(oa.unit);
  int width = unit_width_[oa.unit];
  if (oa.index >= width || ob.index >= width) return false;
  long at = static_cast<long>(oa.index) * width + ob.index;
  return (unit_cache_[oa.unit][at >> 6] >> (at & 63)) & 1;
}

// ---------------------------------------------------------------------------
// Guard check

namespace {

using CallKey = std::pair<std::string, std::vector<std::string>>;

struct CallEdge {
  std::string callee;
  bool guarded;  // a commit prefix lies between the body root and the call
};

void collect_call_edges(const Process& p, const ObsSet& k, bool guarded,
                        std::vector<CallEdge>& out) {
  switch (p.kind()) {
    case ProcKind::Nil:
      return;
    case ProcKind::Prefix:
      collect_call_edges(p.body(), k, guarded || k.contains(p.action()), out);
      return;
    case ProcKind::Call:
      out.push_back({p.name(), guarded});
      return;
    case ProcKind::Restrict:
      collect_call_edges(p.body(), k, guarded, out);
      return;
    case ProcKind::Sum:
    case ProcKind::Par:
      collect_call_edges(p.left(), k, guarded, out);
      collect_call_edges(p.right(), k, guarded, out);
      return;
  }
}

}  // namespace

// Definitions that can reach themselves through calls.
std::set<std::string> recursive_definitions(const Env& env) {
  std::map<std::string, std::set<std::string>> calls;
  for (const auto& [name, def] : env) {
    std::vector<CallEdge> edges;
    ObsSet none;
    collect_call_edges(def.body, none, false, edges);
    for (const auto& e : edges) calls[name].insert(e.callee);
  }
  std::set<std::string> recursive;
  for (const auto& [name, _] : env) {
    // reachability from name back to name
    std::set<std::string> seen;
    std::queue<std::string> q;
    for (const auto& c : calls[name]) q.push(c);
    while (!q.empty()) {
      std::string cur = q.front();
      q.pop();
      if (!seen.insert(cur).second) continue;
      if (cur == name) {
        recursive.insert(name);
        break;
      }
      for (const auto& c : calls[cur]) q.push(c);
    }
  }
  return recursive;
}

namespace {

struct InstCall {
  std::string callee;
  std::vector<std::string> actuals;
  bool guarded;
};

void collect_inst_calls(const Process& p, const ObsSet& k, bool guarded,
                        std::vector<InstCall>& out) {
  switch (p.kind()) {
    case ProcKind::Nil:
      return;
    case ProcKind::Prefix:
      collect_inst_calls(p.body(), k, guarded || k.contains(p.action()), out);
      return;
    case ProcKind::Call:
      out.push_back({p.name(), p.actuals(), guarded});
      return;
    case ProcKind::Restrict:
      collect_inst_calls(p.body(), k, guarded, out);
      return;
    case ProcKind::Sum:
    case ProcKind::Par:
      collect_inst_calls(p.left(), k, guarded, out);
      collect_inst_calls(p.right(), k, guarded, out);
      return;
  }
}

}  // namespace

void check_commit_guarded(const Process& p, const Env& env, const ObsSet& k) {
  check_wellformed(p, env);
  // Guardedness depends on the channels a definition is called with, so
  // the analysis works on instantiated call nodes (definition, actuals).
  // An unfolding can run forever without a commit exactly when the
  // subgraph of unguarded edges has a cycle among the reachable nodes.
  using Node = std::pair<std::string, std::vector<std::string>>;
  std::map<Node, std::vector<std::pair<Node, bool>>> graph;  // node -> (callee, guarded)
  std::deque<Node> frontier;
  int budget = 20000;

  auto expand = [&](const Node& node) {
    const Def& def = env.at(node.first);
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < def.formals.size(); ++i)
      m[def.formals[i]] = node.second[i];
    std::vector<InstCall> calls;
    collect_inst_calls(subst(def.body, m), k, false, calls);
    return calls;
  };
  auto discover = [&](const Node& node) {
    if (graph.count(node)) return;
    graph[node];
    frontier.push_back(node);
  };

  auto drain = [&] {
    while (!frontier.empty()) {
      Node node = frontier.front();
      frontier.pop_front();
      if (--budget < 0)
        throw ValidationError("commit-guard analysis budget exceeded; instantiations of '" +
                              node.first + "' do not stabilize");
      for (const InstCall& c : expand(node)) {
        Node next{c.callee, c.actuals};
        discover(next);
        graph[node].emplace_back(std::move(next), c.guarded);
      }
    }
  };

  std::vector<InstCall> seeds;
  collect_inst_calls(p, k, false, seeds);
  for (const auto& s : seeds) discover({s.callee, s.actuals});
  drain();
  // definitions not reached from the main term: identity instantiation
  for (const auto& [name, def] : env) {
    bool reached = false;
    for (const auto& [node, _] : graph)
      if (node.first == name) reached = true;
    if (!reached) discover({name, def.formals});
  }
  drain();

  // cycle detection over unguarded edges only
  std::map<Node, int> color;  // 0 white, 1 grey, 2 black
  std::vector<Node> path;
  std::function<void(const Node&)> dfs = [&](const Node& node) {
    color[node] = 1;
    path.push_back(node);
    for (const auto& [next, guarded] : graph[node]) {
      if (guarded) continue;
      int c = color[next];
      if (c == 1) {
        std::string cycle;
        for (auto it = std::find(path.begin(), path.end(), next); it != path.end(); ++it)
          cycle += it->first + " -> ";
        cycle += next.first;
        throw ValidationError("definition '" + next.first +
                              "' can unfold forever without crossing a commit: " + cycle);
      }
      if (c == 0) dfs(next);
    }
    path.pop_back();
    color[node] = 2;
  };
  for (const auto& [node, _] : graph)
    if (color[node] == 0) dfs(node);
}

// ---------------------------------------------------------------------------
// Translation

namespace {

void collect_names(const Process& p, std::set<std::string>& out) {
  switch (p.kind()) {
    case ProcKind::Nil:
      return;
    case ProcKind::Prefix:
      if (!p.action().silent()) out.insert(p.action().channel);
      collect_names(p.body(), out);
      return;
    case ProcKind::Call:
      for (const auto& a : p.actuals()) out.insert(a);
      return;
    case ProcKind::Restrict:
      out.insert(p.name());
      collect_names(p.body(), out);
      return;
    case ProcKind::Sum:
    case ProcKind::Par:
      collect_names(p.left(), out);
      collect_names(p.right(), out);
      return;
  }
}

}  // namespace

class UnitTranslator {
 public:
  Fes* fes;
  const Env* env;
  const ObsSet* obs;
  int unit;
  long max_events;
  std::set<std::string> recursive;
  int next_index = 0;
  std::vector<CallKey> inline_stack;

  struct Ctx {
    OccId enclosing = -1;
    EventId trigger = -1;
    bool sum_since_trigger = false;
    std::set<std::string> restricted;
  };

  struct Sub {
    std::vector<EventId> events;
    ConflictNode node;
  };

  EventId add_event(Action label, OccId c0, OccId c1, bool blocked) {
    if (static_cast<long>(fes->events_.size()) >= max_events)
      throw BudgetError("event budget exceeded while unfolding");
    Event e;
    e.label = std::move(label);
    e.cons[0] = c0;
    e.cons[1] = c1;
    e.ncons = c1 >= 0 ? 2 : 1;
    e.blocked = blocked;
    fes->events_.push_back(std::move(e));
    return static_cast<EventId>(fes->events_.size()) - 1;
  }

  Sub translate(const Process& p, Ctx ctx) {
    switch (p.kind()) {
      case ProcKind::Nil:
        return Sub{{}, ConflictNode{false, 0, -1, {}}};
      case ProcKind::Prefix: {
        auto& tab = *fes->occs_;
        OccId occ = static_cast<OccId>(tab.occs.size());
        bool restricted =
            !p.action().silent() && ctx.restricted.count(p.action().channel) != 0;
        tab.occs.push_back(Occurrence{p.action(), ctx.enclosing, unit, -1, restricted});
        if (!p.action().silent()) tab.reserved.insert(p.action().channel);
        EventId own = add_event(p.action(), occ, -1, restricted);
        Ctx inner = ctx;
        inner.enclosing = occ;
        if (obs->contains(p.action())) {
          inner.trigger = own;
          inner.sum_since_trigger = false;
        }
        Sub body = translate(p.body(), inner);
        tab.occs[occ].index = next_index++;  // post-order
        ConflictNode node;
        node.choice = false;
        node.lo = body.node.hi >= body.node.lo ? body.node.lo : tab.occs[occ].index;
        node.hi = tab.occs[occ].index;
        if (body.node.hi >= body.node.lo) node.kids.push_back(std::move(body.node));
        Sub out;
        out.events = std::move(body.events);
        out.events.push_back(own);
        out.node = std::move(node);
        return out;
      }
      case ProcKind::Sum: {
        Ctx inner = ctx;
        if (ctx.trigger >= 0) inner.sum_since_trigger = true;
        Sub l = translate(p.left(), inner);
        Sub r = translate(p.right(), inner);
        return combine(std::move(l), std::move(r), true);
      }
      case ProcKind::Par: {
        Sub l = translate(p.left(), ctx);
        Sub r = translate(p.right(), ctx);
        std::vector<EventId> syncs;
        for (EventId el : l.events) {
          // copy: add_event below may reallocate the event vector
          Event ev = fes->events_[el];
          if (ev.label.silent() || ev.is_sync()) continue;
          Action want = ev.label.complement();
          for (EventId er : r.events) {
            Event fv = fes->events_[er];
            if (fv.is_sync() || fv.label != want) continue;
            syncs.push_back(add_event(Action::tau(), ev.cons[0], fv.cons[0], false));
          }
        }
        Sub out = combine(std::move(l), std::move(r), false);
        for (EventId s : syncs) out.events.push_back(s);
        return out;
      }
      case ProcKind::Restrict: {
        Ctx inner = ctx;
        inner.restricted.insert(p.name());
        fes->occs_->reserved.insert(p.name());
        return translate(p.body(), inner);
      }
      case ProcKind::Call: {
        if (recursive.count(p.name()) && ctx.trigger >= 0) {
          if (ctx.sum_since_trigger)
            throw ValidationError(
                "recursive call to '" + p.name() +
                "' sits under a choice below its commit guard; this shape is not "
                "supported by the partial unfolding");
          fes->stubs_.push_back(
              Stub{p.name(), p.actuals(), ctx.trigger, ctx.enclosing, ctx.restricted});
          return Sub{{}, ConflictNode{false, 0, -1, {}}};
        }
        CallKey key{p.name(), p.actuals()};
        if (std::find(inline_stack.begin(), inline_stack.end(), key) != inline_stack.end())
          throw UnguardedRecursionError("definition '" + p.name() +
                                        "' unfolds into itself without crossing a commit");
        const Def& def = env->at(p.name());
        std::map<std::string, std::string> m;
        for (std::size_t i = 0; i < def.formals.size(); ++i)
          m[def.formals[i]] = p.actuals()[i];
        std::set<std::string> avoid = fes->occs_->reserved;
        avoid.insert(ctx.restricted.begin(), ctx.restricted.end());
        Process body = normalize(subst(def.body, m), avoid);
        inline_stack.push_back(std::move(key));
        Sub out = translate(body, ctx);
        inline_stack.pop_back();
        return out;
      }
    }
    return Sub{{}, ConflictNode{false, 0, -1, {}}};
  }

  Sub combine(Sub l, Sub r, bool choice) {
    ConflictNode node;
    node.choice = choice;
    bool le = l.node.hi < l.node.lo, re = r.node.hi < r.node.lo;
    node.lo = le ? r.node.lo : (re ? l.node.lo : std::min(l.node.lo, r.node.lo));
    node.hi = le ? r.node.hi : (re ? l.node.hi : std::max(l.node.hi, r.node.hi));
    if (!le) node.kids.push_back(std::move(l.node));
    if (!re) node.kids.push_back(std::move(r.node));
    Sub out;
    out.events = std::move(l.events);
    out.events.insert(out.events.end(), r.events.begin(), r.events.end());
    out.node = std::move(node);
    return out;
  }
};

Fes partial_unfold(const Process& p, const Env& env, const ObsSet& k, long max_events) {
  check_commit_guarded(p, env, k);
  validate_commit_polarity(p, env, k);
  Process n = normalize(p);

  Fes fes;
  collect_names(n, fes.occs_->reserved);
  fes.occs_->units.emplace_back();
  UnitTranslator tr{&fes, &env, &k, 0, max_events, recursive_definitions(env), 0, {}};
  auto sub = tr.translate(n, UnitTranslator::Ctx{});
  fes.occs_->units[0] = std::move(sub.node);
  fes.finish();
  return fes;
}

void Fes::instantiate(const Stub& stub, const Env& env, const ObsSet& k, long max_events,
                      const std::set<std::string>* recursive_defs) {
  const Def& def = env.at(stub.def);
  std::map<std::string, std::string> m;
  for (std::size_t i = 0; i < def.formals.size(); ++i)
    m[def.formals[i]] = stub.actuals[i];
  std::set<std::string> avoid = occs_->reserved;
  avoid.insert(stub.pending.begin(), stub.pending.end());
  Process body = normalize(subst(def.body, m), avoid);

  int unit = static_cast<int>(occs_->units.size());
  occs_->units.emplace_back();
  UnitTranslator tr{this, &env, &k, unit, max_events,
                    recursive_defs ? *recursive_defs : recursive_definitions(env), 0, {}};
  UnitTranslator::Ctx ctx;
  ctx.enclosing = stub.anchor;
  ctx.restricted = stub.pending;
  EventId first_new = event_count();
  auto sub = tr.translate(body, ctx);
  occs_->units[unit] = std::move(sub.node);

  // Synchronizations between the graft and everything already present.
  // A pair is skipped when one constituent guards the other through the
  // occurrence chain: a prefix cannot communicate with its own
  // continuation.
  auto guards_through = [&](OccId up, OccId down) {
    for (OccId o = occs_->occs[down].guard; o >= 0; o = occs_->occs[o].guard)
      if (o == up) return true;
    return false;
  };
  EventId end_new = event_count();
  for (EventId g = first_new; g < end_new; ++g) {
    Event ge = events_[g];  // copy: the push below reallocates
    if (ge.is_sync() || ge.label.silent()) continue;
    Action want = ge.label.complement();
    for (EventId x = 0; x < first_new; ++x) {
      Event xe = events_[x];
      if (xe.is_sync() || xe.label != want) continue;
      if (guards_through(xe.cons[0], ge.cons[0]) || guards_through(ge.cons[0], xe.cons[0]))
        continue;
      if (static_cast<long>(events_.size()) >= max_events)
        throw BudgetError("event budget exceeded while grafting");
      Event s;
      s.label = Action::tau();
      s.cons[0] = ge.cons[0];
      s.cons[1] = xe.cons[0];
      s.ncons = 2;
      events_.push_back(std::move(s));
    }
  }
}

// ---------------------------------------------------------------------------
// Derived structure

void Fes::set_conflict(EventId a, EventId b) {
  if (a == b) return;
  conflict_bits_[static_cast<std::size_t>(a) * words_ + (b >> 6)] |= std::uint64_t{1}
                                                                     << (b & 63);
  conflict_bits_[static_cast<std::size_t>(b) * words_ + (a >> 6)] |= std::uint64_t{1}
                                                                     << (a & 63);
}

void Fes::finish() {
  int n = event_count();
  words_ = (n + 63) / 64;
  preds_.assign(n, {});
  succs_.assign(n, {});
  conflict_bits_.assign(static_cast<std::size_t>(n) * words_, 0);

  // occurrence -> containing events, as sorted (occ, event) pairs
  std::vector<std::pair<OccId, EventId>> occ_ev;
  occ_ev.reserve(2 * static_cast<std::size_t>(n));
  for (EventId e = 0; e < n; ++e)
    for (int c = 0; c < events_[e].ncons; ++c) occ_ev.emplace_back(events_[e].cons[c], e);
  std::sort(occ_ev.begin(), occ_ev.end());
  auto group_of = [&](OccId occ) {
    auto lo = std::lower_bound(occ_ev.begin(), occ_ev.end(), std::make_pair(occ, -1));
    auto hi = std::upper_bound(occ_ev.begin(), occ_ev.end(),
                               std::make_pair(occ, std::numeric_limits<EventId>::max()));
    return std::make_pair(lo, hi);
  };

  std::vector<EventId> buf;
  for (EventId e = 0; e < n; ++e) {
    buf.clear();
    for (int c = 0; c < events_[e].ncons; ++c) {
      OccId g = occs_->occs[events_[e].cons[c]].guard;
      if (g < 0) continue;
      auto [lo, hi] = group_of(g);
      for (auto it = lo; it != hi; ++it)
        if (it->second != e) buf.push_back(it->second);
    }
    std::sort(buf.begin(), buf.end());
    buf.erase(std::unique(buf.begin(), buf.end()), buf.end());
    preds_[e] = buf;
    for (EventId d : buf) succs_[d].push_back(e);
  }
  for (const auto& [d, e] : extra_flow_) {
    if (std::find(preds_[e].begin(), preds_[e].end(), d) == preds_[e].end()) {
      preds_[e].push_back(d);
      succs_[d].push_back(e);
    }
  }
  for (auto& v : preds_) std::sort(v.begin(), v.end());
  for (auto& v : succs_) std::sort(v.begin(), v.end());
  flow_in_bits_.assign(static_cast<std::size_t>(n) * words_, 0);
  flow_out_bits_.assign(static_cast<std::size_t>(n) * words_, 0);
  for (EventId e = 0; e < n; ++e) {
    for (EventId d : preds_[e]) {
      flow_in_bits_[static_cast<std::size_t>(e) * words_ + (d >> 6)] |= std::uint64_t{1}
                                                                        << (d & 63);
      flow_out_bits_[static_cast<std::size_t>(d) * words_ + (e >> 6)] |= std::uint64_t{1}
                                                                         << (e & 63);
    }
  }

  // shared constituents conflict; groups are contiguous in occ_ev
  for (std::size_t i = 0; i < occ_ev.size();) {
    std::size_t j = i;
    while (j < occ_ev.size() && occ_ev[j].first == occ_ev[i].first) ++j;
    for (std::size_t a = i; a < j; ++a)
      for (std::size_t b = a + 1; b < j; ++b) set_conflict(occ_ev[a].second, occ_ev[b].second);
    i = j;
  }

  // per-unit interval conflicts, lifted through constituents; only
  // occurrences with recorded conflicts are visited
  std::vector<OccId> live_occs;
  for (std::size_t i = 0; i < occ_ev.size();) {
    std::size_t j = i;
    while (j < occ_ev.size() && occ_ev[j].first == occ_ev[i].first) ++j;
    live_occs.push_back(occ_ev[i].first);
    i = j;
  }
  std::stable_sort(live_occs.begin(), live_occs.end(), [&](OccId a, OccId b) {
    return occs_->occs[a].unit < occs_->occs[b].unit;
  });
  for (std::size_t ui = 0; ui < live_occs.size();) {
    std::size_t uj = ui;
    int unit = occs_->occs[live_occs[ui]].unit;
    while (uj < live_occs.size() && occs_->occs[live_occs[uj]].unit == unit) ++uj;
    // index -> live occurrence within this unit
    std::map<int, OccId> by_index;
    bool any = false;
    for (std::size_t a = ui; a < uj; ++a) {
      if (!occs_->conflicting_indices(unit, occs_->occs[live_occs[a]].index).empty())
        any = true;
    }
    if (any) {
      for (std::size_t a = ui; a < uj; ++a)
        by_index[occs_->occs[live_occs[a]].index] = live_occs[a];
      for (std::size_t a = ui; a < uj; ++a) {
        OccId oa = live_occs[a];
        for (int j2 : occs_->conflicting_indices(unit, occs_->occs[oa].index)) {
          auto it = by_index.find(j2);
          if (it == by_index.end() || it->second <= oa) continue;  // each pair once
          auto [la, ha] = group_of(oa);
          auto [lb, hb] = group_of(it->second);
          for (auto ia = la; ia != ha; ++ia)
            for (auto ib = lb; ib != hb; ++ib) set_conflict(ia->second, ib->second);
        }
      }
    }
    ui = uj;
  }
  for (const auto& [a, b] : extra_conflict_) set_conflict(a, b);
  rebuild_classes();
}

bool Fes::flow(EventId d, EventId e) const {
  return (flow_in_bits_[static_cast<std::size_t>(e) * words_ + (d >> 6)] >> (d & 63)) & 1;
}

bool Fes::conflict(EventId a, EventId b) const {
  if (a == b) return false;
  return (conflict_bits_[static_cast<std::size_t>(a) * words_ + (b >> 6)] >> (b & 63)) & 1;
}

int Fes::conflict_degree(EventId e) const {
  int deg = 0;
  for (int w = 0; w < words_; ++w)
    deg += std::popcount(conflict_bits_[static_cast<std::size_t>(e) * words_ + w]);
  return deg;
}

int Fes::alive_count() const {
  int n = 0;
  for (const auto& e : events_)
    if (!e.blocked) ++n;
  return n;
}

std::vector<EventId> Fes::alive_events() const {
  std::vector<EventId> out;
  for (EventId e = 0; e < event_count(); ++e)
    if (!events_[e].blocked) out.push_back(e);
  return out;
}

std::vector<EventId> Fes::ancestors(EventId e) const {
  std::vector<EventId> out;
  std::set<EventId> seen{e};
  std::queue<EventId> q;
  q.push(e);
  while (!q.empty()) {
    EventId cur = q.front();
    q.pop();
    out.push_back(cur);
    for (EventId d : preds_[cur])
      if (seen.insert(d).second) q.push(d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Configurations

bool Fes::is_configuration(const std::vector<EventId>& x) const {
  std::set<EventId> in(x.begin(), x.end());
  for (EventId e : in) {
    if (e < 0 || e >= event_count()) return false;
    if (events_[e].blocked) return false;
  }
  for (EventId a : in)
    for (EventId b : in)
      if (a < b && conflict(a, b)) return false;

  // cycle freedom of flow within x
  std::map<EventId, int> indeg;
  for (EventId e : in) {
    indeg[e];
    for (EventId d : preds_[e])
      if (in.count(d)) ++indeg[e];
  }
  std::queue<EventId> q;
  for (auto& [e, d] : indeg)
    if (d == 0) q.push(e);
  std::size_t done = 0;
  while (!q.empty()) {
    EventId e = q.front();
    q.pop();
    ++done;
    for (EventId s : succs_[e])
      if (in.count(s) && --indeg[s] == 0) q.push(s);
  }
  if (done != in.size()) return false;

  // left closure up to conflicts
  for (EventId e : in) {
    for (EventId d : preds_[e]) {
      if (in.count(d)) continue;
      bool discharged = false;
      for (EventId f : preds_[e])
        if (in.count(f) && conflict(f, d)) { discharged = true; break; }
      if (!discharged) return false;
    }
  }
  return true;
}

std::vector<std::vector<EventId>> Fes::e_minimal_configs(EventId e,
                                                         const ObsSet* skip_observable) const {
  std::vector<std::vector<EventId>> out;
  if (events_[e].blocked) return out;
  std::set<std::vector<EventId>> results;
  std::set<std::vector<EventId>> visited;

  std::function<void(std::set<EventId>&)> rec = [&](std::set<EventId>& x) {
    std::vector<EventId> key(x.begin(), x.end());
    if (!visited.insert(key).second) return;

    // first unresolved obligation
    for (EventId m : x) {
      for (EventId d : preds_[m]) {
        if (x.count(d)) continue;
        bool discharged = false;
        for (EventId f : preds_[m])
          if (x.count(f) && conflict(f, d)) { discharged = true; break; }
        if (discharged) continue;

        auto compatible = [&](EventId cand) {
          if (events_[cand].blocked) return false;
          if (skip_observable && cand != e && skip_observable->contains(events_[cand].label))
            return false;
          for (EventId y : x)
            if (conflict(cand, y)) return false;
          return true;
        };
        if (compatible(d)) {
          x.insert(d);
          rec(x);
          x.erase(d);
        }
        for (EventId f : preds_[m]) {
          if (f == d || x.count(f) || !conflict(f, d) || !compatible(f)) continue;
          x.insert(f);
          rec(x);
          x.erase(f);
        }
        return;
      }
    }
    // left-closed; keep if also cycle-free
    if (is_configuration(key)) results.insert(std::move(key));
  };

  std::set<EventId> x{e};
  rec(x);
  out.assign(results.begin(), results.end());
  return out;
}

// ---------------------------------------------------------------------------
// Residual

FesResidual Fes::residual(const std::vector<EventId>& x, bool finished) const {
  if (!is_configuration(x))
    throw ValidationError("residual is only defined for configurations");
  int n = event_count();
  std::vector<char> removed(n, 0);
  for (EventId e : x) removed[e] = 1;
  for (EventId e = 0; e < n; ++e) {
    if (removed[e]) continue;
    for (EventId m : x)
      if (conflict(m, e)) { removed[e] = 1; break; }
  }

  FesResidual out;
  out.fes.occs_ = occs_;
  std::vector<EventId> remap(n, -1);
  for (EventId e = 0; e < n; ++e) {
    if (removed[e]) continue;
    remap[e] = out.fes.event_count();
    out.fes.events_.push_back(events_[e]);
  }
  std::set<EventId> executed(x.begin(), x.end());
  for (const Stub& s : stubs_) {
    if (executed.count(s.trigger)) {
      out.to_instantiate.push_back(s);
    } else if (remap[s.trigger] >= 0) {
      Stub kept = s;
      kept.trigger = remap[s.trigger];
      out.fes.stubs_.push_back(std::move(kept));
    }
    // trigger removed by conflict: the stub dies with its branch
  }
  for (const auto& [d, e] : extra_flow_)
    if (remap[d] >= 0 && remap[e] >= 0) out.fes.extra_flow_.emplace(remap[d], remap[e]);
  for (const auto& [a, b] : extra_conflict_)
    if (remap[a] >= 0 && remap[b] >= 0)
      out.fes.extra_conflict_.emplace(remap[a], remap[b]);
  if (finished) out.fes.finish();
  return out;
}

// ---------------------------------------------------------------------------
// Signature and isomorphism

namespace {

std::uint64_t fnv(std::uint64_t h, std::uint64_t v) {
  h ^= v;
  return h * 1099511628211ULL;
}

std::uint64_t fnv_str(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) h = fnv(h, c);
  return fnv(h, 0x1f);
}

std::uint64_t action_hash(const Action& a) {
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv(h, static_cast<std::uint64_t>(a.kind));
  return fnv_str(h, a.channel);
}

struct EventClass {
  std::uint64_t label;
  bool blocked;
  int ncons;
  std::size_t indeg, outdeg;
  int confdeg;
  std::uint64_t predlabels;
  auto operator<=>(const EventClass&) const = default;
};

EventClass event_class(const Fes& f, EventId e) {
  EventClass c;
  c.label = action_hash(f.label(e));
  c.blocked = f.blocked(e);
  c.ncons = f.event(e).ncons;
  c.indeg = f.preds(e).size();
  c.outdeg = f.succs(e).size();
  c.confdeg = f.conflict_degree(e);
  std::vector<std::uint64_t> pl;
  pl.reserve(f.preds(e).size());
  for (EventId d : f.preds(e)) pl.push_back(action_hash(f.label(d)));
  std::sort(pl.begin(), pl.end());
  std::uint64_t h = 1469598103934665603ULL;
  for (auto s : pl) h = fnv(h, s);
  c.predlabels = h;
  return c;
}

std::uint64_t class_hash(const EventClass& c) {
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv(h, c.label);
  h = fnv(h, c.blocked);
  h = fnv(h, static_cast<std::uint64_t>(c.ncons));
  h = fnv(h, c.indeg);
  h = fnv(h, c.outdeg);
  h = fnv(h, static_cast<std::uint64_t>(c.confdeg));
  h = fnv(h, c.predlabels);
  return h;
}

std::uint64_t stub_hash(const Fes& f, const Stub& s) {
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv_str(h, s.def);
  for (const auto& a : s.actuals) h = fnv_str(h, a);
  for (const auto& pn : s.pending) h = fnv_str(h, pn);
  h = fnv(h, action_hash(f.label(s.trigger)));
  h = fnv(h, action_hash(f.occs().occs[s.anchor].label));
  return h;
}

}  // namespace

void Fes::rebuild_classes() {
  class_hashes_.resize(events_.size());
  for (EventId e = 0; e < event_count(); ++e)
    class_hashes_[e] = class_hash(event_class(*this, e));
}

std::uint64_t Fes::signature() const {
  std::vector<std::uint64_t> hs = class_hashes_;
  std::sort(hs.begin(), hs.end());
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv(h, events_.size());
  for (auto v : hs) h = fnv(h, v);
  std::vector<std::uint64_t> ss;
  for (const Stub& s : stubs_) ss.push_back(stub_hash(*this, s));
  std::sort(ss.begin(), ss.end());
  h = fnv(h, ss.size());
  for (auto v : ss) h = fnv(h, v);
  return h;
}

bool isomorphic(const Fes& a, const Fes& b) {
  int n = a.event_count();
  if (n != b.event_count() || a.stubs_.size() != b.stubs_.size()) return false;

  std::map<std::uint64_t, std::vector<EventId>> cb;
  for (EventId e = 0; e < n; ++e) cb[b.class_hashes_[e]].push_back(e);
  std::map<std::uint64_t, std::size_t> ca_size;
  for (EventId e = 0; e < n; ++e) ++ca_size[a.class_hashes_[e]];
  if (ca_size.size() != cb.size()) return false;
  for (auto& [key, cnt] : ca_size) {
    auto it = cb.find(key);
    if (it == cb.end() || it->second.size() != cnt) return false;
  }

  // order: smallest classes first, to fail fast
  std::vector<EventId> order;
  {
    std::vector<std::pair<std::size_t, EventId>> tmp;
    for (EventId e = 0; e < n; ++e) tmp.emplace_back(ca_size[a.class_hashes_[e]], e);
    std::sort(tmp.begin(), tmp.end());
    for (auto& [_, e] : tmp) order.push_back(e);
  }

  int words = (n + 63) / 64;
  std::vector<std::uint64_t> mask_a(words, 0), mask_b(words, 0);
  std::vector<EventId> map_ab(n, -1), map_ba(n, -1);
  // a masked row of x maps onto the corresponding row of y when the
  // assigned part agrees under the current bijection
  auto rows_agree = [&](const std::vector<std::uint64_t>& rows_a,
                        const std::vector<std::uint64_t>& rows_b, EventId ea,
                        EventId eb) {
    int count_a = 0, count_b = 0;
    for (int w = 0; w < words; ++w) {
      std::uint64_t wa = rows_a[static_cast<std::size_t>(ea) * words + w] & mask_a[w];
      std::uint64_t wb = rows_b[static_cast<std::size_t>(eb) * words + w] & mask_b[w];
      count_a += std::popcount(wa);
      count_b += std::popcount(wb);
      while (wa) {
        int d = w * 64 + std::countr_zero(wa);
        wa &= wa - 1;
        EventId img = map_ab[d];
        if (!((rows_b[static_cast<std::size_t>(eb) * words + (img >> 6)] >> (img & 63)) & 1))
          return false;
      }
    }
    return count_a == count_b;
  };
  std::function<bool(std::size_t)> assign = [&](std::size_t idx) -> bool {
    if (idx == order.size()) {
      // events are mapped consistently; match the stubs
      std::vector<char> used(b.stubs_.size(), 0);
      for (const Stub& sa : a.stubs_) {
        bool found = false;
        for (std::size_t j = 0; j < b.stubs_.size(); ++j) {
          if (used[j]) continue;
          const Stub& sb = b.stubs_[j];
          if (sa.def != sb.def || sa.actuals != sb.actuals || sa.pending != sb.pending)
            continue;
          if (map_ab[sa.trigger] != sb.trigger) continue;
          // the anchors must pin corresponding event sets
          std::set<EventId> ea, eb;
          for (EventId e = 0; e < n; ++e) {
            const Event& ev = a.events_[e];
            for (int c = 0; c < ev.ncons; ++c)
              if (ev.cons[c] == sa.anchor) ea.insert(map_ab[e]);
            const Event& fv = b.events_[e];
            for (int c = 0; c < fv.ncons; ++c)
              if (fv.cons[c] == sb.anchor) eb.insert(e);
          }
          if (ea != eb) continue;
          used[j] = 1;
          found = true;
          break;
        }
        if (!found) return false;
      }
      return true;
    }
    EventId ea = order[idx];
    for (EventId eb : cb[a.class_hashes_[ea]]) {
      if (map_ba[eb] >= 0) continue;
      if (!rows_agree(a.flow_in_bits_, b.flow_in_bits_, ea, eb)) continue;
      if (!rows_agree(a.flow_out_bits_, b.flow_out_bits_, ea, eb)) continue;
      if (!rows_agree(a.conflict_bits_, b.conflict_bits_, ea, eb)) continue;
      map_ab[ea] = eb;
      map_ba[eb] = ea;
      mask_a[ea >> 6] |= std::uint64_t{1} << (ea & 63);
      mask_b[eb >> 6] |= std::uint64_t{1} << (eb & 63);
      if (assign(idx + 1)) return true;
      map_ab[ea] = -1;
      map_ba[eb] = -1;
      mask_a[ea >> 6] &= ~(std::uint64_t{1} << (ea & 63));
      mask_b[eb >> 6] &= ~(std::uint64_t{1} << (eb & 63));
    }
    return false;
  };
  return assign(0);
}

// ---------------------------------------------------------------------------
// Export and builder

std::string Fes::to_dot() const {
  std::ostringstream os;
  os << "digraph fes {\n  rankdir=TB;\n";
  for (EventId e = 0; e < event_count(); ++e) {
    os << "  e" << e << " [label=\"" << e << ":" << label(e).str() << "\""
       << (blocked(e) ? ", style=dotted" : "") << "];\n";
  }
  for (EventId e = 0; e < event_count(); ++e)
    for (EventId d : preds_[e]) os << "  e" << d << " -> e" << e << ";\n";
  for (EventId a = 0; a < event_count(); ++a)
    for (EventId b = a + 1; b < event_count(); ++b)
      if (conflict(a, b))
        os << "  e" << a << " -> e" << b << " [dir=none, style=dashed];\n";
  os << "}\n";
  return os.str();
}

EventId FesBuilder::add_event(Action label, bool blocked) {
  auto& tab = *fes_.occs_;
  if (tab.units.empty()) tab.units.emplace_back();
  OccId occ = static_cast<OccId>(tab.occs.size());
  tab.occs.push_back(Occurrence{label, -1, 0, occ, false});
  tab.units[0].lo = 0;
  tab.units[0].hi = occ;
  Event e;
  e.label = std::move(label);
  e.cons[0] = occ;
  e.ncons = 1;
  e.blocked = blocked;
  fes_.events_.push_back(std::move(e));
  return static_cast<EventId>(fes_.events_.size()) - 1;
}

void FesBuilder::add_flow(EventId d, EventId e) { fes_.extra_flow_.emplace(d, e); }
void FesBuilder::add_conflict(EventId a, EventId b) { fes_.extra_conflict_.emplace(a, b); }

Fes FesBuilder::build() {
  fes_.finish();
  return fes_;
}

}  // namespace ccsr
