#include "ccsr/rccs.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "ccsr/errors.hpp"

namespace ccsr {

// ---------------------------------------------------------------------------
// Memory

Memory Memory::below() const {
  assert(top_);
  return Memory(top_->below);
}

Memory Memory::push_open(int tid, Action a, Process alt) const {
  auto n = std::make_shared<MemNode>();
  n->kind = MemKind::Open;
  n->tid = tid;
  n->action = std::move(a);
  n->alt = std::move(alt);
  n->below = top_;
  n->len = size() + 1;
  return Memory(std::move(n));
}

Memory Memory::push_closed(int tid) const {
  auto n = std::make_shared<MemNode>();
  n->kind = MemKind::Closed;
  n->tid = tid;
  n->below = top_;
  n->len = size() + 1;
  return Memory(std::move(n));
}

Memory Memory::push_fork(bool left) const {
  auto n = std::make_shared<MemNode>();
  n->kind = left ? MemKind::ForkL : MemKind::ForkR;
  n->below = top_;
  n->len = size() + 1;
  return Memory(std::move(n));
}

bool operator==(const Memory& a, const Memory& b) {
  const MemNode* x = a.top_.get();
  const MemNode* y = b.top_.get();
  while (x != y) {
    if (!x || !y || x->len != y->len || x->kind != y->kind || x->tid != y->tid)
      return false;
    if (x->kind == MemKind::Open &&
        (x->action != y->action || compare(x->alt, y->alt) != 0))
      return false;
    x = x->below.get();
    y = y->below.get();
  }
  return true;
}

bool Memory::is_prefix_of(const Memory& other) const {
  if (size() > other.size()) return false;
  const MemNode* o = other.top_.get();
  for (int k = other.size() - size(); k > 0; --k) o = o->below.get();
  Memory trimmed{std::shared_ptr<const MemNode>(other.top_, o)};
  return *this == trimmed;
}

std::optional<Memory> Memory::below_elem(int tid) const {
  for (std::shared_ptr<const MemNode> n = top_; n; n = n->below) {
    if ((n->kind == MemKind::Open || n->kind == MemKind::Closed) && n->tid == tid)
      return Memory(n->below);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// RProcess

struct RNode {
  RKind kind = RKind::Thread;
  Memory mem;
  Process code;
  std::string name;
  std::shared_ptr<const RNode> sub0, sub1;
};

namespace {
const std::shared_ptr<const RNode>& empty_thread_node() {
  static const std::shared_ptr<const RNode> n = std::make_shared<RNode>();
  return n;
}
}  // namespace

RProcess::RProcess() : node_(empty_thread_node()) {}

RProcess RProcess::thread(Memory m, Process code) {
  Process c = normalize(code);
  if (c.kind() == ProcKind::Par) {
    // distribute the memory over the parallel components, marking sides
    return par(thread(m.push_fork(true), c.left()), thread(m.push_fork(false), c.right()));
  }
  auto n = std::make_shared<RNode>();
  n->kind = RKind::Thread;
  n->mem = std::move(m);
  n->code = std::move(c);
  return RProcess(std::move(n));
}

RProcess RProcess::par(RProcess l, RProcess r) {
  auto n = std::make_shared<RNode>();
  n->kind = RKind::Par;
  n->sub0 = l.node_;
  n->sub1 = r.node_;
  return RProcess(std::move(n));
}

RProcess RProcess::res(std::string channel, RProcess body) {
  auto n = std::make_shared<RNode>();
  n->kind = RKind::Res;
  n->name = std::move(channel);
  n->sub0 = body.node_;
  return RProcess(std::move(n));
}

RKind RProcess::kind() const { return node_->kind; }
const Memory& RProcess::mem() const { return node_->mem; }
const Process& RProcess::code() const { return node_->code; }
RProcess RProcess::left() const { return RProcess(node_->sub0); }
RProcess RProcess::right() const { return RProcess(node_->sub1); }
const std::string& RProcess::name() const { return node_->name; }
RProcess RProcess::body() const { return RProcess(node_->sub0); }

// ---------------------------------------------------------------------------
// Walkers

namespace {

void collect_tids(const Memory& m, std::set<int>& out) {
  for (const MemNode* n = m.top(); n; n = n->below.get())
    if (n->kind == MemKind::Open || n->kind == MemKind::Closed) out.insert(n->tid);
}

void collect_tids(const RProcess& r, std::set<int>& out) {
  switch (r.kind()) {
    case RKind::Thread: collect_tids(r.mem(), out); return;
    case RKind::Par:
      collect_tids(r.left(), out);
      collect_tids(r.right(), out);
      return;
    case RKind::Res: collect_tids(r.body(), out); return;
  }
}

std::set<std::string> mem_names(const Memory& m) {
  std::set<std::string> out;
  for (const MemNode* n = m.top(); n; n = n->below.get()) {
    if (n->kind != MemKind::Open) continue;
    if (!n->action.silent()) out.insert(n->action.channel);
    auto fn = free_names(n->alt);
    out.insert(fn.begin(), fn.end());
  }
  return out;
}

int max_tid(const RProcess& r) {
  std::set<int> tids;
  collect_tids(r, tids);
  return tids.empty() ? 0 : *tids.rbegin();
}

}  // namespace

RProcess lift(const Process& p) { return RProcess::thread(Memory(), p); }

namespace {
Process forget_rec(const RProcess& r) {
  switch (r.kind()) {
    case RKind::Thread: return r.code();
    case RKind::Par: return Process::par(forget_rec(r.left()), forget_rec(r.right()));
    case RKind::Res: return Process::res(r.name(), forget_rec(r.body()));
  }
  return Process::nil();
}
}  // namespace

Process forget(const RProcess& r) { return normalize(forget_rec(r)); }

namespace {
void rprint_rec(const RProcess& r, std::string& out) {
  switch (r.kind()) {
    case RKind::Thread: {
      out += "{";
      for (const MemNode* n = r.mem().top(); n; n = n->below.get()) {
        switch (n->kind) {
          case MemKind::Open:
            out += "<" + std::to_string(n->tid) + "," + n->action.str() + "," +
                   print(n->alt) + ">";
            break;
          case MemKind::Closed:
            out += "<" + std::to_string(n->tid) + ">";
            break;
          case MemKind::ForkL:
            out += "<L>";
            break;
          case MemKind::ForkR:
            out += "<R>";
            break;
        }
      }
      out += "} |> " + print(r.code());
      return;
    }
    case RKind::Par:
      out += "(";
      rprint_rec(r.left(), out);
      out += " | ";
      rprint_rec(r.right(), out);
      out += ")";
      return;
    case RKind::Res:
      out += "(" + r.name() + ") ";
      rprint_rec(r.body(), out);
      return;
  }
}
}  // namespace

std::string rprint(const RProcess& r) {
  std::string out;
  rprint_rec(r, out);
  return out;
}

// ---------------------------------------------------------------------------
// Steps

namespace {

struct RawStep {
  Action action;
  bool backward = false;
  int tid = -1;  // concrete for backward steps
  std::function<RProcess(int)> build;
};

// Un-distributes a subtree back into a single thread, when every fork in
// it has been fully undone. Restrictions over retractable threads are
// absorbed into the code on the way.
std::optional<std::pair<Memory, Process>> retract(const RProcess& r) {
  switch (r.kind()) {
    case RKind::Thread:
      return std::make_pair(r.mem(), r.code());
    case RKind::Par: {
      auto l = retract(r.left());
      auto rr = retract(r.right());
      if (!l || !rr) return std::nullopt;
      const MemNode* lt = l->first.top();
      const MemNode* rt = rr->first.top();
      if (!lt || !rt || lt->kind != MemKind::ForkL || rt->kind != MemKind::ForkR)
        return std::nullopt;
      if (!(l->first.below() == rr->first.below())) return std::nullopt;
      return std::make_pair(l->first.below(), Process::par(l->second, rr->second));
    }
    case RKind::Res: {
      auto b = retract(r.body());
      if (!b) return std::nullopt;
      if (mem_names(b->first).count(r.name())) return std::nullopt;
      return std::make_pair(b->first, Process::res(r.name(), b->second));
    }
  }
  return std::nullopt;
}

Process rebuild_sum(const std::vector<Process>& ops, std::size_t skip) {
  Process acc = Process::nil();
  bool have = false;
  for (std::size_t i = ops.size(); i-- > 0;) {
    if (i == skip) continue;
    acc = have ? Process::sum(ops[i], acc) : ops[i];
    have = true;
  }
  return acc;
}

void add_act_star(const Memory& m, const Process& code, std::vector<RawStep>& out) {
  const MemNode* t = m.top();
  if (!t || t->kind != MemKind::Open) return;
  Action a = t->action;
  Process alt = t->alt;
  Memory rest = m.below();
  Process c = code;
  out.push_back({a, true, t->tid, [rest, a, c, alt](int) {
                   return RProcess::thread(rest, Process::sum(Process::prefix(a, c), alt));
                 }});
}

struct Stepper {
  RCtx* ctx;
  UnfoldBudget* budget;

  std::vector<RawStep> steps(const RProcess& r) {
    switch (r.kind()) {
      case RKind::Thread: return thread_steps(r.mem(), r.code());
      case RKind::Par: return par_steps(r);
      case RKind::Res: return res_steps(r);
    }
    return {};
  }

  // The choice operands of a code term, unfolded and with unit laws
  // applied, mirroring the plain-CCS transition relation.
  std::vector<Process> live_operands(const Process& code) {
    std::vector<Process> ops = choice_operands(code, *ctx->env, *budget);
    std::vector<Process> live;
    for (const Process& op : ops) {
      Process n = normalize(op);
      if (n.is_nil()) continue;
      if (n.kind() == ProcKind::Sum) {
        for (const Process& inner : choice_operands(n, *ctx->env, *budget))
          live.push_back(inner);
      } else {
        live.push_back(n);
      }
    }
    return live;
  }

  std::vector<RawStep> thread_steps(const Memory& m, const Process& code) {
    std::vector<RawStep> out;
    add_act_star(m, code, out);
    if (code.kind() == ProcKind::Restrict) {
      hoisted_forward(m, code, out);
      return out;
    }
    std::vector<Process> live = live_operands(code);
    if (live.size() == 1 && live[0].kind() != ProcKind::Prefix) {
      // a single live operand that is itself composite: step through the
      // congruence (distribution or hoisting happens in the recursion)
      forward_of(RProcess::thread(m, live[0]), out);
      return out;
    }
    for (std::size_t i = 0; i < live.size(); ++i) {
      if (live[i].kind() != ProcKind::Prefix) continue;
      Action a = live[i].action();
      Process body = live[i].body();
      Memory mm = m;
      if (ctx->obs->contains(a)) {
        out.push_back({a, false, -1, [mm, body](int tid) {
                         return RProcess::thread(mm.push_closed(tid), body);
                       }});
      } else {
        Process alt = rebuild_sum(live, i);
        out.push_back({a, false, -1, [mm, a, alt, body](int tid) {
                         return RProcess::thread(mm.push_open(tid, a, alt), body);
                       }});
      }
    }
    return out;
  }

  // Forward steps of a subterm built on the fly (virtual view); its
  // backward steps are those of the raw thread and are added separately.
  void forward_of(const RProcess& virt, std::vector<RawStep>& out) {
    for (auto& s : steps(virt))
      if (!s.backward) out.push_back(std::move(s));
  }

  // m |> (x)p steps through the congruence (x)(m |> p), renaming the
  // binder when it collides with a name recorded in the memory.
  void hoisted_forward(const Memory& m, const Process& code, std::vector<RawStep>& out) {
    std::vector<std::string> binders;
    Process inner = code;
    while (inner.kind() == ProcKind::Restrict) {
      binders.push_back(inner.name());
      inner = inner.body();
    }
    std::set<std::string> taken = mem_names(m);
    auto inner_free = free_names(inner);
    taken.insert(inner_free.begin(), inner_free.end());
    std::map<std::string, std::string> ren;
    for (auto& x : binders) {
      if (taken.count(x)) {
        std::string x2;
        for (int i = 1;; ++i) {
          x2 = x + "'" + std::to_string(i);
          if (!taken.count(x2)) break;
        }
        taken.insert(x2);
        ren[x] = x2;
        x = x2;
      } else {
        taken.insert(x);
      }
    }
    if (!ren.empty()) inner = subst(inner, ren);
    RProcess virt = RProcess::thread(m, inner);
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      virt = RProcess::res(*it, virt);
    forward_of(virt, out);
  }

  std::vector<RawStep> par_steps(const RProcess& r) {
    std::vector<RawStep> out;
    RProcess lhs = r.left(), rhs = r.right();
    std::vector<RawStep> ls = steps(lhs);
    std::vector<RawStep> rs = steps(rhs);
    std::set<int> tl, tr;
    collect_tids(lhs, tl);
    collect_tids(rhs, tr);

    for (const auto& s : ls) {
      if (s.backward && tr.count(s.tid)) continue;  // partner must join
      auto b = s.build;
      out.push_back({s.action, s.backward, s.tid,
                     [b, rhs](int tid) { return RProcess::par(b(tid), rhs); }});
    }
    for (const auto& s : rs) {
      if (s.backward && tl.count(s.tid)) continue;
      auto b = s.build;
      out.push_back({s.action, s.backward, s.tid,
                     [b, lhs](int tid) { return RProcess::par(lhs, b(tid)); }});
    }
    for (const auto& a : ls) {
      if (a.action.silent()) continue;
      for (const auto& b : rs) {
        if (b.action.silent()) continue;
        if (b.action != a.action.complement()) continue;
        if (a.backward != b.backward) continue;
        if (a.backward) {
          if (a.tid != b.tid) continue;  // undo with the exact same partner
        }
        auto ba = a.build, bb = b.build;
        out.push_back({Action::tau(), a.backward, a.tid,
                       [ba, bb](int tid) { return RProcess::par(ba(tid), bb(tid)); }});
      }
    }

    // an (act*) below fully undone forks becomes visible by retracting
    if (auto merged = retract(r)) add_act_star(merged->first, merged->second, out);
    return out;
  }

  std::vector<RawStep> res_steps(const RProcess& r) {
    std::vector<RawStep> out;
    std::string x = r.name();
    for (auto& s : steps(r.body())) {
      if (!s.action.silent() && s.action.channel == x) continue;
      auto b = s.build;
      out.push_back({s.action, s.backward, s.tid,
                     [b, x](int tid) { return RProcess::res(x, b(tid)); }});
    }
    return out;
  }
};

}  // namespace

std::vector<RTransition> rtransitions(const RProcess& r, RCtx& ctx) {
  UnfoldBudget budget = ctx.budget_per_step;
  Stepper st{&ctx, &budget};
  std::vector<RTransition> out;
  for (auto& s : st.steps(r)) {
    int tid = s.backward ? s.tid : ctx.next_tid++;
    RTransition t;
    t.source = r;
    t.action = s.action;
    t.tid = tid;
    t.backward = s.backward;
    t.commit = !s.backward && ctx.obs->contains(s.action);
    t.target = s.build(tid);
    out.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Causality

namespace {
// The pushed element may have fork markers above it when the target
// distributed a parallel continuation in the same step, so search the
// whole stack; the distributed copies share one node and deduplicate.
void collect_mu(const RProcess& r, int tid, std::vector<Memory>& out,
                std::set<const MemNode*>& seen) {
  switch (r.kind()) {
    case RKind::Thread: {
      if (auto below = r.mem().below_elem(tid)) {
        if (seen.insert(below->top()).second) out.push_back(*below);
      }
      return;
    }
    case RKind::Par:
      collect_mu(r.left(), tid, out, seen);
      collect_mu(r.right(), tid, out, seen);
      return;
    case RKind::Res:
      collect_mu(r.body(), tid, out, seen);
      return;
  }
}
}  // namespace

std::vector<Memory> mu(const RTransition& t) {
  if (t.backward) throw ValidationError("mu is defined for forward transitions only");
  std::vector<Memory> out;
  std::set<const MemNode*> seen;
  collect_mu(t.target, t.tid, out, seen);
  return out;
}

bool direct_cause(const Trace& trace, std::size_t i, std::size_t j) {
  if (i >= trace.size() || j >= trace.size())
    throw ValidationError("trace index out of range");
  if (i >= j) return false;
  auto mi = mu(trace[i]);
  auto mj = mu(trace[j]);
  for (const Memory& a : mi)
    for (const Memory& b : mj)
      if (a.size() < b.size() && a.is_prefix_of(b)) return true;
  return false;
}

namespace {
// reachability of n-1 from every node through the direct-causality edges
std::vector<char> causes_last(const Trace& trace) {
  std::size_t n = trace.size();
  std::vector<std::vector<char>> direct(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) direct[i][j] = direct_cause(trace, i, j);
  std::vector<char> reach(n, 0);
  reach[n - 1] = 1;
  for (std::size_t i = n - 1; i-- > 0;)
    for (std::size_t j = i + 1; j < n; ++j)
      if (direct[i][j] && reach[j]) { reach[i] = 1; break; }
  return reach;
}
}  // namespace

bool is_causal(const Trace& trace) {
  if (trace.empty()) return false;
  for (const auto& t : trace)
    if (t.backward) return false;
  auto reach = causes_last(trace);
  for (std::size_t i = 0; i + 1 < trace.size(); ++i)
    if (!reach[i]) return false;
  return true;
}

bool is_k_causal(const Trace& trace, const ObsSet& k) {
  if (trace.empty()) return false;
  if (!k.contains(trace.back().action)) return false;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i)
    if (k.contains(trace[i].action)) return false;
  return is_causal(trace);
}

// ---------------------------------------------------------------------------
// Canonical keys

namespace {

Process head_unfold(const Process& p, const Env& env) {
  Process c = p;
  std::set<std::pair<std::string, std::vector<std::string>>> seen;
  int fuel = 1000;
  while (c.kind() == ProcKind::Call && fuel-- > 0) {
    if (!seen.emplace(c.name(), c.actuals()).second) break;  // unguarded cycle
    auto it = env.find(c.name());
    if (it == env.end()) break;
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < it->second.formals.size() && i < c.actuals().size(); ++i)
      m[it->second.formals[i]] = c.actuals()[i];
    c = normalize(subst(it->second.body, m));
  }
  return c;
}

// Key normal form: call heads unfolded, parallel code distributed,
// restrictions over parallel code hoisted, restrictions absorbed into
// sequential thread code.
RProcess knf(const RProcess& r, const Env& env) {
  switch (r.kind()) {
    case RKind::Thread: {
      Process c = head_unfold(r.code(), env);
      if (c.kind() == ProcKind::Par) return knf(RProcess::thread(r.mem(), c), env);
      if (c.kind() == ProcKind::Restrict) {
        // decide between the absorbed form and hoisting over a fork
        std::vector<std::string> binders;
        Process inner = c;
        while (inner.kind() == ProcKind::Restrict) {
          binders.push_back(inner.name());
          inner = inner.body();
        }
        inner = head_unfold(inner, env);
        if (inner.kind() == ProcKind::Par) {
          std::set<std::string> taken = mem_names(r.mem());
          auto fn = free_names(inner);
          taken.insert(fn.begin(), fn.end());
          std::map<std::string, std::string> ren;
          for (auto& x : binders) {
            if (taken.count(x)) {
              std::string x2;
              for (int i = 1;; ++i) {
                x2 = x + "'" + std::to_string(i);
                if (!taken.count(x2)) break;
              }
              taken.insert(x2);
              ren[x] = x2;
              x = x2;
            } else {
              taken.insert(x);
            }
          }
          if (!ren.empty()) inner = subst(inner, ren);
          RProcess out = knf(RProcess::thread(r.mem(), inner), env);
          for (auto it = binders.rbegin(); it != binders.rend(); ++it)
            out = RProcess::res(*it, out);
          return out;
        }
        Process folded = inner;
        for (auto it = binders.rbegin(); it != binders.rend(); ++it)
          folded = Process::res(*it, folded);
        return RProcess::thread(r.mem(), folded);
      }
      return RProcess::thread(r.mem(), c);
    }
    case RKind::Par:
      return RProcess::par(knf(r.left(), env), knf(r.right(), env));
    case RKind::Res: {
      RProcess b = knf(r.body(), env);
      if (b.kind() == RKind::Thread && !mem_names(b.mem()).count(r.name()))
        return knf(RProcess::thread(b.mem(), Process::res(r.name(), b.code())), env);
      return RProcess::res(r.name(), b);
    }
  }
  return r;
}

struct KeySer {
  std::map<int, int> tids;
  int res_counter = 0;
  std::ostringstream out;

  int tid_id(int tid) {
    return tids.emplace(tid, static_cast<int>(tids.size())).first->second;
  }

  std::string proc(const Process& p, const std::map<std::string, std::string>& ren) {
    return print(normalize(subst(p, ren)));
  }

  void walk(const RProcess& r, std::map<std::string, std::string> ren) {
    switch (r.kind()) {
      case RKind::Thread: {
        out << "T[";
        for (const MemNode* n = r.mem().top(); n; n = n->below.get()) {
          switch (n->kind) {
            case MemKind::Open: {
              Action a = n->action;
              auto it = a.silent() ? ren.end() : ren.find(a.channel);
              if (it != ren.end()) a.channel = it->second;
              out << "o(" << tid_id(n->tid) << "," << a.str() << "," << proc(n->alt, ren)
                  << ")";
              break;
            }
            case MemKind::Closed:
              out << "c(" << tid_id(n->tid) << ")";
              break;
            case MemKind::ForkL:
              out << "L";
              break;
            case MemKind::ForkR:
              out << "R";
              break;
          }
          out << ";";
        }
        out << "]" << proc(r.code(), ren);
        return;
      }
      case RKind::Par:
        out << "(";
        walk(r.left(), ren);
        out << "|";
        walk(r.right(), ren);
        out << ")";
        return;
      case RKind::Res: {
        std::string canon = "#r" + std::to_string(res_counter++);
        ren[r.name()] = canon;
        out << "(" << canon << ")";
        walk(r.body(), ren);
        return;
      }
    }
  }
};

}  // namespace

std::string rkey(const RProcess& r, const Env& env) {
  KeySer ser;
  ser.walk(knf(r, env), {});
  return ser.out.str();
}

// ---------------------------------------------------------------------------
// Backtracking and exploration

RProcess backtrack_normal_form(const RProcess& r, RCtx& ctx, int max_steps) {
  RProcess cur = r;
  for (int i = 0; i < max_steps; ++i) {
    std::vector<RTransition> ts = rtransitions(cur, ctx);
    const RTransition* back = nullptr;
    for (const auto& t : ts)
      if (t.backward) { back = &t; break; }
    if (!back) return cur;
    cur = back->target;
  }
  throw ValidationError("backtracking did not terminate within the step bound");
}

Lts oracle_cts(const Process& p, const Env& env, const ObsSet& k, OracleLimits limits) {
  check_wellformed(p, env);
  validate_commit_polarity(p, env, k);

  Lts lts;
  lts.name = "cts_oracle";
  Process init = normalize(p);
  lts.initial = lts.add_state(print(init));
  std::deque<Process> work{init};
  long nodes = 0;

  while (!work.empty()) {
    Process q = work.front();
    work.pop_front();
    int src = lts.find_state(print(q));
    RCtx ctx{&env, &k};

    Trace stack;
    std::function<void(const RProcess&)> dfs = [&](const RProcess& r) {
      if (static_cast<int>(stack.size()) >= limits.trace_depth) {
        lts.truncated = true;
        return;
      }
      for (RTransition& t : rtransitions(r, ctx)) {
        if (t.backward) continue;
        if (++nodes > limits.trace_nodes) {
          lts.truncated = true;
          return;
        }
        if (t.commit) {
          stack.push_back(t);
          if (is_k_causal(stack, k)) {
            Process tgt = forget(t.target);
            std::string key = print(tgt);
            int dst = lts.find_state(key);
            if (dst < 0) {
              if (lts.state_count() >= limits.max_states) {
                lts.truncated = true;
                stack.pop_back();
                continue;
              }
              dst = lts.add_state(key);
              work.push_back(tgt);
            }
            lts.add_edge(src, Label{t.action}, dst);
          }
          stack.pop_back();
        } else {
          stack.push_back(t);
          dfs(t.target);
          stack.pop_back();
        }
      }
    };
    dfs(lift(q));
  }
  return lts;
}

Lts rccs_lts(const Process& p, const Env& env, const ObsSet& k, RccsLtsLimits limits) {
  check_wellformed(p, env);
  validate_commit_polarity(p, env, k);

  Lts lts;
  lts.name = "rccs_ts";
  RCtx ctx{&env, &k};
  RProcess r0 = lift(normalize(p));
  lts.initial = lts.add_state(rkey(r0, env));
  std::deque<RProcess> work{r0};
  while (!work.empty()) {
    RProcess r = work.front();
    work.pop_front();
    int src = lts.find_state(rkey(r, env));
    ctx.next_tid = std::max(ctx.next_tid, max_tid(r) + 1);
    for (RTransition& t : rtransitions(r, ctx)) {
      std::string key = rkey(t.target, env);
      int dst = lts.find_state(key);
      if (dst < 0) {
        if (lts.state_count() >= limits.max_states) {
          lts.truncated = true;
          continue;
        }
        dst = lts.add_state(key);
        work.push_back(t.target);
      }
      if (static_cast<long>(lts.edges().size()) >= limits.max_edges) {
        lts.truncated = true;
        break;
      }
      lts.add_edge(src, t.label(), dst);
    }
  }
  return lts;
}

}  // namespace ccsr
