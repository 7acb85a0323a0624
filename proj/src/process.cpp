#include "ccsr/process.hpp"

#include <algorithm>
#include <cassert>
#include <optional>

#include "ccsr/errors.hpp"

namespace ccsr {

struct ProcNode {
  ProcKind kind = ProcKind::Nil;
  Action action;                     // Prefix
  std::string name;                  // Restrict / Call
  std::vector<std::string> actuals;  // Call
  std::shared_ptr<const ProcNode> sub0;  // Prefix/Restrict body, Par/Sum left
  std::shared_ptr<const ProcNode> sub1;  // Par/Sum right
};

namespace {
const std::shared_ptr<const ProcNode>& nil_node() {
  static const std::shared_ptr<const ProcNode> n = std::make_shared<ProcNode>();
  return n;
}
}  // namespace

Process::Process() : node_(nil_node()) {}
Process Process::nil() { return Process(); }

Process Process::prefix(Action a, Process body) {
  auto n = std::make_shared<ProcNode>();
  n->kind = ProcKind::Prefix;
  n->action = std::move(a);
  n->sub0 = body.node_;
  return Process(std::move(n));
}

Process Process::par(Process l, Process r) {
  auto n = std::make_shared<ProcNode>();
  n->kind = ProcKind::Par;
  n->sub0 = l.node_;
  n->sub1 = r.node_;
  return Process(std::move(n));
}

Process Process::sum(Process l, Process r) {
  auto n = std::make_shared<ProcNode>();
  n->kind = ProcKind::Sum;
  n->sub0 = l.node_;
  n->sub1 = r.node_;
  return Process(std::move(n));
}

Process Process::res(std::string channel, Process body) {
  auto n = std::make_shared<ProcNode>();
  n->kind = ProcKind::Restrict;
  n->name = std::move(channel);
  n->sub0 = body.node_;
  return Process(std::move(n));
}

Process Process::call(std::string def, std::vector<std::string> actuals) {
  auto n = std::make_shared<ProcNode>();
  n->kind = ProcKind::Call;
  n->name = std::move(def);
  n->actuals = std::move(actuals);
  return Process(std::move(n));
}

ProcKind Process::kind() const { return node_->kind; }
const Action& Process::action() const { return node_->action; }
Process Process::body() const { return Process(node_->sub0); }
Process Process::left() const { return Process(node_->sub0); }
Process Process::right() const { return Process(node_->sub1); }
const std::string& Process::name() const { return node_->name; }
const std::vector<std::string>& Process::actuals() const { return node_->actuals; }

// ---------------------------------------------------------------------------
// Alpha-invariant comparison

namespace {

using BinderEnv = std::map<std::string, int>;  // bound name -> binder level

// Compare channel references: bound-before-free, bound by level, free by name.
int cmp_name(const std::string& a, const BinderEnv& ea, const std::string& b,
             const BinderEnv& eb) {
  auto ia = ea.find(a);
  auto ib = eb.find(b);
  bool ba = ia != ea.end(), bb = ib != eb.end();
  if (ba != bb) return ba ? -1 : 1;
  if (ba) return ia->second < ib->second ? -1 : ia->second > ib->second ? 1 : 0;
  return a.compare(b);
}

int cmp_action(const Action& a, const BinderEnv& ea, const Action& b, const BinderEnv& eb) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.silent()) return 0;
  return cmp_name(a.channel, ea, b.channel, eb);
}

int kind_rank(ProcKind k) {
  switch (k) {
    case ProcKind::Nil: return 0;
    case ProcKind::Prefix: return 1;
    case ProcKind::Call: return 2;
    case ProcKind::Restrict: return 3;
    case ProcKind::Sum: return 4;
    case ProcKind::Par: return 5;
  }
  return 6;
}

int cmp_rec(const Process& a, BinderEnv& ea, int da, const Process& b, BinderEnv& eb, int db) {
  if (a.raw() == b.raw() && da == 0 && db == 0 && ea.empty() && eb.empty()) return 0;
  int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind()) {
    case ProcKind::Nil:
      return 0;
    case ProcKind::Prefix: {
      int c = cmp_action(a.action(), ea, b.action(), eb);
      if (c) return c;
      return cmp_rec(a.body(), ea, da, b.body(), eb, db);
    }
    case ProcKind::Call: {
      int c = a.name().compare(b.name());
      if (c) return c;
      if (a.actuals().size() != b.actuals().size())
        return a.actuals().size() < b.actuals().size() ? -1 : 1;
      for (std::size_t i = 0; i < a.actuals().size(); ++i)
        if ((c = cmp_name(a.actuals()[i], ea, b.actuals()[i], eb))) return c;
      return 0;
    }
    case ProcKind::Restrict: {
      auto olda = ea.find(a.name()) != ea.end() ? std::optional<int>(ea[a.name()]) : std::nullopt;
      auto oldb = eb.find(b.name()) != eb.end() ? std::optional<int>(eb[b.name()]) : std::nullopt;
      ea[a.name()] = da;
      eb[b.name()] = db;
      int c = cmp_rec(a.body(), ea, da + 1, b.body(), eb, db + 1);
      if (olda) ea[a.name()] = *olda; else ea.erase(a.name());
      if (oldb) eb[b.name()] = *oldb; else eb.erase(b.name());
      return c;
    }
    case ProcKind::Sum:
    case ProcKind::Par: {
      int c = cmp_rec(a.left(), ea, da, b.left(), eb, db);
      if (c) return c;
      return cmp_rec(a.right(), ea, da, b.right(), eb, db);
    }
  }
  return 0;
}

}  // namespace

int compare(const Process& a, const Process& b) {
  BinderEnv ea, eb;
  return cmp_rec(a, ea, 0, b, eb, 0);
}

// ---------------------------------------------------------------------------
// Printing; minimal parentheses for the grammar where + binds tighter than |
// and prefix/restriction bind tightest.

namespace {

void print_rec(const Process& p, std::string& out, int level);
// level 0 = par context, 1 = sum context, 2 = factor context

void print_factor(const Process& p, std::string& out) {
  if (p.kind() == ProcKind::Par || p.kind() == ProcKind::Sum) {
    out += "(";
    print_rec(p, out, 0);
    out += ")";
  } else {
    print_rec(p, out, 2);
  }
}

void print_rec(const Process& p, std::string& out, int level) {
  switch (p.kind()) {
    case ProcKind::Nil:
      out += "0";
      return;
    case ProcKind::Prefix:
      out += p.action().str();
      out += ".";
      print_factor(p.body(), out);
      return;
    case ProcKind::Call: {
      out += p.name();
      out += "(";
      for (std::size_t i = 0; i < p.actuals().size(); ++i) {
        if (i) out += ",";
        out += p.actuals()[i];
      }
      out += ")";
      return;
    }
    case ProcKind::Restrict:
      out += "(" + p.name() + ") ";
      print_factor(p.body(), out);
      return;
    case ProcKind::Sum:
      if (level > 1) {
        out += "(";
        print_rec(p, out, 1);
        out += ")";
        return;
      }
      print_rec(p.left(), out, 2);
      out += " + ";
      print_rec(p.right(), out, 1);
      return;
    case ProcKind::Par:
      if (level > 0) {
        out += "(";
        print_rec(p, out, 0);
        out += ")";
        return;
      }
      print_rec(p.left(), out, 1);
      out += " | ";
      print_rec(p.right(), out, 0);
      return;
  }
}

}  // namespace

std::string print(const Process& p) {
  std::string out;
  print_rec(p, out, 0);
  return out;
}

std::string print(const Env& env) {
  std::string out;
  for (const auto& [name, def] : env) {
    out += name + "(";
    for (std::size_t i = 0; i < def.formals.size(); ++i) {
      if (i) out += ",";
      out += def.formals[i];
    }
    out += ") = " + print(def.body) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free names and substitution

namespace {

void free_rec(const Process& p, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (p.kind()) {
    case ProcKind::Nil:
      return;
    case ProcKind::Prefix:
      if (!p.action().silent() && !bound.count(p.action().channel))
        out.insert(p.action().channel);
      free_rec(p.body(), bound, out);
      return;
    case ProcKind::Call:
      for (const auto& a : p.actuals())
        if (!bound.count(a)) out.insert(a);
      return;
    case ProcKind::Restrict: {
      bool fresh = bound.insert(p.name()).second;
      free_rec(p.body(), bound, out);
      if (fresh) bound.erase(p.name());
      return;
    }
    case ProcKind::Sum:
    case ProcKind::Par:
      free_rec(p.left(), bound, out);
      free_rec(p.right(), bound, out);
      return;
  }
}

std::string rename_via(const std::string& n, const std::map<std::string, std::string>& m) {
  auto it = m.find(n);
  return it == m.end() ? n : it->second;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  for (int i = 1;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (!taken.count(cand)) return cand;
  }
}

Process subst_rec(const Process& p, std::map<std::string, std::string> m) {
  // Drop identity entries to keep termination obvious.
  for (auto it = m.begin(); it != m.end();)
    it = it->first == it->second ? m.erase(it) : std::next(it);
  if (m.empty()) return p;
  switch (p.kind()) {
    case ProcKind::Nil:
      return p;
    case ProcKind::Prefix: {
      Action a = p.action();
      if (!a.silent()) a.channel = rename_via(a.channel, m);
      return Process::prefix(std::move(a), subst_rec(p.body(), m));
    }
    case ProcKind::Call: {
      std::vector<std::string> as = p.actuals();
      for (auto& a : as) a = rename_via(a, m);
      return Process::call(p.name(), std::move(as));
    }
    case ProcKind::Restrict: {
      std::string x = p.name();
      m.erase(x);  // binder shadows
      bool capture = false;
      for (const auto& [from, to] : m)
        if (to == x) { capture = true; break; }
      Process body = p.body();
      if (capture) {
        std::set<std::string> taken = free_names(body);
        for (const auto& [from, to] : m) {
          taken.insert(from);
          taken.insert(to);
        }
        std::string x2 = fresh_name(x, taken);
        body = subst_rec(body, {{x, x2}});
        x = x2;
      }
      return Process::res(std::move(x), subst_rec(body, m));
    }
    case ProcKind::Sum:
      return Process::sum(subst_rec(p.left(), m), subst_rec(p.right(), m));
    case ProcKind::Par:
      return Process::par(subst_rec(p.left(), m), subst_rec(p.right(), m));
  }
  return p;
}

}  // namespace

std::set<std::string> free_names(const Process& p) {
  std::set<std::string> bound, out;
  free_rec(p, bound, out);
  return out;
}

Process subst(const Process& p, const std::map<std::string, std::string>& renaming) {
  return subst_rec(p, renaming);
}

// ---------------------------------------------------------------------------
// Normalization

namespace {

void flatten(const Process& p, ProcKind op, std::vector<Process>& out) {
  if (p.kind() == op) {
    flatten(p.left(), op, out);
    flatten(p.right(), op, out);
  } else {
    out.push_back(p);
  }
}

Process rebuild(std::vector<Process>&& kids, ProcKind op) {
  if (kids.empty()) return Process::nil();
  Process acc = kids.back();
  for (auto it = kids.rbegin() + 1; it != kids.rend(); ++it)
    acc = op == ProcKind::Sum ? Process::sum(*it, acc) : Process::par(*it, acc);
  return acc;
}

// Shape pass: associativity/commutativity/units, choice idempotence,
// dead-binder collection. Leaves binder names untouched. Siblings are
// ordered with the enclosing binders in scope, so the order survives the
// later canonical renaming of those binders.
Process shape(const Process& p, BinderEnv& env, int depth) {
  switch (p.kind()) {
    case ProcKind::Nil:
    case ProcKind::Call:
      return p;
    case ProcKind::Prefix:
      return Process::prefix(p.action(), shape(p.body(), env, depth));
    case ProcKind::Restrict: {
      auto old = env.find(p.name()) != env.end() ? std::optional<int>(env[p.name()])
                                                 : std::nullopt;
      env[p.name()] = depth;
      Process body = shape(p.body(), env, depth + 1);
      if (old) env[p.name()] = *old; else env.erase(p.name());
      if (!free_names(body).count(p.name())) return body;
      return Process::res(p.name(), body);
    }
    case ProcKind::Sum:
    case ProcKind::Par: {
      std::vector<Process> kids;
      flatten(p, p.kind(), kids);
      std::vector<Process> shaped;
      shaped.reserve(kids.size());
      for (const auto& k : kids) {
        Process s = shape(k, env, depth);
        if (s.is_nil()) continue;
        // shaping may collapse a child into this very operator; splice
        if (s.kind() == p.kind()) {
          flatten(s, p.kind(), shaped);
        } else {
          shaped.push_back(s);
        }
      }
      auto cmp_here = [&env, depth](const Process& a, const Process& b) {
        BinderEnv ea = env, eb = env;
        return cmp_rec(a, ea, depth, b, eb, depth);
      };
      std::stable_sort(shaped.begin(), shaped.end(),
                       [&](const Process& a, const Process& b) { return cmp_here(a, b) < 0; });
      if (p.kind() == ProcKind::Sum)
        shaped.erase(std::unique(shaped.begin(), shaped.end(),
                                 [&](const Process& a, const Process& b) {
                                   return cmp_here(a, b) == 0;
                                 }),
                     shaped.end());
      if (shaped.size() == 1) return shaped.front();
      return rebuild(std::move(shaped), p.kind());
    }
  }
  return p;
}

struct AlphaCtx {
  const std::set<std::string>* skip;
  int counter = 0;

  std::string next() {
    for (;;) {
      std::string cand = "_" + std::to_string(counter++);
      if (!skip->count(cand)) return cand;
    }
  }
};

Process alpha(const Process& p, std::map<std::string, std::string>& env, AlphaCtx& ctx) {
  switch (p.kind()) {
    case ProcKind::Nil:
      return p;
    case ProcKind::Prefix: {
      Action a = p.action();
      if (!a.silent()) a.channel = rename_via(a.channel, env);
      return Process::prefix(std::move(a), alpha(p.body(), env, ctx));
    }
    case ProcKind::Call: {
      std::vector<std::string> as = p.actuals();
      for (auto& n : as) n = rename_via(n, env);
      return Process::call(p.name(), std::move(as));
    }
    case ProcKind::Restrict: {
      std::string fresh = ctx.next();
      auto old = env.find(p.name()) != env.end() ? std::optional<std::string>(env[p.name()])
                                                 : std::nullopt;
      env[p.name()] = fresh;
      Process body = alpha(p.body(), env, ctx);
      if (old) env[p.name()] = *old; else env.erase(p.name());
      return Process::res(std::move(fresh), std::move(body));
    }
    case ProcKind::Sum:
      return Process::sum(alpha(p.left(), env, ctx), alpha(p.right(), env, ctx));
    case ProcKind::Par:
      return Process::par(alpha(p.left(), env, ctx), alpha(p.right(), env, ctx));
  }
  return p;
}

}  // namespace

Process normalize(const Process& p, const std::set<std::string>& avoid) {
  BinderEnv benv;
  Process s = shape(p, benv, 0);
  std::set<std::string> skip = free_names(s);
  skip.insert(avoid.begin(), avoid.end());
  AlphaCtx ctx{&skip};
  std::map<std::string, std::string> env;
  return alpha(s, env, ctx);
}

// ---------------------------------------------------------------------------
// Well-formedness

namespace {

void check_calls(const Process& p, const Env& env, const std::string& where) {
  switch (p.kind()) {
    case ProcKind::Nil:
      return;
    case ProcKind::Prefix:
      check_calls(p.body(), env, where);
      return;
    case ProcKind::Call: {
      auto it = env.find(p.name());
      if (it == env.end())
        throw ValidationError("unbound definition '" + p.name() + "' in " + where);
      if (it->second.formals.size() != p.actuals().size())
        throw ValidationError("arity mismatch calling '" + p.name() + "' in " + where +
                              ": expected " + std::to_string(it->second.formals.size()) +
                              " argument(s), got " + std::to_string(p.actuals().size()));
      return;
    }
    case ProcKind::Restrict:
      check_calls(p.body(), env, where);
      return;
    case ProcKind::Sum:
    case ProcKind::Par:
      check_calls(p.left(), env, where);
      check_calls(p.right(), env, where);
      return;
  }
}

}  // namespace

void check_wellformed(const Process& p, const Env& env) {
  for (const auto& [name, def] : env) {
    check_calls(def.body, env, "definition '" + name + "'");
    std::set<std::string> formals(def.formals.begin(), def.formals.end());
    if (formals.size() != def.formals.size())
      throw ValidationError("duplicate formal in definition '" + name + "'");
    for (const auto& fn : free_names(def.body))
      if (!formals.count(fn))
        throw ValidationError("free name '" + fn + "' of definition '" + name +
                              "' is not a formal parameter");
  }
  check_calls(p, env, "main process");
}

}  // namespace ccsr
