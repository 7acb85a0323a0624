#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ccsr/action.hpp"

namespace ccsr {

enum class ProcKind { Nil, Prefix, Call, Restrict, Sum, Par };

struct ProcNode;

// Immutable CCS term. Copies share structure; all operations are pure.
class Process {
 public:
  Process();  // the empty process 0

  static Process nil();
  static Process prefix(Action a, Process body);
  static Process par(Process l, Process r);
  static Process sum(Process l, Process r);
  static Process res(std::string channel, Process body);
  static Process call(std::string def, std::vector<std::string> actuals);

  ProcKind kind() const;
  const Action& action() const;               // Prefix
  Process body() const;                       // Prefix, Restrict
  Process left() const;                       // Par, Sum
  Process right() const;                      // Par, Sum
  const std::string& name() const;            // Restrict channel, Call definition
  const std::vector<std::string>& actuals() const;  // Call

  bool is_nil() const { return kind() == ProcKind::Nil; }

  const ProcNode* raw() const { return node_.get(); }

 private:
  explicit Process(std::shared_ptr<const ProcNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ProcNode> node_;
};

struct Def {
  std::vector<std::string> formals;
  Process body;
};

// Definition environment; names unique, mutual recursion allowed.
using Env = std::map<std::string, Def>;

// Total order on terms, invariant under alpha renaming of binders.
// Free names compare by spelling, bound names by binder position.
int compare(const Process& a, const Process& b);
inline bool equal(const Process& a, const Process& b) { return compare(a, b) == 0; }

// Concrete syntax; parses back to the same AST.
std::string print(const Process& p);
std::string print(const Env& env);  // one definition per line

std::set<std::string> free_names(const Process& p);

// Capture-avoiding simultaneous renaming of free names.
Process subst(const Process& p, const std::map<std::string, std::string>& renaming);

// Canonical representative of the structural-congruence class, without
// unfolding recursion: flattens and sorts Par/Sum, drops 0 units and
// duplicate choice branches, erases dead restrictions, renames restricted
// channels canonically. Idempotent. Names in `avoid` are never chosen as
// canonical binder names.
Process normalize(const Process& p, const std::set<std::string>& avoid = {});

// Checks that every call resolves, arities match, and definition bodies
// have no free names outside their formals. Throws ValidationError.
void check_wellformed(const Process& p, const Env& env);

}  // namespace ccsr
