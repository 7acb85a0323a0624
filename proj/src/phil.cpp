#include "ccsr/phil.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "ccsr/bisim.hpp"
#include "ccsr/cts.hpp"
#include "ccsr/errors.hpp"
#include "ccsr/semantics.hpp"

namespace ccsr {

namespace {

std::string tch(int i) { return "t" + std::to_string(i); }
std::string eat(int i) { return "eat" + std::to_string(i); }
std::string rel(int i) { return "rel" + std::to_string(i); }

Process chop_call(const std::string& t) { return Process::call("Chop", {t}); }

Process phil_call(int i, int n) {
  int j = i % n + 1;
  return Process::call("Phil", {tch(i), tch(j), eat(i), rel(i)});
}

Process restrict_all(Process p, int n) {
  for (int i = n; i >= 1; --i) p = Process::res(tch(i), std::move(p));
  return p;
}

ObsSet commits(int n) {
  ObsSet k;
  for (int i = 1; i <= n; ++i) {
    k.insert(Action::in(eat(i)));
    k.insert(Action::in(rel(i)));
  }
  return k;
}

}  // namespace

PhilSystem phil_partial(int n) {
  if (n < 2) throw ValidationError("at least two philosophers are required");
  PhilSystem sys;
  // Phil(ta,tb,e,r) = ta.tb.e.r.(Chop(ta) | Chop(tb) | Phil(ta,tb,e,r))
  Process body = Process::prefix(
      Action::in("ta"),
      Process::prefix(
          Action::in("tb"),
          Process::prefix(
              Action::in("e"),
              Process::prefix(Action::in("r"),
                              Process::par(chop_call("ta"),
                                           Process::par(chop_call("tb"),
                                                        Process::call("Phil", {"ta", "tb",
                                                                               "e", "r"})))))));
  sys.env["Phil"] = Def{{"ta", "tb", "e", "r"}, body};
  sys.env["Chop"] = Def{{"t"}, Process::prefix(Action::out("t"), Process::nil())};

  Process table = phil_call(1, n);
  for (int i = 2; i <= n; ++i) table = Process::par(table, phil_call(i, n));
  for (int i = 1; i <= n; ++i) table = Process::par(table, chop_call(tch(i)));
  sys.main = restrict_all(table, n);
  sys.obs = commits(n);
  return sys;
}

PhilSystem phil_full(int n) {
  if (n < 2) throw ValidationError("at least two philosophers are required");
  PhilSystem sys;
  // After each acquisition a silent branch may put everything back:
  // Phil(ta,tb,e,r) = ta.( tau.(Chop(ta) | Phil)
  //                      + tb.( tau.(Chop(ta) | Chop(tb) | Phil)
  //                           + e.r.(Chop(ta) | Chop(tb) | Phil) ) )
  Process self = Process::call("Phil", {"ta", "tb", "e", "r"});
  Process both_back = Process::par(chop_call("ta"), Process::par(chop_call("tb"), self));
  Process eat_branch =
      Process::prefix(Action::in("e"), Process::prefix(Action::in("r"), both_back));
  Process second = Process::prefix(
      Action::in("tb"),
      Process::sum(Process::prefix(Action::tau(), both_back), eat_branch));
  Process one_back = Process::par(chop_call("ta"), self);
  Process body = Process::prefix(
      Action::in("ta"),
      Process::sum(Process::prefix(Action::tau(), one_back), second));
  sys.env["Phil"] = Def{{"ta", "tb", "e", "r"}, body};
  sys.env["Chop"] = Def{{"t"}, Process::prefix(Action::out("t"), Process::nil())};

  Process table = phil_call(1, n);
  for (int i = 2; i <= n; ++i) table = Process::par(table, phil_call(i, n));
  for (int i = 1; i <= n; ++i) table = Process::par(table, chop_call(tch(i)));
  sys.main = restrict_all(table, n);
  sys.obs = commits(n);
  return sys;
}

Lts phil_spec(int n) {
  if (n < 2) throw ValidationError("at least two philosophers are required");
  Lts l;
  l.name = "phil_spec";

  auto name_of = [](const std::vector<int>& eating) {
    std::string s = "{";
    for (int i : eating) s += std::to_string(i) + ",";
    s += "}";
    return s;
  };
  auto independent = [n](const std::vector<int>& eating, int i) {
    for (int j : eating) {
      if (j == i) return false;
      int d = (j - i + n) % n;
      if (d == 1 || d == n - 1) return false;
    }
    return true;
  };

  std::vector<std::vector<int>> work;
  l.initial = l.add_state(name_of({}));
  work.push_back({});
  for (std::size_t at = 0; at < work.size(); ++at) {
    std::vector<int> cur = work[at];
    int src = l.find_state(name_of(cur));
    for (int i = 1; i <= n; ++i) {
      if (independent(cur, i)) {
        std::vector<int> next = cur;
        next.insert(std::lower_bound(next.begin(), next.end(), i), i);
        int dst = l.find_state(name_of(next));
        if (dst < 0) {
          dst = l.add_state(name_of(next));
          work.push_back(next);
        }
        l.add_edge(src, Label{Action::in(eat(i))}, dst);
      }
      auto it = std::find(cur.begin(), cur.end(), i);
      if (it != cur.end()) {
        std::vector<int> next = cur;
        next.erase(std::find(next.begin(), next.end(), i));
        int dst = l.find_state(name_of(next));
        if (dst < 0) {
          dst = l.add_state(name_of(next));
          work.push_back(next);
        }
        l.add_edge(src, Label{Action::in(rel(i))}, dst);
      }
    }
  }
  return l;
}

bool has_deadlock(const Lts& l) {
  std::vector<char> has_out(l.state_count(), 0);
  for (const auto& e : l.edges()) has_out[e.src] = 1;
  for (int s = 0; s < l.state_count(); ++s)
    if (!has_out[s] && l.payload(s) != "0") return true;
  return false;
}

std::vector<BenchRecord> run_bench(int n_max, bool full_mode) {
  std::vector<BenchRecord> out;
  for (int n = 2; n <= n_max; ++n) {
    BenchRecord rec;
    rec.n = n;
    PhilSystem sys = full_mode ? phil_full(n) : phil_partial(n);
    auto t0 = std::chrono::steady_clock::now();
    Lts lts = full_mode ? build_lts(sys.main, sys.env)
                        : compute_cts(sys.main, sys.env, sys.obs);
    auto t1 = std::chrono::steady_clock::now();
    rec.wall_time = std::chrono::duration<double>(t1 - t0).count();
    rec.cts_states = lts.state_count();
    rec.cts_edges = static_cast<int>(lts.edges().size());
    if (lts.truncated) {
      rec.verdict = "truncated";
    } else {
      rec.verdict =
          weak_bisim(lts, phil_spec(n), sys.obs).equivalent ? "equivalent" : "not";
    }
    out.push_back(rec);
  }
  return out;
}

std::string bench_table(const std::vector<BenchRecord>& records) {
  std::ostringstream os;
  os << "  n    states     edges   time[s]  verdict\n";
  for (const auto& r : records) {
    os.width(3);
    os << r.n;
    os.width(10);
    os << r.cts_states;
    os.width(10);
    os << r.cts_edges;
    os << "  ";
    os.setf(std::ios::fixed);
    os.precision(4);
    os.width(8);
    os << r.wall_time << "  " << r.verdict << "\n";
  }
  return os.str();
}

}  // namespace ccsr
