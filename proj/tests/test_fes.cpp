#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "ccsr/fes.hpp"
#include "ccsr/parser.hpp"
#include "ccsr/rccs.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace ccsr;

namespace {

// Events by printed label, for structural assertions on small examples.
std::map<std::string, std::vector<EventId>> by_label(const Fes& f) {
  std::map<std::string, std::vector<EventId>> out;
  for (EventId e = 0; e < f.event_count(); ++e) out[f.label(e).str()].push_back(e);
  return out;
}

Fes unfold(const std::string& text, const std::string& obs) {
  Parsed p = parse(text);
  return partial_unfold(p.main, p.env, parse_obs(obs));
}

}  // namespace

TEST_CASE("check_commit_guarded") {
  ObsSet k = parse_obs("k");
  {
    Parsed p = parse("D(a,k) = a.k.D(a,k)\nD(a,k)");
    CHECK_NOTHROW(check_commit_guarded(p.main, p.env, k));
  }
  {
    Parsed p = parse("D(a) = a.D(a)\nD(a)");
    CHECK_THROWS_AS(check_commit_guarded(p.main, p.env, k), ValidationError);
  }
  {
    // the cycle crosses a commit in one of the two definitions
    Parsed p = parse("D(a,k) = k.E(a,k)\nE(a,k) = a.D(a,k)\nD(a,k)");
    CHECK_NOTHROW(check_commit_guarded(p.main, p.env, k));
  }
}

TEST_CASE("partial_unfold: prefix/synch structure") {
  Fes f = unfold("a.c.~a.0 | ~a.0", "k");
  auto idx = by_label(f);
  REQUIRE(idx["a"].size() == 1);
  REQUIRE(idx["c"].size() == 1);
  REQUIRE(idx["~a"].size() == 2);
  REQUIRE(idx["tau"].size() == 1);
  CHECK(f.event_count() == 5);

  EventId a = idx["a"][0], c = idx["c"][0], t = idx["tau"][0];
  // the two output events: one guarded by c (left), one initial (right)
  EventId al = -1, ar = -1;
  for (EventId e : idx["~a"]) (f.preds(e).empty() ? ar : al) = e;
  REQUIRE(al >= 0);
  REQUIRE(ar >= 0);

  CHECK(f.flow(a, c));
  CHECK(f.flow(t, c));
  CHECK(f.flow(c, al));
  CHECK(!f.flow(a, al));
  CHECK(f.preds(c).size() == 2);

  CHECK(f.conflict(a, t));
  CHECK(f.conflict(ar, t));
  CHECK(!f.conflict(a, c));
  CHECK(!f.conflict(a, ar));
  CHECK(!f.conflict(al, t));

  // the synchronization pairs complementary constituents
  CHECK(f.event(t).ncons == 2);
}

TEST_CASE("partial_unfold: choice conflicts and restriction blocking") {
  Fes f = unfold("a.0 + b.0", "k");
  auto idx = by_label(f);
  CHECK(f.event_count() == 2);
  CHECK(f.conflict(idx["a"][0], idx["b"][0]));

  Fes g = unfold("(x)(x.0 | ~x.0)", "k");
  CHECK(g.alive_count() == 1);
  std::vector<EventId> alive = g.alive_events();
  CHECK(g.label(alive[0]).silent());
  CHECK(g.preds(alive[0]).empty());
  for (EventId e : alive)
    for (EventId d : alive) CHECK(!g.conflict(e, d));

  // a restricted prefix with no partner blocks its continuation forever
  Fes h = unfold("(x)(a.x.b.0)", "k");
  auto hi = by_label(h);
  CHECK(h.alive_count() == 2);  // a and b stay; the restricted input is blocked
  int blocked_count = 0;
  for (EventId e = 0; e < h.event_count(); ++e) blocked_count += h.blocked(e);
  CHECK(blocked_count == 1);
  std::vector<EventId> just_b{hi["b"][0]};
  CHECK(!h.is_configuration(just_b));  // blocked guard still blocks
}

TEST_CASE("is_configuration on the running example") {
  Fes f = unfold("a.c.~a.0 | ~a.0", "k");
  auto idx = by_label(f);
  EventId a = idx["a"][0], c = idx["c"][0], t = idx["tau"][0];

  CHECK(f.is_configuration({t, c}));
  CHECK(f.is_configuration({a, c}));
  CHECK(!f.is_configuration({c}));
  CHECK(!f.is_configuration({a, t}));
  CHECK(f.is_configuration({}));
}

TEST_CASE("configurations reject flow cycles") {
  // two mutually-feeding synchronizations: x.~y.0 | y.~x.0
  Fes f = unfold("x.~y.0 | y.~x.0", "k");
  auto idx = by_label(f);
  REQUIRE(idx["tau"].size() == 2);
  EventId s1 = idx["tau"][0], s2 = idx["tau"][1];
  CHECK(f.flow(s1, s2));
  CHECK(f.flow(s2, s1));
  CHECK(!f.is_configuration({s1, s2}));
}

TEST_CASE("e_minimal_configs") {
  {
    Fes f = unfold("a.k.0", "k");
    auto idx = by_label(f);
    auto configs = f.e_minimal_configs(idx["k"][0]);
    REQUIRE(configs.size() == 1);
    CHECK(configs[0].size() == 2);
  }
  {
    Fes f = unfold("a.c.~a.0 | ~a.0", "k");
    auto idx = by_label(f);
    auto configs = f.e_minimal_configs(idx["c"][0]);
    REQUIRE(configs.size() == 2);  // {a,c} and {tau,c}
    for (auto& x : configs) CHECK(x.size() == 2);
  }
  {
    // a cause in conflict with the event itself and no alternative
    FesBuilder b;
    EventId d = b.add_event(Action::in("d"));
    EventId e = b.add_event(Action::in("e"));
    b.add_flow(d, e);
    b.add_conflict(d, e);
    Fes f = b.build();
    CHECK(f.e_minimal_configs(e).empty());
  }
}

TEST_CASE("e_minimal_configs matches exhaustive enumeration (property)") {
  testgen::Rng rng(424242);
  ObsSet k = testgen::corpus_obs();
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    testgen::CorpusGen gen{rng, {7, 3, false}};
    Process p = gen.toplevel();
    Fes f = partial_unfold(p, gen.env, k);
    if (f.event_count() > 15) continue;
    CAPTURE(print(p));
    for (EventId e = 0; e < f.event_count(); ++e) {
      if (f.blocked(e)) {
        CHECK(f.e_minimal_configs(e).empty());
        continue;
      }
      auto got = f.e_minimal_configs(e);
      std::sort(got.begin(), got.end());
      auto want = testoracle::exhaustive_e_minimal(f, e);
      CAPTURE(e);
      CHECK(got == want);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("residual") {
  {
    Fes f = unfold("a.0 + b.0", "k");
    auto idx = by_label(f);
    auto r = f.residual({idx["a"][0]});
    CHECK(r.fes.event_count() == 0);
  }
  {
    Fes f = unfold("a.c.~a.0 | ~a.0", "k");
    auto idx = by_label(f);
    auto r = f.residual({idx["tau"][0], idx["c"][0]});
    REQUIRE(r.fes.event_count() == 1);
    CHECK(r.fes.label(0) == Action::out("a"));
    CHECK(r.fes.preds(0).empty());
  }
  {
    Fes f = unfold("a.c.~a.0 | ~a.0", "k");
    auto r = f.residual({});
    CHECK(r.fes.event_count() == f.event_count());
    CHECK(isomorphic(r.fes, f));
  }
  {
    Fes f = unfold("a.0", "k");
    CHECK_THROWS_AS(f.residual({0, 1}), ValidationError);
  }
}

TEST_CASE("residual preserves well-formedness (property)") {
  testgen::Rng rng(777123);
  ObsSet k = testgen::corpus_obs();
  for (int i = 0; i < 60; ++i) {
    testgen::CorpusGen gen{rng, {6, 3, false}};
    Process p = gen.toplevel();
    Fes f = partial_unfold(p, gen.env, k);
    if (f.event_count() > 14) continue;
    for (auto& x : testoracle::exhaustive_configs(f)) {
      auto r = f.residual(x);
      for (EventId e = 0; e < r.fes.event_count(); ++e) {
        CHECK(!r.fes.flow(e, e));
        CHECK(!r.fes.conflict(e, e));
        for (EventId d = 0; d < r.fes.event_count(); ++d)
          CHECK(r.fes.conflict(e, d) == r.fes.conflict(d, e));
      }
    }
  }
}

TEST_CASE("conflict tree answers interval queries") {
  Fes f = unfold("a.(b.0 | c.0 + d.0) + e.0", "k");
  auto idx = by_label(f);
  EventId b = idx["b"][0], c = idx["c"][0], d = idx["d"][0], e = idx["e"][0],
          a = idx["a"][0];
  CHECK(f.conflict(b, e));  // across the outer choice
  CHECK(f.conflict(c, d));  // inner choice
  CHECK(!f.conflict(b, c));  // parallel branches
  CHECK(f.conflict(a, e));
  CHECK(!f.conflict(a, b));
}

TEST_CASE("conflict agrees with the naive recomputation (property)") {
  testgen::Rng rng(90125);
  ObsSet k = testgen::corpus_obs();
  int structures = 0;
  for (int i = 0; i < 100; ++i) {
    testgen::CorpusGen gen{rng, {8, 3, false}};
    Process p = gen.toplevel();
    Fes f = partial_unfold(p, gen.env, k);
    testoracle::NaiveConflict naive(f);
    CAPTURE(print(p));
    for (EventId x = 0; x < f.event_count(); ++x)
      for (EventId y = 0; y < f.event_count(); ++y) CHECK(f.conflict(x, y) == naive(f, x, y));
    ++structures;
  }
  CHECK(structures == 100);
}

TEST_CASE("signature: invariance and discrimination") {
  // the same structure entered in two different event orders
  FesBuilder b1, b2;
  {
    EventId x = b1.add_event(Action::in("a"));
    EventId y = b1.add_event(Action::in("b"));
    EventId z = b1.add_event(Action::in("c"));
    b1.add_flow(x, y);
    b1.add_conflict(y, z);
  }
  {
    EventId z = b2.add_event(Action::in("c"));
    EventId y = b2.add_event(Action::in("b"));
    EventId x = b2.add_event(Action::in("a"));
    b2.add_flow(x, y);
    b2.add_conflict(y, z);
  }
  Fes f1 = b1.build(), f2 = b2.build();
  CHECK(f1.signature() == f2.signature());
  CHECK(isomorphic(f1, f2));

  CHECK(unfold("a.0", "k").signature() != unfold("b.0", "k").signature());
  CHECK(unfold("a.0 + b.0", "k").signature() != unfold("a.0 | b.0", "k").signature());
}

TEST_CASE("isomorphic: reflexive, signature collisions, flow counts") {
  Fes f = unfold("a.c.~a.0 | ~a.0", "k");
  CHECK(isomorphic(f, f));

  // equal signatures, different global shape: two flow triangles vs one
  // six-cycle; every event looks locally identical
  FesBuilder tri, hex;
  for (int i = 0; i < 6; ++i) {
    tri.add_event(Action::in("a"));
    hex.add_event(Action::in("a"));
  }
  tri.add_flow(0, 1);
  tri.add_flow(1, 2);
  tri.add_flow(2, 0);
  tri.add_flow(3, 4);
  tri.add_flow(4, 5);
  tri.add_flow(5, 3);
  for (int i = 0; i < 6; ++i) hex.add_flow(i, (i + 1) % 6);
  Fes a = tri.build(), b = hex.build();
  CHECK(a.signature() == b.signature());
  CHECK(!isomorphic(a, b));

  CHECK(!isomorphic(unfold("a.0 | a.0", "k"), unfold("a.a.0", "k")));
}

TEST_CASE("signature difference implies non-isomorphism (property)") {
  testgen::Rng rng(5551234);
  ObsSet k = testgen::corpus_obs();
  std::vector<Fes> pool;
  for (int i = 0; i < 25; ++i) {
    testgen::CorpusGen gen{rng, {6, 2, false}};
    pool.push_back(partial_unfold(gen.toplevel(), gen.env, k));
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      if (pool[i].signature() != pool[j].signature()) CHECK(!isomorphic(pool[i], pool[j]));
      if (isomorphic(pool[i], pool[j])) CHECK(pool[i].signature() == pool[j].signature());
    }
  }
}

TEST_CASE("stubs: attachment and unsupported shapes") {
  ObsSet k = parse_obs("k");
  {
    Parsed p = parse("D(a,k,x) = a.k.(x.0 | D(a,k,x))\nD(a,k,x)");
    Fes f = partial_unfold(p.main, p.env, k);
    REQUIRE(f.stubs().size() == 1);
    CHECK(f.stubs()[0].def == "D");
    CHECK(f.label(f.stubs()[0].trigger) == Action::in("k"));
  }
  {
    // recursive call under a choice below its commit guard
    Parsed p = parse("D(a,k) = k.(D(a,k) + a.0)\nD(a,k)");
    CHECK_THROWS_AS(partial_unfold(p.main, p.env, k), ValidationError);
  }
  {
    // non-recursive definitions are always inlined
    Parsed p = parse("C(x) = ~x.0\nk.C(a) | a.0");
    Fes f = partial_unfold(p.main, p.env, k);
    CHECK(f.stubs().empty());
    auto idx = by_label(f);
    CHECK(idx["~a"].size() == 1);
  }
}

namespace {

// Canonical name of an event along a trace: its label together with the
// memories it consumed, with thread identifiers replaced recursively by
// the names of the events that pushed them. Traces related by swapping
// independent steps agree on their name sets, so a set of names denotes
// one trace-equivalence class.
std::string canonical_event(const RTransition& t,
                            const std::map<int, std::string>& named) {
  std::vector<std::string> mems;
  for (const Memory& m : mu(t)) {
    std::string s;
    for (const MemNode* n = m.top(); n; n = n->below.get()) {
      switch (n->kind) {
        case MemKind::Open:
          s += "o(" + named.at(n->tid) + "," + n->action.str() + "," +
               print(normalize(n->alt)) + ")";
          break;
        case MemKind::Closed:
          s += "c(" + named.at(n->tid) + ")";
          break;
        case MemKind::ForkL:
          s += "L";
          break;
        case MemKind::ForkR:
          s += "R";
          break;
      }
    }
    mems.push_back(s);
  }
  std::sort(mems.begin(), mems.end());
  std::string out = t.action.str() + "{";
  for (const auto& m : mems) out += m + ";";
  return out + "}";
}

void enumerate_trace_classes(const RProcess& r, RCtx& ctx,
                             std::map<int, std::string>& named,
                             std::set<std::string>& current,
                             std::set<std::set<std::string>>& classes) {
  classes.insert(current);
  for (auto& t : rtransitions(r, ctx)) {
    if (t.backward) continue;
    std::string name = canonical_event(t, named);
    named[t.tid] = name;
    current.insert(name);
    enumerate_trace_classes(t.target, ctx, named, current, classes);
    current.erase(name);
    named.erase(t.tid);
  }
}

}  // namespace

TEST_CASE("representation: configurations mirror trace classes") {
  // For recursion-free terms, the configurations of the unfolding,
  // ordered by containment, agree with the forward traces of the
  // reversible machine up to swapping of independent steps, ordered by
  // prefixing.
  testgen::Rng rng(24601);
  ObsSet k = testgen::corpus_obs();
  int tested = 0;
  for (int i = 0; i < 200 && tested < 25; ++i) {
    testgen::CorpusGen gen{rng, {6, 3, false}};
    Process p = gen.toplevel();
    Fes f = partial_unfold(p, gen.env, k);
    if (f.event_count() > 12) continue;
    auto configs = testoracle::exhaustive_configs(f);
    if (configs.size() > 48) continue;
    CAPTURE(print(p));

    RCtx ctx{&gen.env, &k};
    std::map<int, std::string> named;
    std::set<std::string> current;
    std::set<std::set<std::string>> classes;
    enumerate_trace_classes(lift(p), ctx, named, current, classes);
    REQUIRE(classes.size() == configs.size());

    // containment orders on both sides
    std::size_t n = configs.size();
    std::vector<std::set<std::string>> cl(classes.begin(), classes.end());
    std::vector<std::vector<char>> contain(n, std::vector<char>(n, 0));
    std::vector<std::vector<char>> prefix(n, std::vector<char>(n, 0));
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        contain[x][y] = x != y && std::includes(configs[y].begin(), configs[y].end(),
                                                configs[x].begin(), configs[x].end());
        prefix[x][y] =
            x != y && std::includes(cl[y].begin(), cl[y].end(), cl[x].begin(), cl[x].end());
      }
    }
    CHECK(testoracle::poset_isomorphic(contain, prefix));
    ++tested;
  }
  CHECK(tested >= 20);
}

TEST_CASE("dot export smoke test") {
  Fes f = unfold("a.c.~a.0 | ~a.0", "k");
  std::string dot = f.to_dot();
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("style=dashed") != std::string::npos);
}
