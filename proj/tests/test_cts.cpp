#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ccsr/bisim.hpp"
#include "ccsr/cts.hpp"
#include "ccsr/parser.hpp"
#include "ccsr/rccs.hpp"
#include "generators.hpp"

using namespace ccsr;

TEST_CASE("compute_cts: one commit") {
  Env empty;
  ObsSet k = parse_obs("k");
  Lts l = compute_cts(parse_process("k.0"), empty, k);
  CHECK(!l.truncated);
  CHECK(l.state_count() == 2);
  REQUIRE(l.edges().size() == 1);
  CHECK(l.edges()[0].label == Label{Action::in("k")});
}

TEST_CASE("compute_cts: mutex example is weakly bisimilar to the choice") {
  Parsed p = parse("(x)(x.0 | x.0 | ~x.~x.a.0 | ~x.~x.b.0)");
  ObsSet k = parse_obs("a,b");
  Lts cts = compute_cts(p.main, p.env, k);
  CHECK(!cts.truncated);
  Env empty;
  Lts spec = build_lts(parse_process("a.0 + b.0"), empty);
  CHECK(weak_bisim(cts, spec, k).equivalent);
  for (auto& e : cts.edges()) CHECK(k.contains(e.label.action));
}

TEST_CASE("compute_cts: commit chains split into separate edges") {
  Env empty;
  ObsSet k = parse_obs("k,k'");
  Lts l = compute_cts(parse_process("k.k'.0"), empty, k);
  // no single edge may cover both commits
  CHECK(l.state_count() == 3);
  CHECK(l.edges().size() == 2);
  for (auto& e : l.edges()) {
    if (e.src == l.initial) CHECK(e.label == Label{Action::in("k")});
  }
}

TEST_CASE("compute_cts: branch without a commit contributes nothing") {
  Env empty;
  ObsSet k = parse_obs("k");
  Lts l = compute_cts(parse_process("a.k.0 + b.0"), empty, k);
  CHECK(l.edges().size() == 1);
  CHECK(l.edges()[0].src == l.initial);
  CHECK(l.edges()[0].label == Label{Action::in("k")});
}

TEST_CASE("compute_cts: recursion through stubs") {
  Parsed p = parse("D(k) = k.D(k)\nD(k)");
  ObsSet k = parse_obs("k");
  Lts l = compute_cts(p.main, p.env, k);
  CHECK(!l.truncated);
  // one state looping on k
  CHECK(l.state_count() == 1);
  REQUIRE(l.edges().size() == 1);
  CHECK(l.edges()[0].src == l.edges()[0].dst);
}

TEST_CASE("compute_cts: respawning token keeps the loop alive") {
  // take a token, commit, respawn the token alongside the recursive call
  Parsed p = parse("D(t,k) = t.k.(~t.0 | D(t,k))\n(t)(~t.0 | D(t,k))");
  ObsSet k = parse_obs("k");
  Lts l = compute_cts(p.main, p.env, k);
  CHECK(!l.truncated);
  CHECK(l.state_count() == 1);
  REQUIRE(l.edges().size() == 1);
  CHECK(l.edges()[0].src == l.edges()[0].dst);
}

TEST_CASE("compute_cts: deterministic and monotone under budgets") {
  Parsed p = parse("D(a,k) = k.(a.k.0 | D(a,k))\nD(a,k)");
  ObsSet k = parse_obs("k");
  Lts big = compute_cts(p.main, p.env, k, {12, 100000});
  Lts big2 = compute_cts(p.main, p.env, k, {12, 100000});
  CHECK(write_lts(big) == write_lts(big2));

  Lts small = compute_cts(p.main, p.env, k, {4, 100000});
  CHECK(small.truncated);
  // already-emitted states and edges are a prefix of the larger run
  CHECK(small.state_count() <= big.state_count());
  for (int s = 0; s < small.state_count(); ++s) {
    auto so = small.out(s);
    auto bo = big.out(s);
    for (std::size_t i = 0; i < so.size(); ++i) {
      CHECK(i < bo.size());
      if (i < bo.size()) {
        CHECK(so[i].label == bo[i].label);
        CHECK(so[i].dst == bo[i].dst);
      }
    }
  }
}

TEST_CASE("compute_cts agrees with the trace oracle (property)") {
  testgen::Rng rng(860226);
  ObsSet k = testgen::corpus_obs();
  int agreed = 0;
  for (int i = 0; i < 60; ++i) {
    testgen::CorpusGen gen{rng, {7, 3, true}};
    Process p = gen.toplevel();
    CAPTURE(print(p));
    CAPTURE(print(gen.env));
    Lts fast = compute_cts(p, gen.env, k);
    Lts slow = oracle_cts(p, gen.env, k);
    REQUIRE(!fast.truncated);
    REQUIRE(!slow.truncated);
    BisimResult r = weak_bisim(fast, slow, k);
    CHECK(r.equivalent);
    ++agreed;
  }
  CHECK(agreed == 60);
}

TEST_CASE("compute_cts matches the lifted reversible semantics (property)") {
  testgen::Rng rng(77002);
  ObsSet k = testgen::corpus_obs();
  for (int i = 0; i < 25; ++i) {
    testgen::CorpusGen gen{rng, {6, 2, false}};
    Process p = gen.toplevel();
    CAPTURE(print(p));
    Lts cts = compute_cts(p, gen.env, k);
    Lts ts = rccs_lts(p, gen.env, k);
    REQUIRE(!ts.truncated);
    CHECK(weak_bisim(ts, cts, k).equivalent);
  }
}
