#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ccsr/parser.hpp"
#include "ccsr/semantics.hpp"
#include "generators.hpp"

using namespace ccsr;

namespace {

bool has_step(const std::vector<std::pair<Action, Process>>& ts, const Action& a,
              const Process& target) {
  Process want = normalize(target);
  for (const auto& [act, q] : ts)
    if (act == a && equal(q, want)) return true;
  return false;
}

}  // namespace

TEST_CASE("parse: basic forms") {
  Parsed p = parse("a.0 | ~b.0");
  REQUIRE(p.main.kind() == ProcKind::Par);
  CHECK(p.main.left().action() == Action::in("a"));
  CHECK(p.main.right().action() == Action::out("b"));

  Process q = parse_process("(x)(x.0 | ~x.0)");
  REQUIRE(q.kind() == ProcKind::Restrict);
  CHECK(q.name() == "x");
  CHECK(q.body().kind() == ProcKind::Par);

  Parsed d = parse("D(x) = x.D(x)\nD(a)");
  REQUIRE(d.env.count("D") == 1);
  CHECK(d.env["D"].formals == std::vector<std::string>{"x"});
  CHECK(d.env["D"].body.kind() == ProcKind::Prefix);
  CHECK(d.main.kind() == ProcKind::Call);
  CHECK(d.main.actuals() == std::vector<std::string>{"a"});
}

TEST_CASE("parse: precedence and comments") {
  // + binds tighter than |
  Process p = parse_process("a.0 + b.0 | c.0");
  CHECK(p.kind() == ProcKind::Par);
  CHECK(p.left().kind() == ProcKind::Sum);

  Process q = parse_process("# leading comment\n a.b.0 # trailing\n");
  CHECK(q.kind() == ProcKind::Prefix);

  // restriction scopes over a factor only
  Process r = parse_process("(x) a.0 | x.0");
  CHECK(r.kind() == ProcKind::Par);
  CHECK(r.left().kind() == ProcKind::Restrict);
}

TEST_CASE("parse: errors carry positions") {
  try {
    parse("a.0 |\n| b.0");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(parse("D(a)"), ValidationError);                 // unbound
  CHECK_THROWS_AS(parse("D(x) = x.0\nD(a,b)"), ValidationError);   // arity
  CHECK_THROWS_AS(parse("D(x) = x.y.0\nD(a)"), ValidationError);   // free name not formal
  CHECK_THROWS_AS(parse("a.0 b.0"), ParseError);                   // two mains
}

TEST_CASE("free_names") {
  CHECK(free_names(parse_process("(x)(x.0 | ~y.0)")) == std::set<std::string>{"y"});
  CHECK(free_names(Process::nil()).empty());
  CHECK(free_names(parse_process("a.b.0")) == std::set<std::string>{"a", "b"});
  CHECK(free_names(parse("D(x) = x.0\nD(a)").main) == std::set<std::string>{"a"});
}

TEST_CASE("normalize: units, AC, idempotent choice, dead binders") {
  CHECK(equal(normalize(parse_process("(b.0 | 0) | a.0")),
              normalize(parse_process("a.0 | b.0"))));
  Process pp = parse_process("a.0 + a.0");
  CHECK(equal(normalize(pp), normalize(parse_process("a.0"))));
  CHECK(equal(normalize(parse_process("(x) a.0")), parse_process("a.0")));
  // alpha canonicalization: bound names do not matter
  CHECK(equal(normalize(parse_process("(x) x.0")), normalize(parse_process("(y) y.0"))));
}

TEST_CASE("normalize is idempotent (property)") {
  testgen::Rng rng(7101);
  for (int i = 0; i < 500; ++i) {
    Process p = testgen::arbitrary_process(rng, 4);
    Process n1 = normalize(p);
    Process n2 = normalize(n1);
    CAPTURE(print(p));
    CHECK(equal(n1, n2));
    CHECK(print(n1) == print(n2));
  }
}

TEST_CASE("parser/printer roundtrip (property)") {
  testgen::Rng rng(40291);
  for (int i = 0; i < 500; ++i) {
    Process p = testgen::arbitrary_process(rng, 4);
    std::string text = print(p);
    CAPTURE(text);
    Process q = parse_process(text);
    CHECK(compare(p, q) == 0);
    CHECK(print(q) == text);
  }
}

TEST_CASE("transitions: act, synch, res") {
  Env empty;
  Parsed p1 = parse("a.b.0 + c.0");
  auto ts1 = transitions(p1.main, p1.env);
  CHECK(has_step(ts1, Action::in("a"), parse_process("b.0")));
  CHECK(has_step(ts1, Action::in("c"), Process::nil()));
  CHECK(ts1.size() == 2);

  auto ts2 = transitions(parse_process("x.0 | ~x.0"), empty);
  CHECK(has_step(ts2, Action::tau(), Process::nil()));
  CHECK(has_step(ts2, Action::in("x"), parse_process("~x.0")));
  CHECK(has_step(ts2, Action::out("x"), parse_process("x.0")));
  CHECK(ts2.size() == 3);

  auto ts3 = transitions(parse_process("(x)(x.0)"), empty);
  CHECK(ts3.empty());
}

TEST_CASE("transitions: recursion unfolds through equiv") {
  Parsed p = parse("D(x) = x.D(x)\nD(a)");
  auto ts = transitions(p.main, p.env);
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].first == Action::in("a"));
  CHECK(equal(ts[0].second, normalize(p.main)));

  // choice operands reachable through unfolding fire too
  Parsed q = parse("D(a,b) = a.0 + b.0\nD(a,b) + c.0");
  auto ts2 = transitions(q.main, q.env);
  CHECK(ts2.size() == 3);

  // non-prefix choice operands contribute nothing
  Env empty;
  auto ts3 = transitions(parse_process("(a.0 | b.0) + c.0"), empty);
  CHECK(ts3.size() == 1);
  CHECK(ts3[0].first == Action::in("c"));
}

TEST_CASE("transitions: unguarded recursion is detected") {
  Parsed p = parse("D(a) = D(a) + a.0\nD(a)");
  CHECK_THROWS_AS(transitions(p.main, p.env), UnguardedRecursionError);
}

TEST_CASE("transitions agree on normalized terms (property)") {
  testgen::Rng rng(5150);
  Env empty;
  for (int i = 0; i < 300; ++i) {
    Process p = testgen::arbitrary_process(rng, 4);
    auto t1 = transitions(p, empty);
    auto t2 = transitions(normalize(p), empty);
    CAPTURE(print(p));
    REQUIRE(t1.size() == t2.size());
    for (std::size_t j = 0; j < t1.size(); ++j) {
      CHECK(t1[j].first == t2[j].first);
      CHECK(equal(t1[j].second, t2[j].second));
    }
  }
}

TEST_CASE("synch steps are justified by complementary pairs (property)") {
  testgen::Rng rng(90210);
  Env empty;
  for (int i = 0; i < 200; ++i) {
    Process l = testgen::arbitrary_process(rng, 3);
    Process r = testgen::arbitrary_process(rng, 3);
    auto tl = transitions(l, empty);
    auto tr = transitions(r, empty);
    for (auto& [a, q] : transitions(Process::par(l, r), empty)) {
      if (!a.silent()) continue;
      bool justified = false;
      // silent steps of the composition: either one side moved silently, or
      // a complementary pair fired
      for (auto& [al, ql] : tl)
        if (al.silent() && equal(q, normalize(Process::par(ql, r)))) justified = true;
      for (auto& [ar, qr] : tr)
        if (ar.silent() && equal(q, normalize(Process::par(l, qr)))) justified = true;
      for (auto& [al, ql] : tl) {
        if (al.silent()) continue;
        for (auto& [ar, qr] : tr)
          if (ar == al.complement() && equal(q, normalize(Process::par(ql, qr))))
            justified = true;
      }
      CAPTURE(print(l));
      CAPTURE(print(r));
      CAPTURE(print(q));
      CHECK(justified);
    }
  }
}

TEST_CASE("build_lts: sizes") {
  Env empty;
  Lts a = build_lts(parse_process("a.0"), empty);
  CHECK(a.state_count() == 2);
  CHECK(a.edges().size() == 1);

  Lts d = build_lts(parse_process("a.0 | b.0"), empty);
  CHECK(d.state_count() == 4);
  CHECK(d.edges().size() == 4);

  Lts t = build_lts(parse_process("(x)(x.0 | ~x.0)"), empty);
  CHECK(t.state_count() == 2);
  REQUIRE(t.edges().size() == 1);
  CHECK(t.edges()[0].label == Label{Action::tau()});
}

TEST_CASE("build_lts: budget truncation") {
  Parsed p = parse("D(x) = x.(D(x) | x.0)\nD(a)");
  Lts l = build_lts(p.main, p.env, 20);
  CHECK(l.truncated);
  CHECK(l.state_count() <= 20);
}

TEST_CASE("validate_commit_polarity") {
  Env empty;
  ObsSet k = parse_obs("k");
  CHECK_THROWS_AS(validate_commit_polarity(parse_process("k.0 | ~k.0"), empty, k),
                  ValidationError);
  CHECK_NOTHROW(validate_commit_polarity(parse_process("k.0 | k.0"), empty, k));
  CHECK_NOTHROW(validate_commit_polarity(parse_process("x.k.0 | ~x.0"), empty, k));
}

TEST_CASE("lts text format roundtrip and errors") {
  Env empty;
  Lts l = build_lts(parse_process("a.0 | b.0"), empty);
  Lts l2 = read_lts(write_lts(l));
  CHECK(l2.state_count() == l.state_count());
  CHECK(l2.edges().size() == l.edges().size());
  CHECK(write_lts(read_lts(write_lts(l2))) == write_lts(l2));

  CHECK_THROWS_AS(read_lts("lts t\ntrans s0 a s1\ninit s0\n"), ParseError);
  CHECK_THROWS_AS(read_lts("lts t\n"), ParseError);
}
