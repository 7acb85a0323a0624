#include "ccsr/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ccsr/bisim.hpp"
#include "ccsr/cts.hpp"
#include "ccsr/errors.hpp"
#include "ccsr/parser.hpp"
#include "ccsr/phil.hpp"
#include "ccsr/rccs.hpp"

namespace ccsr {

namespace {

constexpr int kOk = 0;
constexpr int kNotEquivalent = 1;
constexpr int kInputError = 2;
constexpr int kBudget = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw ValidationError("cannot write file '" + out_path + "'");
  out << text;
}

int run_compress(const std::string& file, const std::string& obs, int max_states,
                 const std::string& format, const std::string& out, bool use_oracle,
                 int depth) {
  Parsed p = parse(slurp(file));
  ObsSet k = parse_obs(obs);
  Lts lts;
  if (use_oracle) {
    OracleLimits lim;
    lim.max_states = max_states;
    if (depth > 0) lim.trace_depth = depth;
    lts = oracle_cts(p.main, p.env, k, lim);
  } else {
    CtsLimits lim;
    lim.max_states = max_states;
    lts = compute_cts(p.main, p.env, k, lim);
  }
  emit(format == "dot" ? lts_to_dot(lts) : write_lts(lts), out);
  return lts.truncated ? kBudget : kOk;
}

int run_check(const std::string& file, const std::string& obs, const std::string& spec_path) {
  Parsed p = parse(slurp(file));
  ObsSet k = parse_obs(obs);
  Lts spec = read_lts(slurp(spec_path));
  Lts cts = compute_cts(p.main, p.env, k);
  if (cts.truncated) {
    std::cout << "budget exceeded while compressing; no verdict\n";
    return kBudget;
  }
  BisimResult r = weak_bisim(cts, spec, k);
  if (r.equivalent) {
    std::cout << "equivalent: the lifted process is a correct implementation "
                 "of the specification\n";
    return kOk;
  }
  std::cout << "not equivalent: " << r.describe() << "\n";
  return kNotEquivalent;
}

int run_simulate(const std::string& file, const std::string& obs,
                 const std::string& script_path) {
  Parsed p = parse(slurp(file));
  ObsSet k = parse_obs(obs);
  validate_commit_polarity(p.main, p.env, k);
  RCtx ctx{&p.env, &k};
  RProcess cur = lift(p.main);

  auto show = [&](const std::vector<RTransition>& ts) {
    std::cout << "state: " << rprint(cur) << "\n";
    int fi = 0, bi = 0;
    for (const auto& t : ts) {
      if (t.backward) {
        std::cout << "  back " << bi++ << ": " << t.action.str() << "- (thread "
                  << t.tid << ")\n";
      } else {
        std::cout << "  fwd " << fi++ << ": " << t.action.str()
                  << (t.commit ? " [commit]" : "") << "\n";
      }
    }
  };

  std::istringstream script(slurp(script_path));
  std::string line;
  int lineno = 0;
  while (std::getline(script, line)) {
    ++lineno;
    std::istringstream ls(line.substr(0, line.find('#')));
    std::string cmd;
    if (!(ls >> cmd)) continue;
    std::vector<RTransition> ts = rtransitions(cur, ctx);
    if (cmd == "list") {
      show(ts);
      continue;
    }
    int index = -1;
    if ((cmd != "fwd" && cmd != "back") || !(ls >> index) || index < 0) {
      std::cerr << "simulate: line " << lineno << ": expected 'list', 'fwd N' or 'back N'\n";
      return kInputError;
    }
    const RTransition* chosen = nullptr;
    int at = 0;
    for (const auto& t : ts) {
      if (t.backward != (cmd == "back")) continue;
      if (at++ == index) { chosen = &t; break; }
    }
    if (!chosen) {
      std::cerr << "simulate: line " << lineno << ": no " << cmd << " transition " << index
                << "\n";
      return kInputError;
    }
    std::cout << cmd << " " << index << ": " << chosen->action.str()
              << (chosen->backward ? "-" : "") << "\n";
    cur = chosen->target;
  }
  std::cout << "final: " << rprint(cur) << "\n";
  return kOk;
}

int run_bench_cmd(int n, bool full) {
  auto records = run_bench(n, full);
  std::cout << bench_table(records);
  for (const auto& r : records) {
    if (r.verdict == "truncated") return kBudget;
    if (r.verdict != "equivalent") return kNotEquivalent;
  }
  return kOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"causal compression and verification of reversible CCS processes"};
  app.require_subcommand(1);

  std::string file, obs, format = "lts", out, spec, script, system = "phil";
  int max_states = 100000, depth = 0, n = 4;
  bool full = false;

  auto* compress = app.add_subcommand(
      "compress", "compute the causal compression relative to the observables");
  compress->add_option("file", file, "CCS source file")->required();
  compress->add_option("--obs", obs, "comma-separated observable actions")->required();
  compress->add_option("--max-states", max_states, "state budget");
  compress->add_option("--format", format, "output format: lts or dot")
      ->check(CLI::IsMember({"lts", "dot"}));
  compress->add_option("--out", out, "output file (default stdout)");

  auto* check = app.add_subcommand(
      "check", "compress and compare against a specification LTS");
  check->add_option("file", file, "CCS source file")->required();
  check->add_option("--obs", obs, "comma-separated observable actions")->required();
  check->add_option("--spec", spec, "specification in the lts text format")->required();

  auto* oracle = app.add_subcommand(
      "oracle", "brute-force causal compression, for cross-validation");
  oracle->add_option("file", file, "CCS source file")->required();
  oracle->add_option("--obs", obs, "comma-separated observable actions")->required();
  oracle->add_option("--depth", depth, "trace depth bound");
  oracle->add_option("--max-states", max_states, "state budget");
  oracle->add_option("--format", format, "output format: lts or dot")
      ->check(CLI::IsMember({"lts", "dot"}));
  oracle->add_option("--out", out, "output file (default stdout)");

  auto* simulate = app.add_subcommand(
      "simulate", "scripted stepping of the reversible machine");
  simulate->add_option("file", file, "CCS source file")->required();
  simulate->add_option("--obs", obs, "comma-separated observable actions")->required();
  simulate->add_option("--script", script, "script file: list / fwd N / back N")->required();

  auto* bench = app.add_subcommand("bench", "dining-philosophers benchmark");
  bench->add_option("system", system, "benchmark system (phil)")
      ->check(CLI::IsMember({"phil"}));
  bench->add_option("--n", n, "philosopher count upper bound");
  bench->add_flag("--full", full, "direct construction of the deadlock-free variant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    if (compress->parsed()) return run_compress(file, obs, max_states, format, out, false, 0);
    if (check->parsed()) return run_check(file, obs, spec);
    if (oracle->parsed())
      return run_compress(file, obs, max_states, format, out, true, depth);
    if (simulate->parsed()) return run_simulate(file, obs, script);
    if (bench->parsed()) return run_bench_cmd(n, full);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBudget;
  }
  return kInputError;
}

}  // namespace ccsr
