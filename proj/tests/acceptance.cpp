// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is nonzero when any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "agraph/agraph.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace agraph;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (!pass) detail << "; ";
    else detail.str("");
    pass = false;
    detail << why;
  }
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("agraph-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string tmp(const std::string& name) { return (workdir() / name).string(); }

// Runs the CLI with stdout sent to `out` (discarded when empty); returns the exit code.
int cli(const std::string& args, const std::string& out = "") {
  const std::string cmd = "'" AGRAPH_BIN "' " + args + " >'" + (out.empty() ? std::string("/dev/null") : out) + "' 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

GeneratorConfig seeded(std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  return cfg;
}

SearchResult solve(const RiskEvaluator& eval, ProblemKind problem, bool heuristic, std::uint64_t seed = 1,
                   std::optional<Ordering> ordering = std::nullopt) {
  SearchOptions o;
  o.problem = problem;
  o.use_heuristic = heuristic;
  o.seed = seed;
  o.ordering = ordering;
  return dfbnb(eval, o);
}

Outcome search_space_counting() {
  Outcome r;
  const auto def = search_space_size(generate(seeded(1)).layout.constraints);
  const auto tv = search_space_size(testing::tv_instance().layout.constraints);
  const std::string sc = tmp("c1.json");
  cli("gen --seed 1 --out '" + sc + "'");
  cli("size --scenario '" + sc + "'", tmp("c1.txt"));
  const std::string printed = read_file(tmp("c1.txt"));
  r.detail << "default " << def << ", tv " << tv << ", cli " << printed.substr(0, printed.size() - 1);
  if (def != 2304 || printed != "2304\n") r.fail("default scenario size is not 2304");
  if (tv != 36) r.fail("tv example size is not 36");
  return r;
}

// Shared by criteria 2, 3 and 4.
struct ScenarioRun {
  std::uint64_t seed;
  double enum_min;
  double fdmr_on, fdmr_off;
  std::size_t murd_oracle;
  double murd_on, murd_off;
  double fdmr_off_table, murd_off_table;
  // *_off: random order (CLI default); *_off_table: same order as the heuristic run.
  std::uint64_t fdmr_exp_on, fdmr_exp_off, murd_exp_on, murd_exp_off, fdmr_exp_off_table, murd_exp_off_table;
  double fdmr_ms, murd_ms;
  bool negative;
};

const std::vector<ScenarioRun>& suite() {
  static const std::vector<ScenarioRun> runs = [] {
    std::vector<ScenarioRun> out;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Instance inst = generate(seeded(seed));
      const RiskEvaluator eval(inst);
      ScenarioRun s{};
      s.seed = seed;
      const auto rows = score_all(eval, enumerate_full_deployments(inst.layout));
      s.enum_min = rows.front().evaluation.risk.value;
      for (const auto& row : rows) {
        s.enum_min = std::min(s.enum_min, row.evaluation.risk.value);
        s.negative |= row.evaluation.risk.value < -kZeroRisk;
      }
      const SearchResult fon = solve(eval, ProblemKind::Fdmr, true), foff = solve(eval, ProblemKind::Fdmr, false);
      const SearchResult mon = solve(eval, ProblemKind::Murd, true), moff = solve(eval, ProblemKind::Murd, false);
      s.fdmr_on = fon.objective;
      s.fdmr_off = foff.objective;
      s.murd_on = mon.objective;
      s.murd_off = moff.objective;
      s.fdmr_exp_on = fon.expanded;
      s.fdmr_exp_off = foff.expanded;
      s.murd_exp_on = mon.expanded;
      s.murd_exp_off = moff.expanded;
      const SearchResult ft = solve(eval, ProblemKind::Fdmr, false, 1, Ordering::Table);
      const SearchResult mt = solve(eval, ProblemKind::Murd, false, 1, Ordering::Table);
      s.fdmr_off_table = ft.objective;
      s.murd_off_table = mt.objective;
      s.fdmr_exp_off_table = ft.expanded;
      s.murd_exp_off_table = mt.expanded;
      s.fdmr_ms = fon.elapsed_ms;
      s.murd_ms = mon.elapsed_ms;
      testing::OracleScorer oracle(eval);
      s.murd_oracle = oracle.murd(testing::all_bounded_deployments(inst.layout));
      s.negative |= fon.evaluation.risk.value < -kZeroRisk;
      out.push_back(s);
    }
    return out;
  }();
  return runs;
}

Outcome fdmr_oracle() {
  Outcome r;
  double worst_ms = 0, worst_delta = 0;
  for (const auto& s : suite()) {
    worst_ms = std::max(worst_ms, s.fdmr_ms);
    const double delta = std::abs(s.fdmr_on - s.enum_min);
    worst_delta = std::max(worst_delta, delta);
    if (delta > 1e-9) r.fail("seed " + std::to_string(s.seed) + ": optimum differs from enumeration minimum");
    if (s.fdmr_ms > 600'000) r.fail("seed " + std::to_string(s.seed) + ": over 10 minutes");
  }
  // End-to-end through the CLI on two of the scenarios.
  for (std::uint64_t seed : {1u, 2u}) {
    const std::string sc = tmp("c2.json"), res = tmp("c2-res.json"), csv = tmp("c2.csv");
    cli("gen --seed " + std::to_string(seed) + " --out '" + sc + "'");
    const int a = cli("optimize --problem fdmr --seed 1 --scenario '" + sc + "' --out '" + res + "'");
    const int b = cli("enumerate --scenario '" + sc + "' --out '" + csv + "'");
    if (a != 0 || b != 0) {
      r.fail("cli run failed for seed " + std::to_string(seed));
      continue;
    }
    std::istringstream in(read_file(csv));
    std::string line;
    std::getline(in, line);
    double lo = INFINITY;
    while (std::getline(in, line)) {
      const auto c1 = line.find(','), c2 = line.find(',', c1 + 1), c3 = line.find(',', c2 + 1);
      lo = std::min(lo, std::stod(line.substr(c2 + 1, c3 - c2 - 1)));
    }
    const double obj = Json::parse(read_file(res))["objective"].get<double>();
    if (std::abs(obj - lo) > 1e-9) r.fail("cli optimum differs from cli enumeration for seed " + std::to_string(seed));
  }
  if (r.pass)
    r.detail << "20/20 scenarios match, max |delta| " << worst_delta << ", slowest " << worst_ms << " ms";
  return r;
}

Outcome murd_oracle() {
  Outcome r;
  std::size_t total = 0;
  for (const auto& s : suite()) {
    total += s.murd_oracle;
    if (s.murd_on != static_cast<double>(s.murd_oracle))
      r.fail("seed " + std::to_string(s.seed) + ": MURD " + std::to_string(s.murd_on) + " vs exhaustive " +
             std::to_string(s.murd_oracle));
  }
  if (r.pass) r.detail << "20/20 scenarios match, mean devices " << static_cast<double>(total) / 20;
  return r;
}

// Objectives must agree across heuristic on, off with random order, and off
// with the heuristic's own order. Node counts are compared under the same
// branching order so the difference measures the heuristic's pruning alone;
// the random-order counts are reported alongside for reference.
Outcome heuristic_neutrality() {
  Outcome r;
  std::uint64_t on = 0, off_table = 0, off_random = 0;
  std::size_t compared = 0, random_fewer = 0;
  for (const auto& s : suite()) {
    const std::string tag = "seed " + std::to_string(s.seed);
    if (s.fdmr_on != s.fdmr_off || s.fdmr_on != s.fdmr_off_table)
      r.fail(tag + ": FDMR objective changes with the heuristic");
    if (s.murd_on != s.murd_off || s.murd_on != s.murd_off_table)
      r.fail(tag + ": MURD objective changes with the heuristic");
    if (s.negative) continue;
    ++compared;
    on += s.fdmr_exp_on + s.murd_exp_on;
    off_table += s.fdmr_exp_off_table + s.murd_exp_off_table;
    off_random += s.fdmr_exp_off + s.murd_exp_off;
    random_fewer += (s.fdmr_exp_off < s.fdmr_exp_on) + (s.murd_exp_off < s.murd_exp_on);
    if (s.fdmr_exp_on > s.fdmr_exp_off_table)
      r.fail(tag + ": FDMR expands " + std::to_string(s.fdmr_exp_on) + " > " + std::to_string(s.fdmr_exp_off_table));
    if (s.murd_exp_on > s.murd_exp_off_table)
      r.fail(tag + ": MURD expands " + std::to_string(s.murd_exp_on) + " > " + std::to_string(s.murd_exp_off_table));
  }
  if (r.pass)
    r.detail << "objectives identical; " << compared << " monotone scenarios, same-order expansions on " << on
             << " vs off " << off_table << "; random-order off " << off_random << " (fewer than on in "
             << random_fewer << " of " << 2 * compared << " runs)";
  return r;
}

Outcome plan_metric_oracle() {
  Outcome r;
  SplitMix64 rng(20240601);
  std::size_t feasible = 0, largest = 0;
  for (int i = 0; i < 200; ++i) {
    const AttackGraph g = testing::random_graph(rng, 22);
    largest = std::max(largest, g.size());
    const auto oracle = testing::naive_metrics(g);
    std::optional<PlanMetrics> main;
    try {
      main = shortest_plan_metrics(g);
    } catch (const InfeasibleError&) {
    }
    if (main.has_value() != oracle.has_value()) {
      r.fail("graph " + std::to_string(i) + ": feasibility differs");
      continue;
    }
    if (!oracle) continue;
    ++feasible;
    if (!(*main == *oracle)) r.fail("graph " + std::to_string(i) + ": metrics differ");
  }
  if (r.pass) r.detail << "200 graphs (" << feasible << " with a plan, up to " << largest << " nodes) match";
  return r;
}

Outcome optimized_vs_random() {
  Outcome r;
  double opt = 0, rnd = 0;
  for (std::uint64_t seed = 101; seed <= 140; ++seed) {
    const Instance inst = generate(seeded(seed));
    const RiskEvaluator eval(inst);
    opt += solve(eval, ProblemKind::Fdmr, true).objective;
    rnd += random_baseline_fdmr(eval, 5, seed).mean;
  }
  opt /= 40;
  rnd /= 40;
  r.detail << "optimal mean " << opt << ", random mean " << rnd;
  if (rnd > 0) r.detail << ", ratio " << opt / rnd;
  if (!(opt < rnd)) r.fail(r.detail.str() + ": optimal mean is not below random mean");
  else if (!(opt <= 0.6 * rnd)) r.fail(r.detail.str() + ": optimal mean exceeds 60% of random mean");
  return r;
}

Outcome risk_identities() {
  Outcome r;
  std::size_t scenarios = 0, scored = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = generate(seeded(seed));
    const RiskEvaluator eval(inst);
    ++scenarios;
    if (eval.risk(Deployment{}).value != 0.0) r.fail("seed " + std::to_string(seed) + ": R(empty) != 0");
    SplitMix64 rng(seed);
    for (int k = 0; k < 10; ++k) {
      const RiskScore s = eval.risk(random_full_deployment(inst.layout, rng));
      double sum = 0;
      for (double c : s.components) sum += c;
      worst = std::max(worst, std::abs(sum - s.value));
      ++scored;
    }
  }
  for (const Instance& inst : {testing::two_type_instance(), testing::tv_instance()})
    if (RiskEvaluator(inst).risk(Deployment{}).value != 0.0) r.fail("fixture: R(empty) != 0");
  if (worst > 1e-12) r.fail("component sum off by " + std::to_string(worst));
  if (r.pass) r.detail << scenarios << " scenarios, " << scored << " deployments, max component gap " << worst;
  return r;
}

Outcome determinism() {
  Outcome r;
  auto twice = [&](const std::string& label, const std::function<std::string(const std::string&)>& produce,
                   bool strip_elapsed = false) {
    std::string a = produce("a"), b = produce("b");
    if (strip_elapsed) {
      Json ja = Json::parse(a), jb = Json::parse(b);
      ja.erase("elapsed_ms");
      jb.erase("elapsed_ms");
      a = ja.dump();
      b = jb.dump();
    }
    if (a.empty() || a != b) r.fail(label + " differs between runs");
  };
  const std::string sc = tmp("c8-a.json");
  twice("scenario", [&](const std::string& k) {
    const std::string p = tmp("c8-" + k + ".json");
    cli("gen --seed 77 --out '" + p + "'");
    return read_file(p);
  });
  for (const char* problem : {"fdmr", "murd"})
    for (const char* flags : {"", " --no-heuristic"})
      twice(std::string("result ") + problem + flags, [&](const std::string& k) {
        const std::string p = tmp("c8-res-" + k + ".json");
        cli(std::string("optimize --seed 5 --problem ") + problem + flags + " --scenario '" + sc + "' --out '" + p + "'");
        return read_file(p);
      }, true);
  twice("enumeration csv", [&](const std::string& k) {
    const std::string p = tmp("c8-enum-" + k + ".csv"), c = tmp("c8-cdf-" + k + ".csv");
    cli("enumerate --scenario '" + sc + "' --out '" + p + "' --cdf '" + c + "'");
    return read_file(p) + read_file(c);
  });
  twice("tradeoff csv", [&](const std::string& k) {
    const std::string p = tmp("c8-trade-" + k + ".csv");
    cli("tradeoff --seed 5 --repeats 3 --scenario '" + sc + "' --out '" + p + "'");
    return read_file(p);
  });
  twice("baseline", [&](const std::string& k) {
    const std::string p = tmp("c8-base-" + k + ".json");
    cli("baseline --seed 5 --scenario '" + sc + "' --out '" + p + "'");
    return read_file(p);
  });
  twice("robustness", [&](const std::string& k) {
    const std::string p = tmp("c8-rob-" + k + ".json");
    cli("robustness --seed 5 --scenario '" + sc + "' --out '" + p + "'");
    return read_file(p);
  });
  if (r.pass) r.detail << "scenario, 4 result records, enumeration+cdf, tradeoff, baseline, robustness byte-identical";
  return r;
}

Outcome robustness_harness() {
  Outcome r;
  // Seed 118 is one of the few generated scenarios whose optimum is not zero.
  const Instance inst = generate(seeded(118));
  const Deployment best = solve(RiskEvaluator(inst), ProblemKind::Fdmr, true).best;
  const Robustness ten = robustness(inst, best, 0.1, 10, 42);
  const Robustness zero = robustness(inst, best, 0.0, 10, 42);
  r.detail << "original " << ten.original << ", perturbed mean " << ten.mean << " std " << ten.stddev;
  if (ten.values.size() != 10 || !std::isfinite(ten.mean) || !std::isfinite(ten.stddev))
    r.fail("10% perturbation did not report 10 finite samples");
  if (zero.mean != zero.original || zero.stddev != 0.0) r.fail("fraction 0 changed the risk");
  const std::string sc = tmp("c9.json"), out = tmp("c9-out.json");
  cli("gen --seed 118 --out '" + sc + "'");
  if (cli("robustness --seed 42 --fraction 0.1 --repeats 10 --scenario '" + sc + "' --out '" + out + "'") != 0 ||
      Json::parse(read_file(out))["values"].size() != 10)
    r.fail("cli robustness run failed");
  return r;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 search-space counting", search_space_counting},
      {"2 FDMR oracle optimality", fdmr_oracle},
      {"3 MURD oracle optimality", murd_oracle},
      {"4 heuristic neutrality", heuristic_neutrality},
      {"5 plan-metric oracle", plan_metric_oracle},
      {"6 optimized vs random", optimized_vs_random},
      {"7 risk identities", risk_identities},
      {"8 determinism", determinism},
      {"9 robustness harness", robustness_harness},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s criterion %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.str().c_str());
    std::fflush(stdout);
  }
  fs::remove_all(workdir());
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
