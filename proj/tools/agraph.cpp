// agraph: IoT deployment risk scoring and placement optimisation.
//
// Exit codes: 0 success, 2 invalid input, 3 infeasible, 4 resource cap hit.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "agraph/agraph.hpp"

namespace {

using namespace agraph;

PlanOptions plan_options() {
  PlanOptions opts;
  if (const char* cap = std::getenv("AGRAPH_PLAN_CAP")) {
    try {
      std::size_t used = 0;
      const std::string s = cap;
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size() || v == 0) throw std::invalid_argument(s);
      opts.max_plans = v;
    } catch (const std::exception&) {
      throw InputError("AGRAPH_PLAN_CAP must be a positive integer");
    }
  }
  return opts;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "seed: " << s << "\n";
  return s;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_file(path, text);
}

void dump_graph(const std::string& path, const Instance& inst, const Deployment& depl) {
  if (path.empty()) return;
  write_file(path, dump(to_json(build_attack_graph(inst.network, inst.layout, depl))));
}

struct Flags {
  std::string scenario;
  std::string deployment;
  std::string out;
  std::string cdf;
  std::string graph;
  std::optional<std::uint64_t> seed;
  std::size_t hosts = 24;
  std::string problem = "fdmr";
  bool no_heuristic = false;
  std::string heuristic = "on";
  bool no_monotone_prune = false;
  std::size_t trials = 5;
  std::size_t repeats = 5;
  double fraction = 0.1;
  double grid_max = 2.0;
  double grid_step = 0.1;
};

int run(int argc, char** argv) {
  CLI::App app{"IoT deployment risk on logical attack graphs"};
  app.require_subcommand(1);
  Flags f;

  auto scenario_opt = [&](CLI::App* c) { c->add_option("--scenario", f.scenario, "scenario JSON")->required(); };
  auto seed_opt = [&](CLI::App* c) { c->add_option("--seed", f.seed, "RNG seed (drawn and printed when omitted)"); };
  auto out_opt = [&](CLI::App* c, const char* what) { c->add_option("--out", f.out, what); };

  auto* gen = app.add_subcommand("gen", "generate a scenario");
  seed_opt(gen);
  gen->add_option("--hosts", f.hosts, "host count including internet and goal");
  out_opt(gen, "scenario JSON (stdout if omitted)");

  auto* size = app.add_subcommand("size", "number of full deployments");
  scenario_opt(size);

  auto* score = app.add_subcommand("score", "risk of a deployment");
  scenario_opt(score);
  score->add_option("--deployment", f.deployment, "deployment JSON")->required();
  out_opt(score, "risk JSON");
  score->add_option("--dump-graph", f.graph, "write the attack graph JSON here");

  auto* optimize = app.add_subcommand("optimize", "solve FDMR or MURD");
  scenario_opt(optimize);
  seed_opt(optimize);
  optimize->add_option("--problem", f.problem, "fdmr or murd")->check(CLI::IsMember({"fdmr", "murd"}));
  optimize->add_flag("--no-heuristic", f.no_heuristic, "f = g, random branching");
  optimize->add_option("--heuristic", f.heuristic, "on or strong")->check(CLI::IsMember({"on", "strong"}));
  optimize->add_flag("--no-monotone-prune", f.no_monotone_prune, "drop bounds that assume risk is monotone");
  out_opt(optimize, "result JSON");
  optimize->add_option("--dump-graph", f.graph, "write the best deployment's attack graph here");

  auto* enumerate = app.add_subcommand("enumerate", "score every full deployment");
  scenario_opt(enumerate);
  out_opt(enumerate, "per-deployment CSV");
  enumerate->add_option("--cdf", f.cdf, "cumulative distribution CSV");

  auto* tradeoff = app.add_subcommand("tradeoff", "devices vs. risk bound");
  scenario_opt(tradeoff);
  seed_opt(tradeoff);
  tradeoff->add_option("--repeats", f.repeats, "random incremental repeats");
  tradeoff->add_option("--grid-max", f.grid_max, "largest finite risk bound");
  tradeoff->add_option("--grid-step", f.grid_step, "risk bound step")->check(CLI::PositiveNumber);
  out_opt(tradeoff, "curve CSV");

  auto* baseline = app.add_subcommand("baseline", "mean risk of random full deployments");
  scenario_opt(baseline);
  seed_opt(baseline);
  baseline->add_option("--trials", f.trials, "random deployments");
  out_opt(baseline, "baseline JSON");

  auto* robust = app.add_subcommand("robustness", "re-score under vulnerability perturbation");
  scenario_opt(robust);
  seed_opt(robust);
  robust->add_option("--deployment", f.deployment, "deployment JSON (FDMR optimum when omitted)");
  robust->add_option("--fraction", f.fraction, "share of hosts and devices perturbed");
  robust->add_option("--repeats", f.repeats, "perturbations")->default_val(10);
  out_opt(robust, "robustness JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const PlanOptions popts = plan_options();

  if (*gen) {
    GeneratorConfig cfg;
    cfg.seed = resolve_seed(f.seed);
    cfg.host_count = f.hosts;
    emit(f.out, dump(to_json(generate(cfg))));
    return 0;
  }

  const Instance inst = load_instance(f.scenario);

  if (*size) {
    std::cout << search_space_size(inst.layout.constraints) << "\n";
    return 0;
  }

  if (*score) {
    const Deployment depl = load_deployment(f.deployment);
    if (!is_valid(depl, inst.layout)) throw InputError("deployment is not valid for this scenario");
    const RiskEvaluator eval(inst, popts);
    const Evaluation e = eval.evaluate(depl);
    if (auto warn = monotonicity_check(e.risk)) std::cerr << "warning: " << *warn << "\n";
    Json j = {{"format_version", kFormatVersion},
              {"deployment", depl.canonical()},
              {"risk", to_json(e.risk)},
              {"metrics", to_json(e.metrics)},
              {"baseline", to_json(eval.baseline().metrics)}};
    emit(f.out, dump(j));
    dump_graph(f.graph, inst, depl);
    return 0;
  }

  if (*optimize) {
    ResultRecord rec;
    rec.problem = f.problem == "murd" ? ProblemKind::Murd : ProblemKind::Fdmr;
    rec.seed = resolve_seed(f.seed);
    rec.heuristic = !f.no_heuristic;
    rec.strong_heuristic = f.heuristic == "strong";
    rec.monotone_prune = !f.no_monotone_prune;
    SearchOptions so;
    so.problem = rec.problem;
    so.use_heuristic = rec.heuristic;
    so.strong_heuristic = rec.strong_heuristic;
    so.monotone_prune = rec.monotone_prune;
    so.seed = rec.seed;
    const RiskEvaluator eval(inst, popts);
    rec.search = dfbnb(eval, so);
    if (auto warn = monotonicity_check(rec.search.evaluation.risk)) std::cerr << "warning: " << *warn << "\n";
    emit(f.out, dump(to_json(rec)));
    dump_graph(f.graph, inst, rec.search.best);
    return 0;
  }

  if (*enumerate) {
    const RiskEvaluator eval(inst, popts);
    const auto rows = score_all(eval, enumerate_full_deployments(inst.layout));
    emit(f.out, enumeration_csv(rows));
    if (!f.cdf.empty()) write_file(f.cdf, cdf_csv(risk_cdf(rows)));
    if (!f.out.empty() && f.out != "-") {
      double lo = rows.front().evaluation.risk.value;
      for (const auto& r : rows) lo = std::min(lo, r.evaluation.risk.value);
      std::cout << "deployments " << rows.size() << " min_risk " << format_double(lo) << "\n";
    }
    return 0;
  }

  if (*tradeoff) {
    const std::uint64_t seed = resolve_seed(f.seed);
    if (f.grid_max < 0) throw InputError("--grid-max must be non-negative");
    const RiskEvaluator eval(inst, popts);
    emit(f.out, tradeoff_csv(tradeoff_curve(eval, default_risk_grid(f.grid_max, f.grid_step), f.repeats, seed)));
    return 0;
  }

  if (*baseline) {
    const std::uint64_t seed = resolve_seed(f.seed);
    const RiskEvaluator eval(inst, popts);
    const RandomBaseline b = random_baseline_fdmr(eval, f.trials, seed);
    emit(f.out, dump({{"format_version", kFormatVersion}, {"seed", seed}, {"trials", f.trials}, {"mean", b.mean}, {"values", b.values}}));
    return 0;
  }

  if (*robust) {
    const std::uint64_t seed = resolve_seed(f.seed);
    Deployment depl;
    if (f.deployment.empty()) {
      SearchOptions so;
      depl = dfbnb(RiskEvaluator(inst, popts), so).best;
    } else {
      depl = load_deployment(f.deployment);
      if (!is_valid(depl, inst.layout)) throw InputError("deployment is not valid for this scenario");
    }
    const Robustness r = robustness(inst, depl, f.fraction, f.repeats, seed, popts);
    emit(f.out, dump({{"format_version", kFormatVersion},
                      {"seed", seed},
                      {"deployment", depl.canonical()},
                      {"fraction", f.fraction},
                      {"repeats", f.repeats},
                      {"original", r.original},
                      {"mean", r.mean},
                      {"std", r.stddev},
                      {"values", r.values}}));
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const agraph::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
