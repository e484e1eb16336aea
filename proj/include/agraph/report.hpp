#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "agraph/io.hpp"
#include "agraph/model.hpp"
#include "agraph/risk.hpp"
#include "agraph/scenario.hpp"
#include "agraph/search.hpp"

namespace agraph {

// Every full deployment, sorted by canonical form. Refuses more than `limit`.
inline std::vector<Deployment> enumerate_full_deployments(const DeploymentScenario& layout,
                                                          std::uint64_t limit = 1'000'000) {
  if (search_space_size(layout.constraints) > limit)
    throw ResourceError("more than " + std::to_string(limit) + " full deployments");

  std::vector<Deployment> out{Deployment{}};
  for (const auto& c : layout.constraints) {
    std::vector<std::string> locs = c.locations;
    std::vector<std::string> devs = c.devices;
    std::sort(locs.begin(), locs.end());
    std::sort(devs.begin(), devs.end());
    const std::size_t n = c.required_count;

    // All (n-subset of locations, ordered n-selection of devices) pairs.
    std::vector<std::vector<std::pair<std::string, std::string>>> options;
    std::vector<bool> pick(locs.size(), false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(n), true);
    do {
      std::vector<std::string> chosen;
      for (std::size_t i = 0; i < locs.size(); ++i)
        if (pick[i]) chosen.push_back(locs[i]);
      std::vector<bool> used(devs.size(), false);
      std::vector<std::size_t> sel;
      auto rec = [&](auto&& self) -> void {
        if (sel.size() == n) {
          std::vector<std::pair<std::string, std::string>> o;
          for (std::size_t i = 0; i < n; ++i) o.emplace_back(devs[sel[i]], chosen[i]);
          options.push_back(std::move(o));
          return;
        }
        for (std::size_t i = 0; i < devs.size(); ++i) {
          if (used[i]) continue;
          used[i] = true;
          sel.push_back(i);
          self(self);
          sel.pop_back();
          used[i] = false;
        }
      };
      rec(rec);
    } while (std::prev_permutation(pick.begin(), pick.end()));

    std::vector<Deployment> next;
    next.reserve(out.size() * options.size());
    for (const auto& base : out)
      for (const auto& o : options) {
        Deployment d = base;
        for (const auto& [dev, loc] : o) d.placements[dev] = loc;
        next.push_back(std::move(d));
      }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end(),
            [](const Deployment& a, const Deployment& b) { return a.canonical() < b.canonical(); });
  return out;
}

struct ScoredDeployment {
  Deployment deployment;
  Evaluation evaluation;
};

inline std::vector<ScoredDeployment> score_all(const RiskEvaluator& eval, const std::vector<Deployment>& depls) {
  std::vector<ScoredDeployment> rows;
  rows.reserve(depls.size());
  for (const auto& d : depls) rows.push_back({d, eval.evaluate(d)});
  return rows;
}

inline std::string enumeration_csv(const std::vector<ScoredDeployment>& rows) {
  CsvWriter csv({"index", "deployment", "risk", "r_opt_len", "r_opt_cnt", "r_opt_exp", "r_opt_prv"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const RiskScore& r = rows[i].evaluation.risk;
    csv.row({std::to_string(i), rows[i].deployment.canonical(), format_double(r.value), format_double(r.components[0]),
             format_double(r.components[1]), format_double(r.components[2]), format_double(r.components[3])});
  }
  return csv.str();
}

struct CdfPoint {
  double risk = 0.0;
  std::size_t count_le = 0;
  double percent_le = 0.0;
};

// Share of deployments whose risk is at most x, at every distinct risk x.
inline std::vector<CdfPoint> risk_cdf(const std::vector<ScoredDeployment>& rows) {
  std::vector<double> values;
  for (const auto& r : rows) values.push_back(r.evaluation.risk.value);
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.push_back({values[i], i + 1, 100.0 * static_cast<double>(i + 1) / static_cast<double>(values.size())});
  }
  return out;
}

inline std::string cdf_csv(const std::vector<CdfPoint>& cdf) {
  CsvWriter csv({"risk", "count_le", "percent_le"});
  for (const auto& p : cdf) csv.row({format_double(p.risk), std::to_string(p.count_le), format_double(p.percent_le)});
  return csv.str();
}

// Risk bounds 0, step, 2*step, ..., max, then +inf.
inline std::vector<double> default_risk_grid(double max = 2.0, double step = 0.1) {
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::llround(max / step));
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(static_cast<double>(i) * step);
  grid.push_back(std::numeric_limits<double>::infinity());
  return grid;
}

struct TradeoffPoint {
  double bound = 0.0;
  std::size_t devices = 0;
};

struct Tradeoff {
  std::vector<TradeoffPoint> optimal;  // most devices with R <= bound
  std::vector<double> random;          // mean risk after k random additions
};

inline Tradeoff tradeoff_curve(const RiskEvaluator& eval, const std::vector<double>& bounds, std::size_t repeats,
                               std::uint64_t seed) {
  Tradeoff t;
  for (double b : bounds) {
    SearchOptions o;
    o.problem = ProblemKind::Murd;
    o.risk_bound = b;
    const SearchResult r = dfbnb(eval, o);
    t.optimal.push_back({b, r.best.deployed_count()});
  }
  t.random = random_incremental_murd(eval, repeats, seed);
  return t;
}

inline std::string tradeoff_csv(const Tradeoff& t) {
  CsvWriter csv({"curve", "devices", "risk"});
  for (const auto& p : t.optimal)
    csv.row({"optimal", std::to_string(p.devices), std::isinf(p.bound) ? "inf" : format_double(p.bound)});
  for (std::size_t k = 0; k < t.random.size(); ++k) csv.row({"random", std::to_string(k), format_double(t.random[k])});
  return csv.str();
}

struct Robustness {
  double original = 0.0;
  std::vector<double> values;  // one per repeat
  double mean = 0.0;
  double stddev = 0.0;  // population
};

// Re-scores `depl` on `repeats` perturbed copies of the instance. Each copy is
// scored against its own empty-deployment baseline.
inline Robustness robustness(const Instance& inst, const Deployment& depl, double fraction, std::size_t repeats,
                             std::uint64_t seed, const PlanOptions& plan_opts = {}) {
  if (repeats == 0) throw InputError("repeats must be positive");
  Robustness out;
  out.original = RiskEvaluator(inst, plan_opts).risk(depl).value;
  for (std::size_t i = 0; i < repeats; ++i) {
    const Instance changed = perturb(inst, fraction, SplitMix64::derived(seed, i).next());
    out.values.push_back(RiskEvaluator(changed, plan_opts).risk(depl).value);
  }
  // Shifted by the first sample: identical samples give that sample back
  // exactly instead of a rounded sum / n.
  const double pivot = out.values.front();
  double shift = 0.0;
  for (double v : out.values) shift += v - pivot;
  out.mean = pivot + shift / static_cast<double>(repeats);
  double sq = 0.0;
  for (double v : out.values) sq += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(sq / static_cast<double>(repeats));
  return out;
}

}  // namespace agraph
