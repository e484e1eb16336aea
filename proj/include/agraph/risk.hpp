#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "agraph/error.hpp"
#include "agraph/graphgen.hpp"
#include "agraph/plans.hpp"

namespace agraph {

// Plan metrics of the empty deployment; every risk score is relative to it.
struct Baseline {
  PlanMetrics metrics;

  explicit Baseline(const PlanMetrics& m) : metrics(m) {
    if (m.opt_len == 0 || m.opt_cnt == 0 || !(m.opt_exp > 0.0) || !(m.opt_prv > 0.0))
      throw InfeasibleError("baseline metrics must all be positive (is the goal reachable without devices?)");
  }
};

inline constexpr std::array<std::string_view, 4> kRiskComponentNames = {"opt_len", "opt_cnt", "opt_exp", "opt_prv"};

// Sum over the four metrics of (value / baseline - 1).
struct RiskScore {
  double value = 0.0;
  std::array<double, 4> components{};  // in kRiskComponentNames order

  friend bool operator==(const RiskScore&, const RiskScore&) = default;
};

inline RiskScore risk_score(const PlanMetrics& m, const Baseline& base) {
  const PlanMetrics& b = base.metrics;
  RiskScore r;
  r.components = {
      static_cast<double>(m.opt_len) / static_cast<double>(b.opt_len) - 1.0,
      static_cast<double>(m.opt_cnt) / static_cast<double>(b.opt_cnt) - 1.0,
      m.opt_exp / b.opt_exp - 1.0,
      m.opt_prv / b.opt_prv - 1.0,
  };
  r.value = r.components[0] + r.components[1] + r.components[2] + r.components[3];
  return r;
}

// Risk is assumed never to drop below the empty deployment's. Returns a
// diagnostic when an instance breaks that assumption; the score is untouched.
inline std::optional<std::string> monotonicity_check(const RiskScore& r) {
  if (r.value < 0.0)
    return "risk " + std::to_string(r.value) + " is below the empty-deployment baseline; "
           "deployment added a shorter attack plan";
  return std::nullopt;
}

struct Evaluation {
  PlanMetrics metrics;
  RiskScore risk;
};

// Scores deployments of one instance: graph compile, shortest plans, risk.
// Holds references to the instance, which must outlive the evaluator.
class RiskEvaluator {
 public:
  explicit RiskEvaluator(const Instance& inst, PlanOptions plan_opts = {})
      : inst_(&inst),
        compiler_(inst.network, inst.layout),
        plan_opts_(plan_opts),
        baseline_(shortest_plan_metrics(compiler_.build(Deployment{}), plan_opts_)) {}

  const Instance& instance() const { return *inst_; }
  const Baseline& baseline() const { return baseline_; }
  const GraphCompiler& compiler() const { return compiler_; }

  PlanMetrics metrics(const Deployment& depl) const {
    return shortest_plan_metrics(compiler_.build(depl), plan_opts_);
  }

  Evaluation evaluate(const Deployment& depl) const {
    ++evaluations_;
    Evaluation e;
    e.metrics = metrics(depl);
    e.risk = risk_score(e.metrics, baseline_);
    return e;
  }

  RiskScore risk(const Deployment& depl) const { return evaluate(depl).risk; }

  std::uint64_t evaluations() const { return evaluations_; }

 private:
  const Instance* inst_;
  GraphCompiler compiler_;
  PlanOptions plan_opts_;
  Baseline baseline_;
  mutable std::uint64_t evaluations_ = 0;
};

}  // namespace agraph
