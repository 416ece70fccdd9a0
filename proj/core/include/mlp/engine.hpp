// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlp/problem.hpp"
#include "mlp/sampler.hpp"

namespace mlp {

/// Reciprocal density of the sampled time point: (T - t) r^{1-e} / e.
double importance_weight(double tau, double r, double e) noexcept;

using WeightFn = double (*)(double tau, double r, double e);

struct EngineOptions {
  double cost_budget = 1e9;  // scalar draws per estimate
  unsigned threads = 0;      // 0 picks hardware_concurrency()
  WeightFn weight = &importance_weight;
};

/// Budget from MLP_COST_BUDGET when set and parseable, else `fallback`.
double cost_budget_from_env(double fallback = 1e9);

/// One level of the top-level sum: M^{n-l} samples of the difference
/// F(U_l) - [l >= 1] F(U_{l-1}) drawn on paths (theta, l, i) and
/// (theta, -l, i).
struct LevelTerm {
  int level = 0;
  std::uint64_t inner_count = 0;
  ThetaPath plus_prefix;   // (theta, l)
  ThetaPath minus_prefix;  // (theta, -l); empty at l = 0
  bool has_minus() const noexcept { return level >= 1; }
};

std::vector<LevelTerm> level_terms(const MlpConfig& config,
                                   const ThetaPath& theta);

/// Joint estimate of (u, grad u)(t, x) for a problem in backward form.
///
/// Throws NotCanonical, QueryAtTerminalTime, QueryOutOfDomain,
/// DimensionMismatch and DepthCostGuard, plus any validation error.
FieldEstimate evaluate(const PdeProblem& problem, const MlpConfig& config,
                       const ThetaPath& theta, double t,
                       std::span<const double> x,
                       const EngineOptions& options = {});

/// config.replications independent estimates on paths (1), (2), ...; the
/// result does not depend on the thread count.
std::vector<FieldEstimate> replicate(const PdeProblem& problem,
                                     const MlpConfig& config, double t,
                                     std::span<const double> x,
                                     const EngineOptions& options = {});

/// replicate() for a problem in either convention; `t` is in the problem's
/// own time.
std::vector<FieldEstimate> solve(const PdeProblem& problem,
                                 const MlpConfig& config, double t,
                                 std::span<const double> x,
                                 const EngineOptions& options = {});

struct RmseResult {
  double value = 0.0;
  double gradient_max = 0.0;
  double combined = 0.0;  // sqrt(value^2 + gradient_max^2)
};

RmseResult rmse(std::span<const FieldEstimate> estimates,
                double reference_value,
                std::span<const double> reference_gradient);

}  // namespace mlp
