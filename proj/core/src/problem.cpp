// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#include "mlp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace mlp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroDimension: return "ZeroDimension";
    case ErrorCode::NonpositiveHorizon: return "NonpositiveHorizon";
    case ErrorCode::ExponentOutOfRange: return "ExponentOutOfRange";
    case ErrorCode::NegativeLipschitz: return "NegativeLipschitz";
    case ErrorCode::LipschitzSizeMismatch: return "LipschitzSizeMismatch";
    case ErrorCode::MissingCallable: return "MissingCallable";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::QueryAtTerminalTime: return "QueryAtTerminalTime";
    case ErrorCode::QueryOutOfDomain: return "QueryOutOfDomain";
    case ErrorCode::NotCanonical: return "NotCanonical";
    case ErrorCode::DepthCostGuard: return "DepthCostGuard";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NonIntegrable: return "NonIntegrable";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::AdmissibilityViolated: return "AdmissibilityViolated";
    case ErrorCode::NoFeasibleDepth: return "NoFeasibleDepth";
    case ErrorCode::UnknownCase: return "UnknownCase";
  }
  return "Unknown";
}

PdeProblem::PdeProblem(std::size_t dimension, double horizon,
                       TerminalFn terminal, NonlinearityFn nonlinearity,
                       std::vector<double> lipschitz_solution,
                       std::vector<double> lipschitz_space,
                       TimeConvention convention)
    : dimension_(dimension),
      horizon_(horizon),
      terminal_(std::move(terminal)),
      nonlinearity_(std::move(nonlinearity)),
      lipschitz_solution_(std::move(lipschitz_solution)),
      lipschitz_space_(std::move(lipschitz_space)),
      convention_(convention) {}

PdeProblem PdeProblem::forward(std::size_t dimension, double horizon,
                               TerminalFn terminal, GradientNonlinearityFn f,
                               std::vector<double> lipschitz_solution,
                               std::vector<double> lipschitz_space) {
  NonlinearityFn lifted;
  if (f) {
    lifted = [f = std::move(f)](double, std::span<const double>, double y,
                                std::span<const double> z) { return f(y, z); };
  }
  return PdeProblem(dimension, horizon, std::move(terminal), std::move(lifted),
                    std::move(lipschitz_solution), std::move(lipschitz_space),
                    TimeConvention::ForwardFullLaplacian);
}

ThetaPath ThetaPath::extended(std::int64_t a) const {
  std::vector<std::int64_t> out;
  out.reserve(elements_.size() + 1);
  out.assign(elements_.begin(), elements_.end());
  out.push_back(a);
  return ThetaPath(std::move(out));
}

ThetaPath ThetaPath::extended(std::int64_t a, std::int64_t b) const {
  std::vector<std::int64_t> out;
  out.reserve(elements_.size() + 2);
  out.assign(elements_.begin(), elements_.end());
  out.push_back(a);
  out.push_back(b);
  return ThetaPath(std::move(out));
}

std::string to_string(const ThetaPath& path) {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k) os << ',';
    os << path.elements()[k];
  }
  os << ')';
  return os.str();
}

std::vector<Violation> validate_config(const MlpConfig& config) {
  std::vector<Violation> out;
  const double e = config.time_cdf_exponent;
  if (!(e > 0.0 && e < 1.0)) {
    out.push_back({ErrorCode::ExponentOutOfRange, "time_cdf_exponent",
                   "must lie strictly inside (0, 1)"});
  }
  if (config.depth < 0) {
    out.push_back({ErrorCode::InvalidConfig, "depth", "must be >= 0"});
  }
  if (config.base < 1) {
    out.push_back({ErrorCode::InvalidConfig, "base", "must be >= 1"});
  }
  if (config.replications < 1) {
    out.push_back({ErrorCode::InvalidConfig, "replications", "must be >= 1"});
  }
  return out;
}

std::vector<Violation> validate_problem(const PdeProblem& problem,
                                        const MlpConfig& config) {
  std::vector<Violation> out;
  const std::size_t d = problem.dimension();
  if (d == 0) {
    out.push_back({ErrorCode::ZeroDimension, "dimension", "must be >= 1"});
  }
  if (!(problem.horizon() > 0.0) || !std::isfinite(problem.horizon())) {
    out.push_back({ErrorCode::NonpositiveHorizon, "horizon",
                   "must be a finite positive number"});
  }
  if (!problem.terminal()) {
    out.push_back({ErrorCode::MissingCallable, "terminal_data", "not set"});
  }
  if (!problem.nonlinearity()) {
    out.push_back({ErrorCode::MissingCallable, "nonlinearity", "not set"});
  }
  if (problem.lipschitz_solution().size() != d + 1) {
    out.push_back({ErrorCode::LipschitzSizeMismatch, "lipschitz_solution",
                   "expected d + 1 constants"});
  }
  if (problem.lipschitz_space().size() != d) {
    out.push_back({ErrorCode::LipschitzSizeMismatch, "lipschitz_space",
                   "expected d constants"});
  }
  auto negative = [](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(),
                       [](double c) { return !(c >= 0.0); });
  };
  if (negative(problem.lipschitz_solution())) {
    out.push_back({ErrorCode::NegativeLipschitz, "lipschitz_solution",
                   "constants must be >= 0"});
  }
  if (negative(problem.lipschitz_space())) {
    out.push_back({ErrorCode::NegativeLipschitz, "lipschitz_space",
                   "constants must be >= 0"});
  }
  auto cfg = validate_config(config);
  out.insert(out.end(), cfg.begin(), cfg.end());
  return out;
}

void require_valid(const PdeProblem& problem, const MlpConfig& config) {
  auto violations = validate_problem(problem, config);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw Error(v.code, v.field + " " + v.message);
  }
}

CanonicalProblem to_canonical(const PdeProblem& problem) {
  if (problem.is_canonical()) {
    return {problem, TimeMap{}};
  }
  const double horizon = problem.horizon();
  NonlinearityFn half;
  if (problem.nonlinearity()) {
    half = [f = problem.nonlinearity(), horizon](
               double s, std::span<const double> x, double y,
               std::span<const double> z) {
      return 0.5 * f(horizon - 0.5 * s, x, y, z);
    };
  }
  std::vector<double> lip = problem.lipschitz_solution();
  for (double& c : lip) c *= 0.5;
  PdeProblem canonical(problem.dimension(), 2.0 * horizon, problem.terminal(),
                       std::move(half), std::move(lip),
                       problem.lipschitz_space(),
                       TimeConvention::BackwardHalfLaplacian);
  return {std::move(canonical), TimeMap{2.0 * horizon, -2.0}};
}

LipschitzAudit audit_lipschitz(const PdeProblem& problem, std::size_t pairs,
                               std::uint64_t seed, double spread) {
  const std::size_t d = problem.dimension();
  if (problem.lipschitz_solution().size() != d + 1 ||
      problem.lipschitz_space().size() != d) {
    throw Error(ErrorCode::LipschitzSizeMismatch,
                "audit needs d + 1 solution and d spatial constants");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, spread);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto& lip = problem.lipschitz_solution();
  const auto& kx = problem.lipschitz_space();
  std::vector<double> x(d), xb(d), z(d), zb(d);
  LipschitzAudit audit;
  auto record = [&](double diff, double bound) {
    ++audit.pairs_checked;
    constexpr double slack = 1e-12;
    if (bound > 0.0) {
      audit.worst_ratio = std::max(audit.worst_ratio, diff / bound);
    } else if (diff > slack) {
      audit.worst_ratio = std::numeric_limits<double>::infinity();
    }
    if (diff > bound * (1.0 + 1e-12) + slack) ++audit.violations;
  };

  for (std::size_t k = 0; k < pairs; ++k) {
    const double t = unit(rng) * problem.horizon();
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = normal(rng);
      xb[i] = normal(rng);
      z[i] = normal(rng);
      zb[i] = normal(rng);
    }
    const double y = normal(rng);
    const double yb = normal(rng);

    double bound = lip[0] * std::abs(y - yb);
    for (std::size_t i = 0; i < d; ++i) bound += lip[i + 1] * std::abs(z[i] - zb[i]);
    record(std::abs(problem.f(t, x, y, z) - problem.f(t, x, yb, zb)), bound);

    double gbound = 0.0;
    for (std::size_t i = 0; i < d; ++i) gbound += kx[i] * std::abs(x[i] - xb[i]);
    record(std::abs(problem.g(x) - problem.g(xb)), gbound);
  }
  return audit;
}

}  // namespace mlp
