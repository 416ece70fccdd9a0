// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlp/bounds.hpp"
#include "mlp/problem.hpp"

namespace mlp {

enum class CaseKind {
  LinearHeatQuadratic,   // g = |x|^2, f = 0
  GradFreeExponential,   // f = (lambda + 1/2) y
  GradDependentSine,     // adds c (sum z - grad-free correction)
  ForwardHeat,           // the previous case in forward time
};

struct BenchmarkParams {
  std::size_t dimension = 1;
  double horizon = 1.0;  // of the backward form; forward-heat uses T/2
  double lambda = 0.25;
  double c = 0.5;
};

struct ExactField {
  double value = 0.0;
  std::vector<double> gradient;
};

using ExactFn = std::function<ExactField(double t, std::span<const double> x)>;

/// A problem with a known solution. `exact` takes time in the problem's own
/// convention.
struct BenchmarkCase {
  std::string name;
  CaseKind kind;
  BenchmarkParams params;
  PdeProblem problem;
  ExactFn exact;
};

/// linear-heat-quadratic, grad-free-exponential, grad-dependent-sine,
/// forward-heat.
const std::vector<std::string>& builtin_case_names();

/// Builds a case and runs its residual check; throws UnknownCase for an
/// unknown name and InvalidConfig when the residual check fails.
BenchmarkCase make_case(const std::string& name,
                        const BenchmarkParams& params = {});

/// Query points 0 and (1, ..., 1)/sqrt(d).
std::vector<std::vector<double>> evaluation_points(std::size_t dimension);

struct ResidualReport {
  double max_residual = 0.0;       // |u_t + generator u + f|
  double max_gradient_error = 0.0; // exact gradient vs central differences
  std::size_t points = 0;
};

/// Finite-difference check of the PDE and of the exact gradient on a
/// sampled (t, x) grid.
ResidualReport residual_check(const BenchmarkCase& bench, std::size_t points,
                              std::uint64_t seed = 7);

/// Regularity constants and exact L^q moments on the backward form at the
/// canonical query (t, xi). Requires an even integer q; the suprema over the
/// time argument are taken on a grid.
RegularityData case_regularity(const BenchmarkCase& bench, double t,
                               std::span<const double> xi, double q);

/// sup_s max_i || u_i(s, xi + W_{s-t}) ||_q over the value and every
/// gradient coordinate, same conventions as case_regularity().
double case_solution_norm(const BenchmarkCase& bench, double t,
                          std::span<const double> xi, double q);

/// Canonical query time matching canonical t = 0 (forward time T for
/// forward-heat).
double default_query_time(const BenchmarkCase& bench);

/// Key-value run description for the builtin cases, e.g.
///   case = grad-dependent-sine
///   d = 5
///   lambda = 0.25
///   n = 3
///   x = 0.1, 0.2, 0.3, 0.4, 0.5
/// Blank lines and lines starting with '#' are skipped.
struct CaseConfig {
  std::string case_name = "grad-dependent-sine";
  BenchmarkParams params;
  MlpConfig mlp;
  std::optional<double> t;
  std::optional<std::vector<double>> x;
};

CaseConfig parse_case_config(const std::string& text);
CaseConfig load_case_config(const std::string& path);

}  // namespace mlp
