// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mlp/benchmarks.hpp"
#include "mlp/engine.hpp"

namespace mlp {

struct ScheduleEntry {
  int n = 1;
  std::uint64_t M = 1;
};

/// "floor-n^Q" gives M = floor(n^Q) (at least 1), with Q a decimal or a
/// fraction such as 1/4; "fixed:K" gives M = K.
struct MRule {
  bool fixed = false;
  double exponent = 0.25;
  std::uint64_t base = 1;
};

MRule parse_m_rule(const std::string& text);
std::vector<ScheduleEntry> make_schedule(int n_max, const MRule& rule);

struct ConvergenceOptions {
  std::uint64_t replications = 100;
  std::uint64_t seed = 0;
  double time_cdf_exponent = 0.5;
  double p = 4.0;                 // error bound exponent
  std::optional<double> t;        // problem's own time; default_query_time()
  std::optional<std::vector<double>> x;  // default 0
  EngineOptions engine;
};

struct ConvergenceRow {
  std::string case_name;
  int n = 0;
  std::uint64_t M = 1;
  std::uint64_t replications = 0;
  double rmse_value = 0.0;
  double rmse_grad_max = 0.0;
  double combined_error = 0.0;
  double error_bound = 0.0;
  std::uint64_t draws = 0;  // per estimate
  double wall_seconds = 0.0;
  /// Squared errors of each replication in replication order: the value,
  /// then one vector per gradient coordinate.
  std::vector<double> value_sq_errors;
  std::vector<std::vector<double>> gradient_sq_errors;
};

/// One row per schedule entry, in schedule order. The error bound uses the
/// case's exact L^q norms with q = 2p/(p-2) and density exponent 1 - e.
std::vector<ConvergenceRow> run_convergence(
    const BenchmarkCase& bench, const std::vector<ScheduleEntry>& schedule,
    const ConvergenceOptions& options);

/// Error bound for one (n, M) of a builtin case at the canonical query.
double case_error_bound(const BenchmarkCase& bench, int n, std::uint64_t M,
                        double p, double time_cdf_exponent,
                        double canonical_t, std::span<const double> xi);

/// CSV with header
/// case,n,M,replications,rmse_value,rmse_grad_max,combined_error,error_bound,draws,wall_seconds
/// When `timing` is false wall_seconds is written as 0.
void write_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows,
               bool timing = true);

/// One-sided 95% upper confidence limit of the combined error: each mean
/// squared error is raised by 1.645 standard errors before combining.
double combined_error_ucl(const ConvergenceRow& row);

/// Empirical mean of U_n against an independent nested simulation of the
/// one-step Feynman-Kac right-hand side.
struct LadderResult {
  int n = 0;
  std::uint64_t samples = 0;
  std::vector<double> lhs_mean, lhs_stderr;
  std::vector<double> rhs_mean, rhs_stderr;
  double max_z = 0.0;  // worst |lhs - rhs| / joint standard error
  bool passed(double sigmas = 4.0) const noexcept { return max_z <= sigmas; }
};

LadderResult unbiasedness_ladder(const BenchmarkCase& bench, int n,
                                 std::uint64_t M, std::uint64_t samples,
                                 std::uint64_t seed,
                                 std::span<const double> x,
                                 const EngineOptions& options = {});

/// Kolmogorov-Smirnov statistic of `draws` time fractions against b^e.
double ks_time_fraction(double e, std::size_t draws, std::uint64_t seed);
/// 1% critical value of the one-sample KS statistic, asymptotic form.
double ks_critical_1pct(std::size_t n);

struct BatteryEntry {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct BatteryReport {
  std::vector<BatteryEntry> entries;
  bool all_passed() const noexcept;
};

struct BatteryOptions {
  WeightFn weight = &importance_weight;  // mutation hook for the ladder
  double diagnostic_exponent = 0.5;      // e used by the variance diagnostic
  std::uint64_t ladder_samples = 100000;
  std::uint64_t convergence_replications = 100;
};

BatteryReport run_test_battery(std::uint64_t seed,
                               const BatteryOptions& options = {});

}  // namespace mlp
