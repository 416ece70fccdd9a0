// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: solve, converge, verify-integrals, cost,
// schedule, battery.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mlp/benchmarks.hpp"
#include "mlp/bounds.hpp"
#include "mlp/engine.hpp"
#include "mlp/harness.hpp"
#include "mlp/integrals.hpp"
#include "mlp/moments.hpp"

namespace {

struct CaseFlags {
  std::string name = "grad-dependent-sine";
  std::size_t d = 1;
  double horizon = 1.0;
  double lambda = 0.25;
  double c = 0.5;
};

void add_case_flags(CLI::App* cmd, CaseFlags& f) {
  cmd->add_option("--case", f.name, "Builtin case name")
      ->check(CLI::IsMember(mlp::builtin_case_names()));
  cmd->add_option("--d", f.d, "Dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--T", f.horizon, "Horizon of the backward form");
  cmd->add_option("--lambda", f.lambda, "Growth rate of the sine cases");
  cmd->add_option("--c", f.c, "Gradient coupling of the sine cases");
}

mlp::BenchmarkParams params_of(const CaseFlags& f) {
  return {f.d, f.horizon, f.lambda, f.c};
}

mlp::EngineOptions engine_options() {
  mlp::EngineOptions opts;
  opts.cost_budget = mlp::cost_budget_from_env(opts.cost_budget);
  return opts;
}

std::vector<double> query_point(const std::vector<double>& given,
                                std::size_t d) {
  if (given.empty()) return std::vector<double>(d, 0.0);
  if (given.size() == 1 && d > 1) return std::vector<double>(d, given[0]);
  return given;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) /
                   static_cast<double>(v.size()));
}

int run_solve(const CaseFlags& flags, int n, std::uint64_t M,
              std::uint64_t reps, std::uint64_t seed, double e,
              std::optional<double> t_opt, std::vector<double> x_in,
              const std::string& config_path, CLI::App* cmd) {
  CaseFlags f = flags;
  mlp::MlpConfig config{n, M, e, seed, reps};
  if (!config_path.empty()) {
    const auto file = mlp::load_case_config(config_path);
    if (cmd->count("--case") == 0) f.name = file.case_name;
    if (cmd->count("--d") == 0) f.d = file.params.dimension;
    if (cmd->count("--T") == 0) f.horizon = file.params.horizon;
    if (cmd->count("--lambda") == 0) f.lambda = file.params.lambda;
    if (cmd->count("--c") == 0) f.c = file.params.c;
    if (cmd->count("--n") == 0) config.depth = file.mlp.depth;
    if (cmd->count("--M") == 0) config.base = file.mlp.base;
    if (cmd->count("--e") == 0) config.time_cdf_exponent = file.mlp.time_cdf_exponent;
    if (cmd->count("--seed") == 0) config.root_seed = file.mlp.root_seed;
    if (cmd->count("--reps") == 0) config.replications = file.mlp.replications;
    if (cmd->count("--t") == 0 && file.t) t_opt = file.t;
    if (cmd->count("--x") == 0 && file.x) x_in = *file.x;
  }

  const mlp::BenchmarkCase bench = mlp::make_case(f.name, params_of(f));
  const double t = t_opt.value_or(mlp::default_query_time(bench));
  const std::vector<double> x = query_point(x_in, f.d);
  const auto estimates =
      mlp::solve(bench.problem, config, t, x, engine_options());
  const mlp::ExactField exact = bench.exact(t, x);

  std::vector<double> values;
  std::vector<std::vector<double>> grads(f.d);
  for (const auto& est : estimates) {
    values.push_back(est.value);
    for (std::size_t i = 0; i < f.d; ++i) grads[i].push_back(est.gradient[i]);
  }
  const auto err = mlp::rmse(estimates, exact.value, exact.gradient);

  std::printf("case %s  d=%zu  n=%d  M=%llu  e=%g  reps=%llu  t=%g\n",
              f.name.c_str(), f.d, config.depth,
              static_cast<unsigned long long>(config.base),
              config.time_cdf_exponent,
              static_cast<unsigned long long>(config.replications), t);
  std::printf("%-10s %16s %12s %16s\n", "component", "estimate", "stderr",
              "exact");
  std::printf("%-10s %16.8f %12.2e %16.8f\n", "u", mean(values),
              stderr_of(values), exact.value);
  for (std::size_t i = 0; i < f.d; ++i) {
    char label[32];
    std::snprintf(label, sizeof label, "du/dx%zu", i + 1);
    std::printf("%-10s %16.8f %12.2e %16.8f\n", label, mean(grads[i]),
                stderr_of(grads[i]), exact.gradient[i]);
  }
  std::printf("rmse value=%.6g  gradient max=%.6g  combined=%.6g\n",
              err.value, err.gradient_max, err.combined);
  std::printf("draws per estimate=%llu\n",
              static_cast<unsigned long long>(estimates.front().draws));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilevel Picard solver for semilinear heat equations"};
  app.require_subcommand(1);

  // solve
  CaseFlags solve_case;
  int solve_n = 2;
  std::uint64_t solve_m = 2, solve_reps = 10, solve_seed = 0;
  double solve_e = 0.5;
  std::optional<double> solve_t;
  std::vector<double> solve_x;
  std::string solve_config;
  auto* solve = app.add_subcommand("solve", "Estimate (u, grad u) at one point");
  add_case_flags(solve, solve_case);
  solve->add_option("--n", solve_n, "Picard depth")->check(CLI::NonNegativeNumber);
  solve->add_option("--M", solve_m, "Monte Carlo base")->check(CLI::PositiveNumber);
  solve->add_option("--reps", solve_reps, "Independent replications")
      ->check(CLI::PositiveNumber);
  solve->add_option("--seed", solve_seed, "Root seed");
  solve->add_option("--e", solve_e, "Time CDF exponent in (0, 1)");
  solve->add_option("--t", solve_t, "Query time in the case's own convention");
  solve->add_option("--x", solve_x, "Query point (one value broadcasts)")
      ->delimiter(',');
  solve->add_option("--config", solve_config, "Key-value run description");

  // converge
  CaseFlags conv_case;
  int conv_n_max = 5;
  std::string conv_rule = "floor-n^0.25";
  std::uint64_t conv_reps = 100, conv_seed = 0;
  double conv_e = 0.5, conv_p = 4.0;
  std::string conv_out;
  bool conv_no_timing = false;
  std::optional<double> conv_t;
  std::vector<double> conv_x;
  auto* converge = app.add_subcommand("converge", "Convergence table as CSV");
  add_case_flags(converge, conv_case);
  converge->add_option("--n-max", conv_n_max, "Largest depth")
      ->check(CLI::PositiveNumber);
  converge->add_option("--m-rule", conv_rule, "floor-n^Q or fixed:K");
  converge->add_option("--reps", conv_reps, "Replications per row")
      ->check(CLI::PositiveNumber);
  converge->add_option("--seed", conv_seed, "Root seed");
  converge->add_option("--e", conv_e, "Time CDF exponent in (0, 1)");
  converge->add_option("--p", conv_p, "Exponent p of the error bound");
  converge->add_option("--t", conv_t, "Query time in the case's own convention");
  converge->add_option("--x", conv_x, "Query point (one value broadcasts)")
      ->delimiter(',');
  converge->add_option("--out", conv_out, "CSV file (default stdout)");
  converge->add_flag("--no-timing", conv_no_timing,
                     "Write wall_seconds as 0 for byte-stable output");

  // verify-integrals
  auto* verify = app.add_subcommand("verify-integrals",
                                    "Closed forms against quadrature and bounds");

  // cost
  std::size_t cost_d = 1;
  int cost_n = 1;
  std::uint64_t cost_m = 1;
  auto* cost = app.add_subcommand("cost", "Exact draw count and its closed bound");
  cost->add_option("--d", cost_d, "Dimension")->required();
  cost->add_option("--n", cost_n, "Picard depth")->required();
  cost->add_option("--M", cost_m, "Monte Carlo base")->required();

  // schedule
  CaseFlags sched_case;
  double sched_eps = 0.1, sched_p = 4.0, sched_alpha = 0.5, sched_q = 0.25;
  int sched_max = 50;
  bool sched_estimate = false;
  auto* sched = app.add_subcommand("schedule",
                                   "Smallest depth whose error bound meets eps");
  add_case_flags(sched, sched_case);
  sched->add_option("--eps", sched_eps, "Target accuracy")->required();
  sched->add_option("--p", sched_p, "Exponent p of the error bound");
  sched->add_option("--alpha", sched_alpha,
                    "Density exponent a of (1-a) s^{-a}; engine e = 1 - a");
  sched->add_option("--q", sched_q, "M rule exponent: M = floor(n^q)");
  sched->add_option("--max-depth", sched_max, "Search limit");
  sched->add_flag("--estimate-moments", sched_estimate,
                  "Estimate the L^q moments by Monte Carlo instead of exactly");

  // battery
  std::uint64_t battery_seed = 0;
  bool battery_mutate = false;
  double battery_e = 0.5;
  auto* battery = app.add_subcommand("battery", "Statistical test battery");
  battery->add_option("--seed", battery_seed, "Root seed");
  battery->add_flag("--mutate-weight", battery_mutate,
                    "Replace the importance weight by (T-t) r / e");
  battery->add_option("--diagnostic-e", battery_e,
                      "Exponent for the second-moment diagnostic");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      return run_solve(solve_case, solve_n, solve_m, solve_reps, solve_seed,
                       solve_e, solve_t, solve_x, solve_config, solve);
    }

    if (converge->parsed()) {
      const auto bench = mlp::make_case(conv_case.name, params_of(conv_case));
      mlp::ConvergenceOptions opts;
      opts.replications = conv_reps;
      opts.seed = conv_seed;
      opts.time_cdf_exponent = conv_e;
      opts.p = conv_p;
      opts.t = conv_t;
      if (!conv_x.empty()) opts.x = query_point(conv_x, conv_case.d);
      opts.engine = engine_options();
      const auto rows = mlp::run_convergence(
          bench, mlp::make_schedule(conv_n_max, mlp::parse_m_rule(conv_rule)),
          opts);
      if (conv_out.empty()) {
        mlp::write_csv(std::cout, rows, !conv_no_timing);
      } else {
        std::ofstream file(conv_out);
        if (!file) {
          std::fprintf(stderr, "error: cannot write %s\n", conv_out.c_str());
          return 2;
        }
        mlp::write_csv(file, rows, !conv_no_timing);
      }
      return 0;
    }

    if (verify->parsed()) {
      auto rows = mlp::verify_integral_identity();
      const auto more = mlp::verify_integral_ordering();
      rows.insert(rows.end(), more.begin(), more.end());
      int failed = 0;
      std::printf("%-18s %-40s %16s %16s  %s\n", "check", "parameters", "lhs",
                  "rhs", "result");
      for (const auto& r : rows) {
        std::printf("%-18s %-40s %16.10g %16.10g  %s\n", r.name.c_str(),
                    r.params.c_str(), r.lhs, r.rhs, r.passed ? "PASS" : "FAIL");
        failed += r.passed ? 0 : 1;
      }
      std::printf("%zu checks, %d failed\n", rows.size(), failed);
      return failed == 0 ? 0 : 1;
    }

    if (cost->parsed()) {
      std::printf("cost_rv=%s\nclosed_bound=%s\n",
                  mlp::to_string(mlp::cost_rv(cost_d, cost_n, cost_m)).c_str(),
                  mlp::to_string(mlp::cost_bound_closed(cost_d, cost_n, cost_m))
                      .c_str());
      return 0;
    }

    if (sched->parsed()) {
      const auto bench = mlp::make_case(sched_case.name, params_of(sched_case));
      const std::vector<double> xi(sched_case.d, 0.0);
      const double q = mlp::norm_exponent(sched_p);
      mlp::ScheduleRequest req;
      req.target_eps = sched_eps;
      req.dimension = sched_case.d;
      if (sched_estimate) {
        const auto exact = mlp::case_regularity(bench, 0.0, xi, q);
        req.regularity = mlp::estimate_regularity(bench.problem, 0.0, xi, q, {},
                                                  exact.lipschitz_fx);
      } else {
        req.regularity = mlp::case_regularity(bench, 0.0, xi, q);
        req.solution_norm = mlp::case_solution_norm(bench, 0.0, xi, q);
      }
      req.p = sched_p;
      req.density_exponent = sched_alpha;
      req.m_exponent = sched_q;
      req.horizon = sched_case.horizon;
      req.max_depth = sched_max;
      const auto res = mlp::schedule(req);
      std::printf("N=%d\nM=%llu\npredicted_cost=%s\nbound=%.6g\nmoments=%s\n",
                  res.depth,
                  static_cast<unsigned long long>(res.base),
                  res.cost_saturated
                      ? ">2^128"
                      : mlp::to_string(res.predicted_cost).c_str(),
                  res.bound, sched_estimate ? "estimated" : "exact");
      return 0;
    }

    if (battery->parsed()) {
      mlp::BatteryOptions opts;
      opts.diagnostic_exponent = battery_e;
      if (battery_mutate) {
        opts.weight = [](double tau, double r, double e) {
          return tau * r / e;
        };
      }
      const auto report = mlp::run_test_battery(battery_seed, opts);
      for (const auto& e : report.entries) {
        std::printf("%s  %-40s %s\n", e.passed ? "PASS" : "FAIL",
                    e.name.c_str(), e.detail.c_str());
      }
      return report.all_passed() ? 0 : 1;
    }
  } catch (const mlp::Error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }
  return 0;
}
