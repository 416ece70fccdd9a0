// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "mlp/bounds.hpp"
#include "mlp/harness.hpp"
#include "mlp/integrals.hpp"

namespace mlp {
namespace {

template <class... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double correlation(std::uint64_t seed, const ThetaPath& a, const ThetaPath& b,
                   std::size_t n) {
  RandomStream sa = derive_stream(StreamKey{seed, a});
  RandomStream sb = derive_stream(StreamKey{seed, b});
  double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
  std::vector<double> xs(n), ys(n);
  for (std::size_t k = 0; k < n; ++k) {
    xs[k] = sa.next_uniform();
    ys[k] = sb.next_uniform();
    mx += xs[k];
    my += ys[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    syy += (ys[k] - my) * (ys[k] - my);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

void sampler_checks(std::uint64_t seed, const BatteryOptions& options,
                    std::vector<BatteryEntry>& out) {
  constexpr std::size_t kDraws = 100000;
  std::uint64_t offset = 0;
  for (double e : {0.3, 0.5, 0.7}) {
    const double ks = ks_time_fraction(e, kDraws, seed + 100 + offset++);
    const double crit = ks_critical_1pct(kDraws);
    out.push_back({fmt("time-fraction-ks e=%.1f", e), ks < crit,
                   fmt("D=%.5f critical=%.5f", ks, crit)});
  }

  RandomStream stream(PathDigest::root(seed + 1));
  DrawLedger ledger;
  std::vector<double> r(kDraws);
  for (double& v : r) v = sample_time_fraction(stream, 0.5, ledger);
  std::nth_element(r.begin(), r.begin() + kDraws / 2, r.end());
  const double median = r[kDraws / 2];
  out.push_back({"time-fraction-median e=0.5", std::abs(median - 0.25) < 0.01,
                 fmt("median=%.5f", median)});

  double sum = 0, sum_sq = 0;
  double z = 0.0;
  for (std::size_t k = 0; k < kDraws; ++k) {
    sample_gaussian(stream, std::span<double>(&z, 1), ledger);
    sum += z;
    sum_sq += z * z;
  }
  const double n = static_cast<double>(kDraws);
  const double m = sum / n;
  const double var = sum_sq / n - m * m;
  const bool moments_ok = std::abs(m) < 3.0 / std::sqrt(n) &&
                          std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / n);
  out.push_back({"gaussian-moments", moments_ok,
                 fmt("mean=%.5f var=%.5f", m, var)});

  double worst = 0.0;
  const ThetaPath pairs[][2] = {{{1}, {1, 0}},
                                {{1, 2, 3}, {1, -2, 3}},
                                {{0, -1}, {0, 1}},
                                {{}, {0}}};
  for (const auto& pair : pairs) {
    worst = std::max(worst, std::abs(correlation(seed, pair[0], pair[1], 10000)));
  }
  out.push_back({"stream-independence", worst < 0.04,
                 fmt("max |corr|=%.5f", worst)});

  const auto diag = single_step_second_moment(1.0, options.diagnostic_exponent,
                                              1, 1000000, seed + 2);
  const double gap = std::abs(diag.gradient_moment[0] - diag.predicted);
  const bool diag_ok = !diag.heavy_tail && gap <= 3.0 * diag.gradient_stderr[0];
  out.push_back({fmt("variance-diagnostic e=%.3f", options.diagnostic_exponent),
                 diag_ok,
                 fmt("moment=%.4f predicted=%.4f se=%.4f%s",
                     diag.gradient_moment[0], diag.predicted,
                     diag.gradient_stderr[0],
                     diag.heavy_tail ? " heavy-tail" : "")});
}

void integral_checks(std::vector<BatteryEntry>& out) {
  auto summarize = [&](const char* name,
                       const std::vector<IntegralCheck>& rows) {
    const auto failed = std::count_if(rows.begin(), rows.end(),
                                      [](const auto& r) { return !r.passed; });
    out.push_back({name, failed == 0,
                   fmt("%zu rows, %ld failed", rows.size(),
                       static_cast<long>(failed))});
  };
  summarize("integral-identity", verify_integral_identity());
  summarize("integral-ordering", verify_integral_ordering());
}

void ladder_checks(std::uint64_t seed, const BatteryOptions& options,
                   std::vector<BatteryEntry>& out) {
  const BenchmarkCase bench = make_case("grad-dependent-sine", {});
  const std::vector<double> x = evaluation_points(1)[1];
  EngineOptions engine;
  engine.weight = options.weight;
  for (int n : {1, 2}) {
    const auto res = unbiasedness_ladder(bench, n, 2, options.ladder_samples,
                                         seed, x, engine);
    out.push_back({fmt("unbiasedness-ladder n=%d", n), res.passed(),
                   fmt("max z=%.3f (value %.5f vs %.5f)", res.max_z,
                       res.lhs_mean[0], res.rhs_mean[0])});
  }
}

void cost_checks(std::uint64_t seed, std::vector<BatteryEntry>& out) {
  int mismatches = 0, cells = 0;
  for (std::size_t d : {1u, 3u}) {
    const BenchmarkCase bench = make_case("grad-dependent-sine", {d});
    const std::vector<double> x(d, 0.3);
    for (int n = 1; n <= 3; ++n) {
      for (std::uint64_t M = 1; M <= 3; ++M) {
        MlpConfig config;
        config.depth = n;
        config.base = M;
        config.root_seed = seed;
        const auto est = evaluate(bench.problem, config, {1}, 0.0, x);
        ++cells;
        if (est.draws != cost_rv(d, n, M) ||
            cost_rv(d, n, M) > cost_bound_closed(d, n, M)) {
          ++mismatches;
        }
      }
    }
  }
  out.push_back({"cost-ledger", mismatches == 0,
                 fmt("%d cells, %d mismatches", cells, mismatches)});
}

void trend_checks(std::uint64_t seed, const BatteryOptions& options,
                  std::vector<BatteryEntry>& out) {
  ConvergenceOptions conv;
  conv.replications = options.convergence_replications;
  conv.seed = seed;
  // M = n: at M = floor(n^{1/4}) = 1 the error does not shrink with n.
  const auto schedule = make_schedule(5, MRule{false, 1.0, 1});
  for (const auto& name : builtin_case_names()) {
    const BenchmarkCase bench = make_case(name, {});
    const auto rows = run_convergence(bench, schedule, conv);
    double worst = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const double prev = rows[k - 1].rmse_value;
      const double ratio = prev > 0.0 ? rows[k].rmse_value / prev : 1.0;
      worst = std::max(worst, ratio);
    }
    out.push_back({"convergence-trend " + name, worst <= 1.5,
                   fmt("worst ratio=%.3f", worst)});
  }
}

}  // namespace

BatteryReport run_test_battery(std::uint64_t seed,
                               const BatteryOptions& options) {
  BatteryReport report;
  auto guard = [&](const char* name, auto&& body) {
    try {
      body();
    } catch (const std::exception& ex) {
      report.entries.push_back({name, false, ex.what()});
    }
  };
  guard("sampler", [&] { sampler_checks(seed, options, report.entries); });
  guard("integrals", [&] { integral_checks(report.entries); });
  guard("ladder", [&] { ladder_checks(seed, options, report.entries); });
  guard("cost", [&] { cost_checks(seed, report.entries); });
  guard("trend", [&] { trend_checks(seed, options, report.entries); });
  return report;
}

}  // namespace mlp
