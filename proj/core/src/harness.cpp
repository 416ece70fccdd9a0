// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#include "mlp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

#include "mlp/bounds.hpp"

namespace mlp {
namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Plain recursive estimator with its own generator, sharing no code with
// the engine. Used as the independent side of the ladder.
class ReferenceMlp {
 public:
  ReferenceMlp(const PdeProblem& problem, std::uint64_t M, double e,
               std::uint64_t seed)
      : p_(problem), m_(M), e_(e), rng_(seed) {}

  std::vector<double> estimate(int n, double t, const std::vector<double>& x) {
    const std::size_t d = x.size();
    std::vector<double> out(d + 1, 0.0);
    if (n <= 0) return out;
    const double tau = p_.horizon() - t;
    const double gx = p_.g(x);
    out[0] = gx;

    const double outer = std::pow(static_cast<double>(m_), n);
    for (double i = 0; i < outer; ++i) {
      std::vector<double> z = gaussian(d), y(d);
      for (std::size_t k = 0; k < d; ++k) y[k] = x[k] + std::sqrt(tau) * z[k];
      const double diff = p_.g(y) - gx;
      out[0] += diff / outer;
      for (std::size_t k = 0; k < d; ++k) {
        out[k + 1] += diff * z[k] / std::sqrt(tau) / outer;
      }
    }
    for (int l = 0; l < n; ++l) {
      const double count = std::pow(static_cast<double>(m_), n - l);
      for (double i = 0; i < count; ++i) {
        const double r = fraction();
        std::vector<double> z = gaussian(d), xi(d);
        for (std::size_t k = 0; k < d; ++k) {
          xi[k] = x[k] + std::sqrt(tau * r) * z[k];
        }
        const double s = t + tau * r;
        const auto up = estimate(l, s, xi);
        double diff = p_.f(s, xi, up[0], std::span(up).subspan(1));
        if (l >= 1) {
          const auto down = estimate(l - 1, s, xi);
          diff -= p_.f(s, xi, down[0], std::span(down).subspan(1));
        }
        const double w = tau / (e_ * std::pow(r, e_ - 1.0));
        out[0] += w * diff / count;
        for (std::size_t k = 0; k < d; ++k) {
          out[k + 1] += w * diff * z[k] / std::sqrt(tau * r) / count;
        }
      }
    }
    return out;
  }

  std::vector<double> gaussian(std::size_t d) {
    std::vector<double> z(d);
    for (double& v : z) v = normal_(rng_);
    return z;
  }

  double fraction() {
    double u;
    do {
      u = uniform_(rng_);
    } while (u <= 0.0);
    return std::pow(u, 1.0 / e_);
  }

 private:
  const PdeProblem& p_;
  std::uint64_t m_;
  double e_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// "0.25" or "1/4"; trailing characters are an error.
double parse_ratio(const std::string& text) {
  const auto slash = text.find('/');
  std::size_t used = 0;
  const std::string head = text.substr(0, slash);
  const double num = std::stod(head, &used);
  if (used != head.size()) throw std::invalid_argument(text);
  if (slash == std::string::npos) return num;
  const std::string tail = text.substr(slash + 1);
  const double den = std::stod(tail, &used);
  if (used != tail.size() || den == 0.0) throw std::invalid_argument(text);
  return num / den;
}

}  // namespace

MRule parse_m_rule(const std::string& text) {
  MRule rule;
  const std::string fixed = "fixed:";
  const std::string power = "floor-n^";
  try {
    if (text.rfind(fixed, 0) == 0) {
      rule.fixed = true;
      const std::string digits = text.substr(fixed.size());
      std::size_t used = 0;
      const long long m = std::stoll(digits, &used);
      if (used != digits.size()) throw std::invalid_argument(digits);
      if (m < 1) throw Error(ErrorCode::InvalidConfig, "fixed M must be >= 1");
      rule.base = static_cast<std::uint64_t>(m);
      return rule;
    }
    if (text.rfind(power, 0) == 0) {
      rule.exponent = parse_ratio(text.substr(power.size()));
      if (!(rule.exponent >= 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "M-rule exponent must be >= 0");
      }
      return rule;
    }
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::InvalidConfig,
              "M rule must be floor-n^Q or fixed:K, got '" + text + "'");
}

std::vector<ScheduleEntry> make_schedule(int n_max, const MRule& rule) {
  std::vector<ScheduleEntry> out;
  for (int n = 1; n <= n_max; ++n) {
    out.push_back({n, rule.fixed ? rule.base : schedule_base(n, rule.exponent)});
  }
  return out;
}

double case_error_bound(const BenchmarkCase& bench, int n, std::uint64_t M,
                        double p, double time_cdf_exponent,
                        double canonical_t, std::span<const double> xi) {
  const double q = norm_exponent(p);
  ErrorBoundInput in;
  in.p = p;
  in.density_exponent = 1.0 - time_cdf_exponent;
  in.depth = n;
  in.base = M;
  in.horizon = bench.params.horizon;
  in.t = canonical_t;
  in.regularity = case_regularity(bench, canonical_t, xi, q);
  in.solution_norm = case_solution_norm(bench, canonical_t, xi, q);
  return error_bound(in);
}

std::vector<ConvergenceRow> run_convergence(
    const BenchmarkCase& bench, const std::vector<ScheduleEntry>& schedule,
    const ConvergenceOptions& options) {
  const std::size_t d = bench.problem.dimension();
  const double t = options.t.value_or(default_query_time(bench));
  const std::vector<double> x =
      options.x.value_or(std::vector<double>(d, 0.0));
  const ExactField reference = bench.exact(t, x);
  const double canonical_t = to_canonical(bench.problem).time_map(t);

  std::vector<ConvergenceRow> rows;
  for (const auto& entry : schedule) {
    MlpConfig config;
    config.depth = entry.n;
    config.base = entry.M;
    config.time_cdf_exponent = options.time_cdf_exponent;
    config.root_seed = options.seed;
    config.replications = options.replications;

    const auto start = std::chrono::steady_clock::now();
    const auto estimates = solve(bench.problem, config, t, x, options.engine);
    const auto stop = std::chrono::steady_clock::now();

    ConvergenceRow row;
    row.case_name = bench.name;
    row.n = entry.n;
    row.M = entry.M;
    row.replications = options.replications;
    const RmseResult err = rmse(estimates, reference.value, reference.gradient);
    row.rmse_value = err.value;
    row.rmse_grad_max = err.gradient_max;
    row.combined_error = err.combined;
    row.error_bound = case_error_bound(bench, entry.n, entry.M, options.p,
                                       options.time_cdf_exponent, canonical_t,
                                       x);
    row.draws = estimates.front().draws;
    row.wall_seconds = std::chrono::duration<double>(stop - start).count();
    row.gradient_sq_errors.assign(d, {});
    for (const auto& est : estimates) {
      const double dv = est.value - reference.value;
      row.value_sq_errors.push_back(dv * dv);
      for (std::size_t i = 0; i < d; ++i) {
        const double dg = est.gradient[i] - reference.gradient[i];
        row.gradient_sq_errors[i].push_back(dg * dg);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows,
               bool timing) {
  out << "case,n,M,replications,rmse_value,rmse_grad_max,combined_error,"
         "error_bound,draws,wall_seconds\n";
  for (const auto& r : rows) {
    out << r.case_name << ',' << r.n << ',' << r.M << ',' << r.replications
        << ',' << format_double(r.rmse_value) << ','
        << format_double(r.rmse_grad_max) << ','
        << format_double(r.combined_error) << ','
        << format_double(r.error_bound) << ',' << r.draws << ','
        << format_double(timing ? r.wall_seconds : 0.0) << '\n';
  }
}

double combined_error_ucl(const ConvergenceRow& row) {
  auto ucl = [](const std::vector<double>& v) {
    return mean(v) + 1.645 * sample_sd(v) / std::sqrt(static_cast<double>(v.size()));
  };
  double grad = 0.0;
  for (const auto& g : row.gradient_sq_errors) grad = std::max(grad, ucl(g));
  return std::sqrt(ucl(row.value_sq_errors) + grad);
}

LadderResult unbiasedness_ladder(const BenchmarkCase& bench, int n,
                                 std::uint64_t M, std::uint64_t samples,
                                 std::uint64_t seed,
                                 std::span<const double> x,
                                 const EngineOptions& options) {
  const CanonicalProblem canonical = to_canonical(bench.problem);
  const PdeProblem& problem = canonical.problem;
  const std::size_t d = problem.dimension();
  const double e = 0.5;
  const double t = 0.0;

  MlpConfig config;
  config.depth = n;
  config.base = M;
  config.time_cdf_exponent = e;
  config.root_seed = seed;
  config.replications = samples;
  const auto lhs = replicate(problem, config, t, x, options);

  // Right-hand side: one Brownian step for g, one weighted step for f with
  // an independent U_{n-1} at the sampled point.
  ReferenceMlp reference(problem, M, e, seed ^ 0x5DEECE66DULL);
  const double tau = problem.horizon() - t;
  const std::vector<double> x0(x.begin(), x.end());
  std::vector<std::vector<double>> rhs(d + 1), lhs_cols(d + 1);
  for (std::uint64_t k = 0; k < samples; ++k) {
    std::vector<double> sample(d + 1, 0.0);
    const auto z = reference.gaussian(d);
    std::vector<double> y(d);
    for (std::size_t i = 0; i < d; ++i) y[i] = x0[i] + std::sqrt(tau) * z[i];
    const double gy = problem.g(y);
    sample[0] += gy;
    for (std::size_t i = 0; i < d; ++i) sample[i + 1] += gy * z[i] / std::sqrt(tau);

    const double r = reference.fraction();
    const auto zz = reference.gaussian(d);
    const double s = t + tau * r;
    std::vector<double> xi(d);
    for (std::size_t i = 0; i < d; ++i) xi[i] = x0[i] + std::sqrt(tau * r) * zz[i];
    const auto inner = reference.estimate(n - 1, s, xi);
    const double w = tau * std::pow(r, 1.0 - e) / e;
    const double fv = w * problem.f(s, xi, inner[0], std::span(inner).subspan(1));
    sample[0] += fv;
    for (std::size_t i = 0; i < d; ++i) {
      sample[i + 1] += fv * zz[i] / std::sqrt(tau * r);
    }
    for (std::size_t i = 0; i <= d; ++i) rhs[i].push_back(sample[i]);
  }
  for (const auto& est : lhs) {
    lhs_cols[0].push_back(est.value);
    for (std::size_t i = 0; i < d; ++i) lhs_cols[i + 1].push_back(est.gradient[i]);
  }

  LadderResult out;
  out.n = n;
  out.samples = samples;
  const double root_n = std::sqrt(static_cast<double>(samples));
  for (std::size_t i = 0; i <= d; ++i) {
    out.lhs_mean.push_back(mean(lhs_cols[i]));
    out.lhs_stderr.push_back(sample_sd(lhs_cols[i]) / root_n);
    out.rhs_mean.push_back(mean(rhs[i]));
    out.rhs_stderr.push_back(sample_sd(rhs[i]) / root_n);
    const double joint = std::hypot(out.lhs_stderr[i], out.rhs_stderr[i]);
    const double gap = std::abs(out.lhs_mean[i] - out.rhs_mean[i]);
    out.max_z = std::max(out.max_z, joint > 0.0 ? gap / joint
                                                : (gap > 0.0 ? INFINITY : 0.0));
  }
  return out;
}

double ks_time_fraction(double e, std::size_t draws, std::uint64_t seed) {
  RandomStream stream(PathDigest::root(seed));
  DrawLedger ledger;
  std::vector<double> r(draws);
  for (double& v : r) v = sample_time_fraction(stream, e, ledger);
  std::sort(r.begin(), r.end());
  const double n = static_cast<double>(draws);
  double stat = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double cdf = std::pow(r[i], e);
    stat = std::max({stat, (i + 1.0) / n - cdf, cdf - i / n});
  }
  return stat;
}

double ks_critical_1pct(std::size_t n) {
  return 1.6276 / std::sqrt(static_cast<double>(n));
}

bool BatteryReport::all_passed() const noexcept {
  return std::all_of(entries.begin(), entries.end(),
                     [](const BatteryEntry& e) { return e.passed; });
}

}  // namespace mlp
