// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#include "mlp/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "mlp/bounds.hpp"

namespace mlp {
namespace {

std::uint64_t power(std::uint64_t m, int k) {
  std::uint64_t out = 1;
  for (int i = 0; i < k; ++i) out *= m;
  return out;
}

// Per-depth work buffers. A call at level n only touches slot n; its
// children run at lower levels, so no slot is live twice.
struct Scratch {
  std::vector<double> z, shifted, plus, minus, acc;
};

class Recursion {
 public:
  Recursion(const PdeProblem& problem, const MlpConfig& config,
            const EngineOptions& options)
      : problem_(problem),
        horizon_(problem.horizon()),
        d_(problem.dimension()),
        m_(config.base),
        e_(config.time_cdf_exponent),
        weight_(options.weight ? options.weight : &importance_weight),
        scratch_(static_cast<std::size_t>(std::max(config.depth, 0)) + 1) {
    for (auto& s : scratch_) {
      s.z.resize(d_);
      s.shifted.resize(d_);
      s.plus.resize(d_ + 1);
      s.minus.resize(d_ + 1);
      s.acc.resize(d_ + 1);
    }
  }

  void run(int n, const PathDigest& theta, double t,
           std::span<const double> x, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (n <= 0) return;

    Scratch& s = scratch_[static_cast<std::size_t>(n)];
    const double tau = horizon_ - t;
    const double sqrt_tau = std::sqrt(tau);
    const double gx = problem_.g(x);
    out[0] = gx;

    // Terminal term with the control variate g(x).
    const std::uint64_t outer = power(m_, n);
    std::fill(s.acc.begin(), s.acc.end(), 0.0);
    for (std::uint64_t i = 1; i <= outer; ++i) {
      RandomStream stream(theta.child(0, -static_cast<std::int64_t>(i)));
      sample_gaussian(stream, s.z, ledger_);
      for (std::size_t k = 0; k < d_; ++k) {
        s.shifted[k] = x[k] + sqrt_tau * s.z[k];
      }
      const double diff = problem_.g(s.shifted) - gx;
      s.acc[0] += diff;
      for (std::size_t k = 0; k < d_; ++k) {
        s.acc[k + 1] += diff * s.z[k] / sqrt_tau;
      }
    }
    for (std::size_t k = 0; k <= d_; ++k) {
      out[k] += s.acc[k] / static_cast<double>(outer);
    }

    for (int l = 0; l < n; ++l) {
      const std::uint64_t count = power(m_, n - l);
      std::fill(s.acc.begin(), s.acc.end(), 0.0);
      for (std::uint64_t i = 1; i <= count; ++i) {
        const auto idx = static_cast<std::int64_t>(i);
        const PathDigest plus_path = theta.child(l, idx);
        RandomStream stream(plus_path);
        const double r = sample_time_fraction(stream, e_, ledger_);
        sample_gaussian(stream, s.z, ledger_);

        const double step = tau * r;
        const double sqrt_step = std::sqrt(step);
        const double time = t + step;
        for (std::size_t k = 0; k < d_; ++k) {
          s.shifted[k] = x[k] + sqrt_step * s.z[k];
        }

        run(l, plus_path, time, s.shifted, s.plus);
        double diff = problem_.f(time, s.shifted, s.plus[0],
                                 std::span<const double>(s.plus).subspan(1));
        if (l >= 1) {
          run(l - 1, theta.child(-l, idx), time, s.shifted, s.minus);
          diff -= problem_.f(time, s.shifted, s.minus[0],
                             std::span<const double>(s.minus).subspan(1));
        }
        const double weighted = weight_(tau, r, e_) * diff;
        s.acc[0] += weighted;
        for (std::size_t k = 0; k < d_; ++k) {
          s.acc[k + 1] += weighted * s.z[k] / sqrt_step;
        }
      }
      for (std::size_t k = 0; k <= d_; ++k) {
        out[k] += s.acc[k] / static_cast<double>(count);
      }
    }
  }

  std::uint64_t draws() const noexcept { return ledger_.scalar_draws; }

 private:
  const PdeProblem& problem_;
  double horizon_;
  std::size_t d_;
  std::uint64_t m_;
  double e_;
  WeightFn weight_;
  std::vector<Scratch> scratch_;
  DrawLedger ledger_;
};

void check_query(const PdeProblem& problem, const MlpConfig& config, double t,
                 std::span<const double> x, const EngineOptions& options) {
  require_valid(problem, config);
  if (!problem.is_canonical()) {
    throw Error(ErrorCode::NotCanonical,
                "evaluate needs a backward problem; use to_canonical()");
  }
  if (x.size() != problem.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "query point has wrong size");
  }
  if (t == problem.horizon()) {
    throw Error(ErrorCode::QueryAtTerminalTime,
                "the estimator is defined on [0, T)");
  }
  if (!(t >= 0.0 && t < problem.horizon())) {
    throw Error(ErrorCode::QueryOutOfDomain, "t must lie in [0, T)");
  }
  bool too_costly;
  try {
    const CostCount cost =
        cost_rv(problem.dimension(), config.depth, config.base);
    too_costly = static_cast<long double>(cost) >
                 static_cast<long double>(options.cost_budget);
  } catch (const Error&) {
    too_costly = true;
  }
  if (too_costly) {
    throw Error(ErrorCode::DepthCostGuard,
                "predicted draws exceed the cost budget");
  }
}

}  // namespace

double importance_weight(double tau, double r, double e) noexcept {
  return tau * std::pow(r, 1.0 - e) / e;
}

double cost_budget_from_env(double fallback) {
  const char* raw = std::getenv("MLP_COST_BUDGET");
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const double value = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(value > 0.0)) return fallback;
  return value;
}

std::vector<LevelTerm> level_terms(const MlpConfig& config,
                                   const ThetaPath& theta) {
  std::vector<LevelTerm> out;
  for (int l = 0; l < config.depth; ++l) {
    LevelTerm term;
    term.level = l;
    term.inner_count = power(config.base, config.depth - l);
    term.plus_prefix = theta.extended(l);
    if (l >= 1) term.minus_prefix = theta.extended(-l);
    out.push_back(std::move(term));
  }
  return out;
}

FieldEstimate evaluate(const PdeProblem& problem, const MlpConfig& config,
                       const ThetaPath& theta, double t,
                       std::span<const double> x,
                       const EngineOptions& options) {
  check_query(problem, config, t, x, options);
  FieldEstimate est;
  std::vector<double> out(problem.dimension() + 1, 0.0);
  Recursion recursion(problem, config, options);
  recursion.run(config.depth, digest(StreamKey{config.root_seed, theta}), t,
                x, out);
  est.value = out[0];
  est.gradient.assign(out.begin() + 1, out.end());
  est.draws = recursion.draws();
  return est;
}

std::vector<FieldEstimate> replicate(const PdeProblem& problem,
                                     const MlpConfig& config, double t,
                                     std::span<const double> x,
                                     const EngineOptions& options) {
  check_query(problem, config, t, x, options);
  const std::size_t count = config.replications;
  std::vector<FieldEstimate> out(count);
  const PathDigest root = PathDigest::root(config.root_seed);

  auto work = [&](std::size_t k) {
    std::vector<double> buf(problem.dimension() + 1, 0.0);
    Recursion recursion(problem, config, options);
    recursion.run(config.depth, root.child(static_cast<std::int64_t>(k + 1)),
                  t, x, buf);
    out[k].value = buf[0];
    out[k].gradient.assign(buf.begin() + 1, buf.end());
    out[k].draws = recursion.draws();
  };

  unsigned threads = options.threads ? options.threads
                                     : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(
                             threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) work(k);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          work(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<FieldEstimate> solve(const PdeProblem& problem,
                                 const MlpConfig& config, double t,
                                 std::span<const double> x,
                                 const EngineOptions& options) {
  const CanonicalProblem canonical = to_canonical(problem);
  return replicate(canonical.problem, config, canonical.time_map(t), x,
                   options);
}

RmseResult rmse(std::span<const FieldEstimate> estimates,
                double reference_value,
                std::span<const double> reference_gradient) {
  if (estimates.empty()) {
    throw Error(ErrorCode::EmptySample, "rmse needs at least one estimate");
  }
  const std::size_t d = reference_gradient.size();
  double value_sq = 0.0;
  std::vector<double> grad_sq(d, 0.0);
  for (const auto& est : estimates) {
    if (est.gradient.size() != d) {
      throw Error(ErrorCode::DimensionMismatch, "gradient size differs");
    }
    const double dv = est.value - reference_value;
    value_sq += dv * dv;
    for (std::size_t i = 0; i < d; ++i) {
      const double dg = est.gradient[i] - reference_gradient[i];
      grad_sq[i] += dg * dg;
    }
  }
  const double n = static_cast<double>(estimates.size());
  RmseResult out;
  out.value = std::sqrt(value_sq / n);
  for (double s : grad_sq) {
    out.gradient_max = std::max(out.gradient_max, std::sqrt(s / n));
  }
  out.combined = std::hypot(out.value, out.gradient_max);
  return out;
}

}  // namespace mlp
