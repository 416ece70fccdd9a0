// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mlp/error.hpp"

namespace mlp {

/// Exact draw counts need more than 64 bits once (5M)^n gets going.
__extension__ typedef unsigned __int128 CostCount;

std::string to_string(CostCount value);

/// Regularity constants of a problem on its canonical (backward) form.
///
/// `lipschitz_y` and `lipschitz_z` are the constants of f in the solution
/// value and gradient, `lipschitz_fx` those of f in x and `lipschitz_g` those
/// of the terminal data. The two moments are L^q norms along the Brownian
/// path started at the query point (t, xi):
///   g_moment  = sup_{s in [t,T]} || g(xi + W_{s-t}) ||_q
///   f0_moment = sup_{s in [t,T)} || f(s, xi + W_{s-t}, 0, 0) ||_q
struct RegularityData {
  double lipschitz_y = 0.0;
  std::vector<double> lipschitz_z;
  std::vector<double> lipschitz_fx;
  std::vector<double> lipschitz_g;
  double g_moment = 0.0;
  double f0_moment = 0.0;
  double q = 4.0;
  bool moments_estimated = false;  // true when moments came from sampling

  std::size_t dimension() const noexcept { return lipschitz_z.size(); }
  /// Sum of all constants in (y, z): the l1 norm of the Lipschitz vector.
  double lipschitz_l1() const noexcept;
  double lipschitz_g_l1() const noexcept;
};

/// Per-coordinate bound on |d u / d x_i| at time t:
/// e^{L0 (T-t)} (K_i + (T-t) Lx_i).
std::vector<double> gradient_bound(const RegularityData& reg, double horizon,
                                   double t);

/// Bound on sup_{s<=t} || u(t, xi + W_t - W_s) ||_q.
double solution_moment_bound(const RegularityData& reg, double horizon);

/// Inputs of the global L2 error bound for one coordinate of the estimate.
///
/// `density_exponent` is a in the time density (1-a) s^{-a}, i.e. the engine
/// exponent e equals 1 - a. Admissible values depend on p:
///   (p-2)/(2(p-1)) < a < p/(2(p-1)).
struct ErrorBoundInput {
  double p = 4.0;
  double density_exponent = 0.5;
  int depth = 1;
  std::uint64_t base = 1;
  double horizon = 1.0;
  double t = 0.0;
  RegularityData regularity;
  /// Known sup_s max_i || u_i(s, xi + W_{s-t}) ||_q. When empty the value is
  /// assembled from solution_moment_bound() and gradient_bound().
  std::optional<double> solution_norm;
};

/// 2p/(p - 2), the Lebesgue exponent the bound uses for its norms
/// (+inf at p = 2).
double norm_exponent(double p);

/// Exponent beta = a/2 - (1-a)(p-2)/(2p) tied to (p, a).
double rate_exponent(double p, double density_exponent);

/// Leading constant C of the bound; throws HypothesisViolated when a is out
/// of range.
double error_bound_constant(const ErrorBoundInput& input);

/// Natural logarithm of the bound (may be +inf; -inf when the bound is 0).
double log_error_bound(const ErrorBoundInput& input);
double error_bound(const ErrorBoundInput& input);

/// Scalar random variables one estimate at (d, n, M) consumes:
///   RV_0 = 0,
///   RV_n = d M^n + sum_{l<n} M^{n-l} (d + 1 + RV_l + [l>=1] RV_{l-1}).
CostCount cost_rv(std::size_t d, int n, std::uint64_t M);

/// d (5M)^n.
CostCount cost_bound_closed(std::size_t d, int n, std::uint64_t M);

struct ScheduleRequest {
  double target_eps = 0.1;
  std::size_t dimension = 1;
  RegularityData regularity;
  double p = 4.0;
  double density_exponent = 0.5;
  double m_exponent = 0.25;  // M = floor(n^q)
  double horizon = 1.0;
  double t = 0.0;
  std::optional<double> solution_norm;
  int max_depth = 50;
};

struct ScheduleResult {
  int depth = 0;
  std::uint64_t base = 1;
  CostCount predicted_cost = 0;
  bool cost_saturated = false;  // true cost exceeds 128 bits
  double bound = 0.0;
};

/// Admissible open interval for the M-rule exponent q given the engine's
/// time exponent e: (max{(1-2e)/(1-e), 0}, 1-e).
std::pair<double, double> admissible_m_exponent(double time_cdf_exponent);

/// floor(n^q), at least 1.
std::uint64_t schedule_base(int n, double q);

/// Smallest depth n <= max_depth whose bound at M = floor(n^q) meets the
/// target.
ScheduleResult schedule(const ScheduleRequest& request);

}  // namespace mlp
