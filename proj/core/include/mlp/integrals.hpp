// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mlp/error.hpp"

namespace mlp {

/// Nested integral
///   int_{s0}^T ... int_{s_{j-1}}^T prod_k (s_k - s_{k-1})^{-beta}
///                                         rho_k^{-gamma} ds_j ... ds_1
/// where rho_k is the power-law density (1 - alpha) r^{-alpha} rescaled to
/// [s_{k-1}, T].
struct IteratedIntegralSpec {
  int j = 1;
  double alpha = 0.5;
  double beta = 1.0;
  double gamma = 1.0;
  double horizon = 1.0;
  double s0 = 0.0;
};

/// Closed form via log-Gamma. Needs beta < alpha gamma + 1.
double iterated_integral_closed(const IteratedIntegralSpec& spec);

/// (1 - alpha)^{-gamma} int_0^1 s^{alpha gamma - beta} (1 - s)^{i(1+gamma-beta)} ds
/// by adaptive quadrature, with both endpoint singularities removed by a
/// power substitution.
double iterated_integral_factor(const IteratedIntegralSpec& spec, int i,
                                double abs_tol = 1e-12);

/// (T - s0)^{j(1+gamma-beta)} times the product of the j factors.
double iterated_integral_quadrature(const IteratedIntegralSpec& spec,
                                    double rel_tol = 1e-8);

/// Upper bound obtained from Wendel's inequality. Needs
/// alpha gamma <= beta <= alpha gamma + 1.
double iterated_integral_upper_bound(const IteratedIntegralSpec& spec);

/// (pi (T - s0))^{j+1} / Gamma((j+3)/2)^2: a lower bound for the beta =
/// gamma = 1 integral with j + 1 nestings, for every alpha.
double iterated_integral_lower_bound(int j, double horizon, double s0);

/// Gamma(x) / Gamma(x + s) and its Wendel majorant x^{-s} ((x+s)/x)^{1-s}.
double gamma_ratio(double x, double s);
double wendel_bound(double x, double s);

/// Bound on E| prod_{i=0}^j rho_i^{-1} <e_nu_i, (1, dW_i / dS_i)> |^p for
/// the power-law time chain with density (1 - alpha) r^{-alpha}. Requires
/// p > 1 and alpha (p-1) <= p/2 <= alpha (p-1) + 1.
double product_moment_bound(int j, double p, double alpha, double horizon,
                            double t);

/// Monte Carlo estimate of the product moment above, with every factor on
/// coordinate `nu` (0 = value, 1 = a gradient coordinate).
struct MomentEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};
MomentEstimate product_moment_monte_carlo(int j, double p, double alpha,
                                          double horizon, double t, int nu,
                                          std::size_t samples,
                                          std::uint64_t seed);

/// One line of the integral verification table.
struct IntegralCheck {
  std::string name;
  std::string params;
  double lhs = 0.0;
  double rhs = 0.0;
  bool passed = false;
};

/// Closed form against quadrature on j in {1,2,3}, alpha in {0.3,0.5,0.7},
/// (beta, gamma) in {(1,1), (0.5,1), (1.5,2)}.
std::vector<IntegralCheck> verify_integral_identity(double rel_tol = 1e-6);

/// lower <= closed <= upper where each applies, plus Wendel on
/// x in {0.5, 1, 5}, s in {0, 0.5, 1} with equality at s in {0, 1}.
std::vector<IntegralCheck> verify_integral_ordering();

}  // namespace mlp
