// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#include "mlp/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mlp/quadrature.hpp"
#include "mlp/sampler.hpp"

namespace mlp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_common(const IteratedIntegralSpec& s) {
  if (s.j < 1) throw Error(ErrorCode::HypothesisViolated, "need j >= 1");
  if (!(s.alpha > 0.0 && s.alpha < 1.0)) {
    throw Error(ErrorCode::HypothesisViolated, "alpha must lie in (0, 1)");
  }
  if (!(s.gamma > 0.0)) {
    throw Error(ErrorCode::HypothesisViolated, "gamma must be > 0");
  }
  if (!(s.s0 >= 0.0 && s.s0 < s.horizon)) {
    throw Error(ErrorCode::HypothesisViolated, "s0 must lie in [0, T)");
  }
}

std::string format_params(const IteratedIntegralSpec& s) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "j=%d alpha=%.2f beta=%.2f gamma=%.2f", s.j,
                s.alpha, s.beta, s.gamma);
  return buf;
}

// int_0^c (1 - u^{1/(a+1)})^b du / (a + 1): the half [0, 1/2] of
// int s^a (1-s)^b ds after s = u^{1/(a+1)}.
QuadratureResult half_beta(double a, double b, double abs_tol) {
  const double k = 1.0 / (a + 1.0);
  const double upper = std::pow(0.5, a + 1.0);
  auto integrand = [=](double u) {
    return k * std::pow(1.0 - std::pow(u, k), b);
  };
  return integrate(integrand, 0.0, upper, abs_tol, 1e-14);
}

}  // namespace

double iterated_integral_closed(const IteratedIntegralSpec& s) {
  check_common(s);
  const double a = s.alpha * s.gamma - s.beta + 1.0;  // > 0 required
  if (!(a > 0.0)) {
    throw Error(ErrorCode::HypothesisViolated,
                "closed form needs beta < alpha gamma + 1");
  }
  const double h = 1.0 + s.gamma - s.beta;
  double log_value =
      s.j * (h * std::log(s.horizon - s.s0) + std::lgamma(a) -
             s.gamma * std::log1p(-s.alpha));
  for (int i = 0; i < s.j; ++i) {
    log_value += std::lgamma(i * h + 1.0) - std::lgamma(a + i * h + 1.0);
  }
  return std::exp(log_value);
}

double iterated_integral_factor(const IteratedIntegralSpec& s, int i,
                                double abs_tol) {
  check_common(s);
  const double a = s.alpha * s.gamma - s.beta;
  const double b = i * (1.0 + s.gamma - s.beta);
  if (!(a > -1.0) || !(b > -1.0)) {
    throw Error(ErrorCode::NonIntegrable,
                "integrand not integrable at an endpoint");
  }
  const auto left = half_beta(a, b, abs_tol);
  const auto right = half_beta(b, a, abs_tol);  // mirror s -> 1 - s
  if (!left.converged || !right.converged) {
    throw Error(ErrorCode::ToleranceNotMet, "quadrature did not converge");
  }
  return (left.value + right.value) * std::pow(1.0 - s.alpha, -s.gamma);
}

double iterated_integral_quadrature(const IteratedIntegralSpec& s,
                                    double rel_tol) {
  check_common(s);
  if (!(rel_tol > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "rel_tol must be > 0");
  }
  const double h = 1.0 + s.gamma - s.beta;
  double product = std::pow(s.horizon - s.s0, s.j * h);
  for (int i = 0; i < s.j; ++i) {
    product *= iterated_integral_factor(s, i, 1e-2 * rel_tol);
  }
  return product;
}

double iterated_integral_upper_bound(const IteratedIntegralSpec& s) {
  check_common(s);
  const double ag = s.alpha * s.gamma;
  if (!(s.beta >= ag && s.beta <= ag + 1.0)) {
    throw Error(ErrorCode::HypothesisViolated,
                "upper bound needs alpha gamma <= beta <= alpha gamma + 1");
  }
  const double a = ag - s.beta + 1.0;
  if (a == 0.0) return kInf;
  const double h = 1.0 + s.gamma - s.beta;
  const double j = s.j;
  const double log_first =
      j * (h * std::log(s.horizon - s.s0) + std::lgamma(a) -
           s.gamma * std::log1p(-s.alpha) - a * std::log(h));
  const double log_second =
      (s.beta - ag) * a / h * (h + std::log(h * (j - 1.0) + 1.0));
  const double log_third =
      a * (std::lgamma(1.0 / h) - std::lgamma(j + 1.0 / h));
  return std::exp(log_first + log_second + log_third);
}

double iterated_integral_lower_bound(int j, double horizon, double s0) {
  if (j < 0 || !(s0 >= 0.0 && s0 < horizon)) {
    throw Error(ErrorCode::HypothesisViolated, "need j >= 0 and s0 in [0, T)");
  }
  return std::exp((j + 1.0) * std::log(M_PI * (horizon - s0)) -
                  2.0 * std::lgamma(0.5 * (j + 3.0)));
}

double gamma_ratio(double x, double s) {
  return std::exp(std::lgamma(x) - std::lgamma(x + s));
}

double wendel_bound(double x, double s) {
  return std::pow(x, -s) * std::pow((x + s) / x, 1.0 - s);
}

double product_moment_bound(int j, double p, double alpha, double horizon,
                            double t) {
  if (j < 0) throw Error(ErrorCode::HypothesisViolated, "need j >= 0");
  if (!(p > 1.0) || !(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::HypothesisViolated, "need p > 1, alpha in (0, 1)");
  }
  const double a = alpha * (p - 1.0) - 0.5 * p + 1.0;
  if (!(a >= 0.0 && a <= 1.0)) {
    throw Error(ErrorCode::HypothesisViolated,
                "need alpha (p-1) <= p/2 <= alpha (p-1) + 1");
  }
  if (!(t >= 0.0 && t < horizon)) {
    throw Error(ErrorCode::HypothesisViolated, "need t in [0, T)");
  }
  if (a == 0.0) return kInf;
  const double tau = horizon - t;
  const double half_p = 0.5 * p;
  // max{Gamma(p/2), Gamma(a)} keeps the one-step estimate valid when
  // Gamma(a) exceeds Gamma(p/2), e.g. p = 2, alpha = 1/2.
  const double log_gamma_step =
      std::max(std::lgamma(half_p), std::lgamma(a));
  const double log_lead =
      std::max(half_p * std::log(tau),
               half_p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) -
                   0.5 * std::log(M_PI));
  const double log_step = log_lead + half_p * std::log(tau) + log_gamma_step -
                          (p - 1.0) * std::log1p(-alpha) -
                          a * std::log(half_p);
  const double log_mid = (half_p + std::log(half_p * j + 1.0)) / (2.0 * p);
  const double log_tail =
      a * (std::lgamma(2.0 / p) - std::lgamma(1.0 + j + 2.0 / p));
  return std::exp((j + 1.0) * log_step + log_mid + log_tail);
}

MomentEstimate product_moment_monte_carlo(int j, double p, double alpha,
                                          double horizon, double t, int nu,
                                          std::size_t samples,
                                          std::uint64_t seed) {
  if (samples == 0) throw Error(ErrorCode::EmptySample, "need samples >= 1");
  RandomStream stream(PathDigest::root(seed));
  DrawLedger ledger;
  const double e = 1.0 - alpha;  // CDF exponent of the chain
  double sum = 0.0, sum_sq = 0.0;
  double z = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    double s = t;
    double product = 1.0;
    for (int i = 0; i <= j; ++i) {
      const double r = sample_time_fraction(stream, e, ledger);
      const double step = (horizon - s) * r;
      double factor = (horizon - s) * std::pow(r, alpha) / (1.0 - alpha);
      if (nu != 0) {
        sample_gaussian(stream, std::span<double>(&z, 1), ledger);
        factor *= z / std::sqrt(step);
      }
      product *= factor;
      s += step;
    }
    const double v = std::pow(std::abs(product), p);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(samples);
  MomentEstimate out;
  out.mean = sum / n;
  out.stderr_ = std::sqrt(std::max(0.0, sum_sq / n - out.mean * out.mean) / n);
  return out;
}

std::vector<IntegralCheck> verify_integral_identity(double rel_tol) {
  std::vector<IntegralCheck> rows;
  const double pairs[3][2] = {{1.0, 1.0}, {0.5, 1.0}, {1.5, 2.0}};
  for (int j = 1; j <= 3; ++j) {
    for (double alpha : {0.3, 0.5, 0.7}) {
      for (const auto& bg : pairs) {
        IteratedIntegralSpec s{j, alpha, bg[0], bg[1], 1.0, 0.0};
        if (!(s.beta < alpha * s.gamma + 1.0)) continue;
        IntegralCheck row;
        row.name = "closed=quadrature";
        row.params = format_params(s);
        row.lhs = iterated_integral_closed(s);
        row.rhs = iterated_integral_quadrature(s);
        row.passed = std::abs(row.lhs - row.rhs) <= rel_tol * std::abs(row.rhs);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<IntegralCheck> verify_integral_ordering() {
  std::vector<IntegralCheck> rows;
  const double pairs[3][2] = {{1.0, 1.0}, {0.5, 1.0}, {1.5, 2.0}};
  for (int j = 1; j <= 3; ++j) {
    for (double alpha : {0.3, 0.5, 0.7}) {
      for (const auto& bg : pairs) {
        IteratedIntegralSpec s{j, alpha, bg[0], bg[1], 1.0, 0.0};
        const double ag = alpha * s.gamma;
        if (!(s.beta >= ag && s.beta < ag + 1.0)) continue;
        IntegralCheck row;
        row.name = "closed<=upper";
        row.params = format_params(s);
        row.lhs = iterated_integral_closed(s);
        row.rhs = iterated_integral_upper_bound(s);
        row.passed = row.lhs <= row.rhs * (1.0 + 1e-12);
        rows.push_back(row);
      }
    }
  }
  for (int j = 0; j <= 3; ++j) {
    for (int k = 1; k <= 9; ++k) {
      IteratedIntegralSpec s{j + 1, 0.1 * k, 1.0, 1.0, 1.0, 0.0};
      IntegralCheck row;
      row.name = "lower<=closed";
      row.params = format_params(s);
      row.lhs = iterated_integral_lower_bound(j, 1.0, 0.0);
      row.rhs = iterated_integral_closed(s);
      row.passed = row.lhs <= row.rhs * (1.0 + 1e-12);
      rows.push_back(row);
    }
  }
  for (double x : {0.5, 1.0, 5.0}) {
    for (double sv : {0.0, 0.5, 1.0}) {
      IntegralCheck row;
      char buf[48];
      std::snprintf(buf, sizeof buf, "x=%.1f s=%.1f", x, sv);
      row.params = buf;
      row.lhs = gamma_ratio(x, sv);
      row.rhs = wendel_bound(x, sv);
      if (sv == 0.0 || sv == 1.0) {
        row.name = "wendel-equality";
        row.passed = std::abs(row.lhs - row.rhs) <= 1e-12 * row.rhs;
      } else {
        row.name = "wendel";
        row.passed = row.lhs <= row.rhs * (1.0 + 1e-12);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace mlp
