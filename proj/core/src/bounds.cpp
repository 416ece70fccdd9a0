// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#include "mlp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mlp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CostCount checked_mul(CostCount a, CostCount b) {
  CostCount out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw Error(ErrorCode::Overflow, "cost exceeds 128-bit range");
  }
  return out;
}

CostCount checked_add(CostCount a, CostCount b) {
  CostCount out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw Error(ErrorCode::Overflow, "cost exceeds 128-bit range");
  }
  return out;
}

CostCount checked_pow(CostCount base, int exponent) {
  CostCount out = 1;
  for (int k = 0; k < exponent; ++k) out = checked_mul(out, base);
  return out;
}

double l1(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

void require_admissible(double p, double a) {
  if (!(p >= 2.0)) {
    throw Error(ErrorCode::HypothesisViolated, "p must be >= 2");
  }
  const double lo = (p - 2.0) / (2.0 * (p - 1.0));
  const double hi = p / (2.0 * (p - 1.0));
  if (!(a > lo && a < hi && a > 0.0 && a < 1.0)) {
    throw Error(ErrorCode::HypothesisViolated,
                "density exponent outside ((p-2)/(2(p-1)), p/(2(p-1)))");
  }
}

}  // namespace

std::string to_string(CostCount value) {
  if (value == 0) return "0";
  std::string out;
  while (value > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

double RegularityData::lipschitz_l1() const noexcept {
  return lipschitz_y + l1(lipschitz_z);
}

double RegularityData::lipschitz_g_l1() const noexcept {
  return l1(lipschitz_g);
}

std::vector<double> gradient_bound(const RegularityData& reg, double horizon,
                                   double t) {
  const std::size_t d = reg.lipschitz_g.size();
  const double tau = horizon - t;
  const double growth = std::exp(reg.lipschitz_y * tau);
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double fx = i < reg.lipschitz_fx.size() ? reg.lipschitz_fx[i] : 0.0;
    out[i] = growth * (reg.lipschitz_g[i] + tau * fx);
  }
  return out;
}

double solution_moment_bound(const RegularityData& reg, double horizon) {
  const double growth = std::exp(reg.lipschitz_y * horizon);
  double coupling = 0.0;
  for (std::size_t j = 0; j < reg.lipschitz_z.size(); ++j) {
    const double k = j < reg.lipschitz_g.size() ? reg.lipschitz_g[j] : 0.0;
    const double fx = j < reg.lipschitz_fx.size() ? reg.lipschitz_fx[j] : 0.0;
    if (reg.lipschitz_z[j] == 0.0) continue;  // 0 * inf stays 0
    coupling += reg.lipschitz_z[j] * (k + horizon * fx);
  }
  return growth * (reg.g_moment + horizon * reg.f0_moment +
                   horizon * growth * coupling);
}

double norm_exponent(double p) {
  if (p == 2.0) return kInf;
  return 2.0 * p / (p - 2.0);
}

double rate_exponent(double p, double a) {
  return 0.5 * a - (1.0 - a) * (p - 2.0) / (2.0 * p);
}

double error_bound_constant(const ErrorBoundInput& in) {
  require_admissible(in.p, in.density_exponent);
  const double p = in.p;
  const double a = in.density_exponent;
  const double tau = in.horizon - in.t;
  const double inner = std::max(
      std::sqrt(tau), std::sqrt(2.0) *
                          std::pow(std::tgamma(0.5 * (p + 1.0)), 1.0 / p) *
                          std::pow(M_PI, -1.0 / (2.0 * p)));
  const double c = 2.0 * std::sqrt(tau) *
                   std::pow(std::tgamma(0.5 * p), 1.0 / p) *
                   std::pow(1.0 - a, 1.0 / p - 1.0) *
                   std::max(1.0, in.regularity.lipschitz_l1()) * inner;
  return std::max(1.0, c);
}

double log_error_bound(const ErrorBoundInput& in) {
  if (in.depth < 1 || in.base < 1) {
    throw Error(ErrorCode::InvalidConfig, "error bound needs n >= 1, M >= 1");
  }
  if (!(in.t >= 0.0 && in.t < in.horizon)) {
    throw Error(ErrorCode::QueryOutOfDomain, "t must lie in [0, T)");
  }
  const double c = error_bound_constant(in);
  const double p = in.p;
  const double beta = rate_exponent(p, in.density_exponent);
  const double n = in.depth;
  const double m = static_cast<double>(in.base);
  const auto& reg = in.regularity;

  const double q = norm_exponent(p);
  if (!(reg.q == q || std::abs(reg.q - q) <= 1e-9 * q)) {
    throw Error(ErrorCode::HypothesisViolated,
                "regularity moments must be taken in L^{2p/(p-2)}");
  }

  double u_norm;
  if (in.solution_norm) {
    u_norm = *in.solution_norm;
  } else {
    u_norm = solution_moment_bound(reg, in.horizon);
    for (double gb : gradient_bound(reg, in.horizon, in.t)) {
      u_norm = std::max(u_norm, gb);
    }
  }

  const double k_l1 = reg.lipschitz_g_l1();
  const double k_term =
      k_l1 == 0.0
          ? 0.0
          : 2.0 / c * std::sqrt(std::max(in.horizon - in.t, 3.0)) * k_l1;
  const double u_term = u_norm == 0.0 ? 0.0 : std::sqrt(m) * u_norm;
  const double bracket = k_term + reg.f0_moment + u_term;
  if (bracket == 0.0) return -kInf;

  return std::log(0.25) + std::log1p(p * n / 2.0) / 8.0 -
         0.5 * n * std::log(m) + n * std::log(2.0 * c) + 0.125 +
         beta * std::pow(m, 1.0 / (2.0 * beta)) + std::log(bracket);
}

double error_bound(const ErrorBoundInput& input) {
  return std::exp(log_error_bound(input));
}

CostCount cost_rv(std::size_t d, int n, std::uint64_t M) {
  if (n <= 0) return 0;
  if (d == 0 || M == 0) {
    throw Error(ErrorCode::InvalidConfig, "cost needs d >= 1 and M >= 1");
  }
  const CostCount dd = d;
  std::vector<CostCount> rv(static_cast<std::size_t>(n) + 1, 0);
  std::vector<CostCount> mpow(static_cast<std::size_t>(n) + 1, 1);
  for (int k = 1; k <= n; ++k) mpow[k] = checked_mul(mpow[k - 1], M);

  for (int k = 1; k <= n; ++k) {
    CostCount total = checked_mul(dd, mpow[k]);
    for (int l = 0; l < k; ++l) {
      CostCount per_term = checked_add(dd + 1, rv[l]);
      if (l >= 1) per_term = checked_add(per_term, rv[l - 1]);
      total = checked_add(total, checked_mul(mpow[k - l], per_term));
    }
    rv[k] = total;
  }
  return rv[n];
}

CostCount cost_bound_closed(std::size_t d, int n, std::uint64_t M) {
  if (n <= 0) return 0;
  return checked_mul(d, checked_pow(checked_mul(5, M), n));
}

std::pair<double, double> admissible_m_exponent(double e) {
  return {std::max((1.0 - 2.0 * e) / (1.0 - e), 0.0), 1.0 - e};
}

std::uint64_t schedule_base(int n, double q) {
  const double raw = std::floor(std::pow(static_cast<double>(n), q) *
                                (1.0 + 1e-12));
  return raw < 1.0 ? 1 : static_cast<std::uint64_t>(raw);
}

ScheduleResult schedule(const ScheduleRequest& req) {
  require_admissible(req.p, req.density_exponent);
  const double e = 1.0 - req.density_exponent;
  const auto [lo, hi] = admissible_m_exponent(e);
  if (!(req.m_exponent > lo && req.m_exponent < hi)) {
    throw Error(ErrorCode::AdmissibilityViolated,
                "M-rule exponent outside the admissible interval for e = " +
                    std::to_string(e));
  }
  if (!(req.target_eps > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "target accuracy must be > 0");
  }

  ErrorBoundInput in;
  in.p = req.p;
  in.density_exponent = req.density_exponent;
  in.horizon = req.horizon;
  in.t = req.t;
  in.regularity = req.regularity;
  in.solution_norm = req.solution_norm;

  const double log_eps = std::log(req.target_eps);
  for (int n = 1; n <= req.max_depth; ++n) {
    in.depth = n;
    in.base = schedule_base(n, req.m_exponent);
    const double lb = log_error_bound(in);
    if (lb <= log_eps) {
      ScheduleResult out;
      out.depth = n;
      out.base = in.base;
      try {
        out.predicted_cost = cost_rv(req.dimension, n, in.base);
      } catch (const Error&) {
        out.predicted_cost = ~CostCount{0};
        out.cost_saturated = true;
      }
      out.bound = std::exp(lb);
      return out;
    }
  }
  throw Error(ErrorCode::NoFeasibleDepth,
              "no depth <= " + std::to_string(req.max_depth) +
                  " meets the target accuracy");
}

}  // namespace mlp
