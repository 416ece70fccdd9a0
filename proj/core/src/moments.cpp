// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#include "mlp/moments.hpp"

#include <algorithm>
#include <cmath>

#include "mlp/sampler.hpp"

namespace mlp {

RegularityData estimate_regularity(const PdeProblem& problem, double t,
                                   std::span<const double> xi, double q,
                                   const MomentSampling& sampling,
                                   std::optional<std::vector<double>> lipschitz_fx) {
  const CanonicalProblem canonical = to_canonical(problem);
  const PdeProblem& p = canonical.problem;
  const std::size_t d = p.dimension();
  if (xi.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "query point has wrong size");
  }
  if (!(t >= 0.0 && t < p.horizon())) {
    throw Error(ErrorCode::QueryOutOfDomain, "t must lie in [0, T)");
  }
  if (!(q >= 1.0) || std::isinf(q)) {
    throw Error(ErrorCode::HypothesisViolated, "need a finite q >= 1");
  }
  if (sampling.samples == 0 || sampling.time_points < 1) {
    throw Error(ErrorCode::EmptySample, "need samples >= 1 and a time grid");
  }

  RegularityData reg;
  reg.q = q;
  reg.moments_estimated = true;
  const auto& lip = p.lipschitz_solution();
  reg.lipschitz_y = lip.at(0);
  reg.lipschitz_z.assign(lip.begin() + 1, lip.end());
  reg.lipschitz_g = p.lipschitz_space();
  reg.lipschitz_fx = lipschitz_fx ? *lipschitz_fx : reg.lipschitz_g;
  if (reg.lipschitz_fx.size() != d) {
    throw Error(ErrorCode::LipschitzSizeMismatch, "lipschitz_fx needs d entries");
  }

  // Common random numbers across the grid keep the suprema smooth in s.
  const double T = p.horizon();
  const double n = static_cast<double>(sampling.samples);
  const std::vector<double> zero_z(d, 0.0);
  std::vector<double> g_sum(sampling.time_points + 1, 0.0);
  std::vector<double> f_sum(sampling.time_points + 1, 0.0);
  std::vector<double> z(d), x(d);
  RandomStream stream(PathDigest::root(sampling.seed));
  DrawLedger ledger;
  for (std::uint64_t k = 0; k < sampling.samples; ++k) {
    sample_gaussian(stream, z, ledger);
    for (int j = 0; j <= sampling.time_points; ++j) {
      const double s = t + (T - t) * j / sampling.time_points;
      const double root = std::sqrt(s - t);
      for (std::size_t i = 0; i < d; ++i) x[i] = xi[i] + root * z[i];
      g_sum[j] += std::pow(std::abs(p.g(x)), q);
      // f is only defined on [t, T).
      if (j < sampling.time_points) {
        f_sum[j] += std::pow(std::abs(p.f(s, x, 0.0, zero_z)), q);
      }
    }
  }
  for (int j = 0; j <= sampling.time_points; ++j) {
    reg.g_moment = std::max(reg.g_moment, std::pow(g_sum[j] / n, 1.0 / q));
    reg.f0_moment = std::max(reg.f0_moment, std::pow(f_sum[j] / n, 1.0 / q));
  }
  return reg;
}

}  // namespace mlp
