// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mlp/bounds.hpp"
#include "mlp/problem.hpp"

namespace mlp {

struct MomentSampling {
  std::uint64_t samples = 100000;  // Gaussian vectors per time point
  int time_points = 20;            // grid on [t, T]
  std::uint64_t seed = 0;
};

/// Regularity data of a problem at the canonical query (t, xi) with the two
/// moments estimated by Monte Carlo on a time grid. Lipschitz constants come
/// from the problem; the x-constants of f default to those of g.
/// The result has moments_estimated set.
RegularityData estimate_regularity(
    const PdeProblem& problem, double t, std::span<const double> xi, double q,
    const MomentSampling& sampling = {},
    std::optional<std::vector<double>> lipschitz_fx = std::nullopt);

}  // namespace mlp
