// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "mlp/error.hpp"

namespace mlp {

/// Which parabolic equation a problem describes.
///
/// BackwardHalfLaplacian: u_t + (1/2) Lap u + f(t, x, u, grad u) = 0 on
/// [0, T) with u(T, .) = g. This is the form the estimator works in.
///
/// ForwardFullLaplacian: u_t = Lap u + f(u, grad u) with u(0, .) = g. It is
/// converted to the backward form by to_canonical().
enum class TimeConvention { BackwardHalfLaplacian, ForwardFullLaplacian };

using TerminalFn = std::function<double(std::span<const double> x)>;
using NonlinearityFn = std::function<double(
    double t, std::span<const double> x, double y, std::span<const double> z)>;
using GradientNonlinearityFn =
    std::function<double(double y, std::span<const double> z)>;

/// A semilinear heat equation with its declared Lipschitz data.
///
/// Immutable after construction. The nonlinearity receives the time in the
/// problem's own convention.
class PdeProblem {
 public:
  PdeProblem(std::size_t dimension, double horizon, TerminalFn terminal,
             NonlinearityFn nonlinearity,
             std::vector<double> lipschitz_solution,
             std::vector<double> lipschitz_space,
             TimeConvention convention =
                 TimeConvention::BackwardHalfLaplacian);

  /// Forward problem whose nonlinearity depends on (y, z) only.
  static PdeProblem forward(std::size_t dimension, double horizon,
                            TerminalFn terminal, GradientNonlinearityFn f,
                            std::vector<double> lipschitz_solution,
                            std::vector<double> lipschitz_space);

  std::size_t dimension() const noexcept { return dimension_; }
  double horizon() const noexcept { return horizon_; }
  TimeConvention convention() const noexcept { return convention_; }
  bool is_canonical() const noexcept {
    return convention_ == TimeConvention::BackwardHalfLaplacian;
  }

  /// Lipschitz constants in (y, z_1, ..., z_d); length d + 1.
  const std::vector<double>& lipschitz_solution() const noexcept {
    return lipschitz_solution_;
  }
  /// Spatial Lipschitz constants of g; length d.
  const std::vector<double>& lipschitz_space() const noexcept {
    return lipschitz_space_;
  }

  const TerminalFn& terminal() const noexcept { return terminal_; }
  const NonlinearityFn& nonlinearity() const noexcept { return nonlinearity_; }

  double g(std::span<const double> x) const { return terminal_(x); }
  double f(double t, std::span<const double> x, double y,
           std::span<const double> z) const {
    return nonlinearity_(t, x, y, z);
  }

 private:
  std::size_t dimension_;
  double horizon_;
  TerminalFn terminal_;
  NonlinearityFn nonlinearity_;
  std::vector<double> lipschitz_solution_;
  std::vector<double> lipschitz_space_;
  TimeConvention convention_;
};

struct MlpConfig {
  int depth = 1;                    // Picard level n
  std::uint64_t base = 1;           // Monte Carlo base M
  double time_cdf_exponent = 0.5;   // e in P(r <= b) = b^e
  std::uint64_t root_seed = 0;
  std::uint64_t replications = 1;
};

/// Multi-index identifying one independent random stream.
class ThetaPath {
 public:
  ThetaPath() = default;
  ThetaPath(std::initializer_list<std::int64_t> elements)
      : elements_(elements) {}
  explicit ThetaPath(std::vector<std::int64_t> elements)
      : elements_(std::move(elements)) {}

  ThetaPath extended(std::int64_t a) const;
  ThetaPath extended(std::int64_t a, std::int64_t b) const;

  std::size_t size() const noexcept { return elements_.size(); }
  bool empty() const noexcept { return elements_.empty(); }
  std::span<const std::int64_t> elements() const noexcept { return elements_; }

  friend bool operator==(const ThetaPath&, const ThetaPath&) = default;

 private:
  std::vector<std::int64_t> elements_;
};

std::string to_string(const ThetaPath& path);

/// Joint estimate of (u, grad u) at one space-time point.
struct FieldEstimate {
  double value = 0.0;
  std::vector<double> gradient;
  std::uint64_t draws = 0;
};

struct Violation {
  ErrorCode code;
  std::string field;
  std::string message;
};

/// Checks every type invariant of the pair; empty result means valid.
std::vector<Violation> validate_problem(const PdeProblem& problem,
                                        const MlpConfig& config);
std::vector<Violation> validate_config(const MlpConfig& config);

/// Throws Error carrying the first violation, if any.
void require_valid(const PdeProblem& problem, const MlpConfig& config);

/// Affine map from a problem's own time axis to canonical backward time.
struct TimeMap {
  double offset = 0.0;
  double scale = 1.0;

  double operator()(double t) const noexcept { return offset + scale * t; }
  bool is_identity() const noexcept { return offset == 0.0 && scale == 1.0; }
};

struct CanonicalProblem {
  PdeProblem problem;
  TimeMap time_map;
};

/// Rewrites a forward problem on [0, T] as the backward problem on [0, 2T]
/// with nonlinearity f/2. Forward time t maps to 2(T - t). Backward
/// problems come back unchanged with the identity map.
CanonicalProblem to_canonical(const PdeProblem& problem);

struct LipschitzAudit {
  std::size_t pairs_checked = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max observed |difference| / declared bound
  bool passed() const noexcept { return violations == 0; }
};

/// Samples random argument pairs and checks the declared Lipschitz bounds of
/// f (in y, z at fixed t, x) and of g.
LipschitzAudit audit_lipschitz(const PdeProblem& problem, std::size_t pairs,
                               std::uint64_t seed, double spread = 2.0);

}  // namespace mlp
