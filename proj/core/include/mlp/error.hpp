// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlp {

enum class ErrorCode {
  ZeroDimension,
  NonpositiveHorizon,
  ExponentOutOfRange,
  NegativeLipschitz,
  LipschitzSizeMismatch,
  MissingCallable,
  InvalidConfig,
  DimensionMismatch,
  QueryAtTerminalTime,
  QueryOutOfDomain,
  NotCanonical,
  DepthCostGuard,
  EmptySample,
  HypothesisViolated,
  NonIntegrable,
  ToleranceNotMet,
  Overflow,
  AdmissibilityViolated,
  NoFeasibleDepth,
  UnknownCase,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mlp
