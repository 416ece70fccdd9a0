// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mlp/problem.hpp"

namespace mlp {

struct StreamKey {
  std::uint64_t root_seed = 0;
  ThetaPath path;
};

/// 128-bit digest of (root seed, path). Built one element at a time so the
/// engine can derive child streams without materialising whole paths; the
/// result depends only on the seed and the full element sequence, including
/// its length.
class PathDigest {
 public:
  static PathDigest root(std::uint64_t seed) noexcept;

  PathDigest child(std::int64_t element) const noexcept;
  PathDigest child(std::int64_t a, std::int64_t b) const noexcept {
    return child(a).child(b);
  }

  std::uint64_t lane_a() const noexcept { return a_; }
  std::uint64_t lane_b() const noexcept { return b_; }
  std::uint64_t length() const noexcept { return length_; }

  friend bool operator==(const PathDigest&, const PathDigest&) = default;

 private:
  std::uint64_t a_ = 0;
  std::uint64_t b_ = 0;
  std::uint64_t length_ = 0;
};

PathDigest digest(const StreamKey& key) noexcept;

/// Count of scalar random variables consumed.
struct DrawLedger {
  std::uint64_t scalar_draws = 0;

  void add(std::uint64_t n) noexcept { scalar_draws += n; }
  DrawLedger& operator+=(const DrawLedger& other) noexcept {
    scalar_draws += other.scalar_draws;
    return *this;
  }
};

/// Philox-4x32-10 keyed by a path digest. The digest's lane A is the key and
/// lane B fills the upper half of the 128-bit counter; the lower half counts
/// blocks. Streams are never shared between tasks.
class RandomStream {
 public:
  explicit RandomStream(const PathDigest& digest) noexcept;

  std::uint64_t next_u64() noexcept;

  /// 53-bit uniform strictly inside (0, 1).
  double next_uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_{};
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
};

RandomStream derive_stream(const StreamKey& key) noexcept;
inline RandomStream derive_stream(const PathDigest& digest) noexcept {
  return RandomStream(digest);
}

/// Quantile of the standard normal (Wichura's AS 241, about 1e-16 relative).
double inverse_normal_cdf(double p) noexcept;

/// r = U^{1/e}, so that P(r <= b) = b^e. One ledger unit.
double sample_time_fraction(RandomStream& stream, double e,
                            DrawLedger& ledger);

/// Fills `out` with i.i.d. N(0, 1) by inversion; out.size() ledger units.
void sample_gaussian(RandomStream& stream, std::span<double> out,
                     DrawLedger& ledger) noexcept;
std::vector<double> sample_gaussian(RandomStream& stream, std::size_t d,
                                    DrawLedger& ledger);

struct SecondMomentDiagnostic {
  std::vector<double> gradient_moment;  // per coordinate
  std::vector<double> gradient_stderr;
  double predicted = 0.0;               // T / (e (1 - e))
  bool heavy_tail = false;              // e outside [0.2, 0.8]
};

/// Monte Carlo second moment of the gradient coordinates of the single-step
/// weight T e^{-1} r^{1-e} (1, (T r)^{-1/2} Z). Used to spot exponents that
/// give the gradient estimator heavy tails.
SecondMomentDiagnostic single_step_second_moment(double horizon, double e,
                                                 std::size_t d,
                                                 std::uint64_t samples,
                                                 std::uint64_t seed = 0);

}  // namespace mlp
