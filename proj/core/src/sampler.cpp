// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#include "mlp/sampler.hpp"

#include <cmath>
#include <limits>

namespace mlp {
namespace {

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t murmur_finalize(std::uint64_t k) noexcept {
  k ^= k >> 33;
  k *= 0xFF51AFD7ED558CCDULL;
  k ^= k >> 33;
  k *= 0xC4CEB9FE1A85EC53ULL;
  return k ^ (k >> 33);
}

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53U;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57U;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9U;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85U;

inline void philox_round(std::array<std::uint32_t, 4>& c,
                         const std::array<std::uint32_t, 2>& k) noexcept {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

PathDigest PathDigest::root(std::uint64_t seed) noexcept {
  PathDigest d;
  d.a_ = splitmix_finalize(seed + 0x9E3779B97F4A7C15ULL);
  d.b_ = murmur_finalize(seed ^ 0x6A09E667F3BCC909ULL);
  d.length_ = 0;
  return d;
}

PathDigest PathDigest::child(std::int64_t element) const noexcept {
  PathDigest d;
  d.length_ = length_ + 1;
  const auto ev = static_cast<std::uint64_t>(element);
  d.a_ = splitmix_finalize(
      a_ ^ murmur_finalize(ev + d.length_ * 0x9E3779B97F4A7C15ULL));
  d.b_ = murmur_finalize(
      b_ + splitmix_finalize(ev ^ (d.length_ * 0xD1B54A32D192ED03ULL)));
  return d;
}

PathDigest digest(const StreamKey& key) noexcept {
  PathDigest d = PathDigest::root(key.root_seed);
  for (std::int64_t e : key.path.elements()) d = d.child(e);
  return d;
}

RandomStream::RandomStream(const PathDigest& digest) noexcept {
  key_ = {static_cast<std::uint32_t>(digest.lane_a()),
          static_cast<std::uint32_t>(digest.lane_a() >> 32)};
  counter_ = {0U, 0U, static_cast<std::uint32_t>(digest.lane_b()),
              static_cast<std::uint32_t>(digest.lane_b() >> 32)};
}

void RandomStream::refill() noexcept {
  std::array<std::uint32_t, 4> c = counter_;
  std::array<std::uint32_t, 2> k = key_;
  for (int round = 0; round < 10; ++round) {
    philox_round(c, k);
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  buffer_[0] = (static_cast<std::uint64_t>(c[1]) << 32) | c[0];
  buffer_[1] = (static_cast<std::uint64_t>(c[3]) << 32) | c[2];
  available_ = 2;
  if (++counter_[0] == 0) ++counter_[1];
}

std::uint64_t RandomStream::next_u64() noexcept {
  if (available_ == 0) refill();
  return buffer_[2 - available_--];
}

RandomStream derive_stream(const StreamKey& key) noexcept {
  return RandomStream(digest(key));
}

double inverse_normal_cdf(double p) noexcept {
  if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
  if (!(p < 1.0)) return std::numeric_limits<double>::infinity();

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }

  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

double sample_time_fraction(RandomStream& stream, double e,
                            DrawLedger& ledger) {
  if (!(e > 0.0 && e < 1.0)) {
    throw Error(ErrorCode::ExponentOutOfRange,
                "time fraction exponent must lie in (0, 1)");
  }
  ledger.add(1);
  const double r = std::pow(stream.next_uniform(), 1.0 / e);
  // Tiny exponents can underflow U^{1/e}; keep r^{-1/2} finite.
  return r > 0.0 ? r : std::numeric_limits<double>::min();
}

void sample_gaussian(RandomStream& stream, std::span<double> out,
                     DrawLedger& ledger) noexcept {
  for (double& z : out) z = inverse_normal_cdf(stream.next_uniform());
  ledger.add(out.size());
}

std::vector<double> sample_gaussian(RandomStream& stream, std::size_t d,
                                    DrawLedger& ledger) {
  std::vector<double> z(d);
  sample_gaussian(stream, z, ledger);
  return z;
}

SecondMomentDiagnostic single_step_second_moment(double horizon, double e,
                                                 std::size_t d,
                                                 std::uint64_t samples,
                                                 std::uint64_t seed) {
  if (!(e > 0.0 && e < 1.0)) {
    throw Error(ErrorCode::ExponentOutOfRange, "e must lie in (0, 1)");
  }
  if (samples == 0) throw Error(ErrorCode::EmptySample, "need samples >= 1");
  if (d == 0) throw Error(ErrorCode::ZeroDimension, "need d >= 1");

  RandomStream stream(PathDigest::root(seed));
  DrawLedger ledger;
  std::vector<double> z(d), sum(d, 0.0), sum_sq(d, 0.0);
  for (std::uint64_t k = 0; k < samples; ++k) {
    const double r = sample_time_fraction(stream, e, ledger);
    sample_gaussian(stream, z, ledger);
    const double weight =
        horizon / e * std::pow(r, 1.0 - e) / std::sqrt(horizon * r);
    for (std::size_t i = 0; i < d; ++i) {
      const double u2 = weight * z[i] * weight * z[i];
      sum[i] += u2;
      sum_sq[i] += u2 * u2;
    }
  }

  SecondMomentDiagnostic out;
  const double n = static_cast<double>(samples);
  out.gradient_moment.resize(d);
  out.gradient_stderr.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double mean = sum[i] / n;
    const double var = std::max(0.0, sum_sq[i] / n - mean * mean);
    out.gradient_moment[i] = mean;
    out.gradient_stderr[i] = std::sqrt(var / n);
  }
  out.predicted = horizon / (e * (1.0 - e));
  out.heavy_tail = e < 0.2 || e > 0.8;
  return out;
}

}  // namespace mlp
