#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "mlp/bounds.hpp"
#include "mlp/engine.hpp"
#include "mlp/harness.hpp"

using namespace mlp;

namespace {

double zero_f(double, std::span<const double>, double, std::span<const double>) {
  return 0.0;
}

PdeProblem linear_problem(std::vector<double> a, double T) {
  const std::size_t d = a.size();
  auto g = [a](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += a[i] * x[i];
    return s;
  };
  std::vector<double> lip_g(d);
  for (std::size_t i = 0; i < d; ++i) lip_g[i] = std::abs(a[i]);
  return PdeProblem(d, T, g, zero_f, std::vector<double>(d + 1, 0.0), lip_g);
}

MlpConfig config(int n, std::uint64_t M, std::uint64_t seed = 0) {
  MlpConfig c;
  c.depth = n;
  c.base = M;
  c.root_seed = seed;
  return c;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidConfig;
}

double weight_without_density(double tau, double r, double e) {
  return tau * r / e;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("depth zero returns zeros without drawing") {
  const BenchmarkCase bench = make_case("grad-dependent-sine", {3});
  const std::vector<double> x{0.1, 0.2, 0.3};
  const FieldEstimate est = evaluate(bench.problem, config(0, 4), {1}, 0.0, x);
  CHECK(est.value == 0.0);
  CHECK(est.gradient == std::vector<double>(3, 0.0));
  CHECK(est.draws == 0);
}

TEST_CASE("one step at d = 1, M = 1 draws three scalars") {
  const BenchmarkCase bench = make_case("grad-dependent-sine");
  const std::vector<double> x{0.0};
  CHECK(evaluate(bench.problem, config(1, 1), {1}, 0.0, x).draws == 3);
  CHECK(evaluate(bench.problem, config(1, 2), {1}, 0.0, x).draws == 6);
  CHECK(evaluate(bench.problem, config(2, 2), {1}, 0.0, x).draws == 28);
}

TEST_CASE("draw ledger equals the cost recursion") {
  for (std::size_t d : {1u, 2u, 4u}) {
    const BenchmarkCase bench = make_case("grad-dependent-sine", {d});
    const std::vector<double> x(d, 0.2);
    for (int n = 0; n <= 3; ++n) {
      for (std::uint64_t M = 1; M <= 3; ++M) {
        const auto est = evaluate(bench.problem, config(n, M, 5), {2}, 0.1, x);
        CHECK(est.draws == cost_rv(d, n, M));
      }
    }
  }
}

TEST_CASE("constant terminal data and f = 0 give exactly (c, 0)") {
  auto g = [](std::span<const double>) { return 1.75; };
  PdeProblem p(2, 1.0, g, zero_f, {0.0, 0.0, 0.0}, {0.0, 0.0});
  const std::vector<double> x{0.3, -1.0};
  for (int n = 1; n <= 3; ++n) {
    const auto est = evaluate(p, config(n, 2, 9), {1}, 0.25, x);
    CHECK(est.value == 1.75);
    CHECK(est.gradient == std::vector<double>{0.0, 0.0});
  }
}

TEST_CASE("with M = 1 and f = 0 every depth gives the same estimate") {
  const PdeProblem p = linear_problem({0.5, -1.0}, 1.0);
  const std::vector<double> x{0.2, 0.4};
  const FieldEstimate first = evaluate(p, config(1, 1, 3), {4}, 0.0, x);
  for (int n = 2; n <= 5; ++n) {
    const FieldEstimate est = evaluate(p, config(n, 1, 3), {4}, 0.0, x);
    CHECK(est.value == first.value);
    CHECK(est.gradient == first.gradient);
  }
}

TEST_CASE("linear terminal data: the one-step mean is (a.x, a)") {
  const std::vector<double> a{1.0, -2.0};
  const PdeProblem p = linear_problem(a, 1.0);
  const std::vector<double> x{0.5, 0.25};
  MlpConfig c = config(1, 3, 17);
  c.replications = 20000;
  const auto est = replicate(p, c, 0.0, x);
  const double n = static_cast<double>(est.size());
  double mv = 0, sv = 0;
  std::vector<double> mg(2, 0.0), sg(2, 0.0);
  for (const auto& e : est) {
    mv += e.value;
    sv += e.value * e.value;
    for (int i = 0; i < 2; ++i) {
      mg[i] += e.gradient[i];
      sg[i] += e.gradient[i] * e.gradient[i];
    }
  }
  auto within = [&](double sum, double sq, double target) {
    const double mean = sum / n;
    const double se = std::sqrt(std::max(sq / n - mean * mean, 0.0) / n);
    return std::abs(mean - target) <= 4.0 * se + 1e-12;
  };
  CHECK(within(mv, sv, 0.0));
  CHECK(within(mg[0], sg[0], 1.0));
  CHECK(within(mg[1], sg[1], -2.0));
}

TEST_CASE("one-step rmse agrees with a direct simulation of the same estimator") {
  // n = 1, M = 1, f = 0, g = a x: value error a sqrt(T) Z, gradient error
  // a (Z^2 - 1).
  const double a = 1.5, T = 2.0;
  const PdeProblem p = linear_problem({a}, T);
  const std::vector<double> x{0.0};
  MlpConfig c = config(1, 1, 23);
  c.replications = 20000;
  const auto est = replicate(p, c, 0.0, x);
  const std::vector<double> grad{a};
  const RmseResult r = rmse(est, 0.0, grad);

  RandomStream s(PathDigest::root(1234));
  DrawLedger ledger;
  double sv = 0, sg = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    double z;
    sample_gaussian(s, std::span<double>(&z, 1), ledger);
    sv += a * a * T * z * z;
    sg += a * a * (z * z - 1) * (z * z - 1);
  }
  CHECK(r.value == doctest::Approx(std::sqrt(sv / n)).epsilon(0.03));
  CHECK(r.gradient_max == doctest::Approx(std::sqrt(sg / n)).epsilon(0.05));
  CHECK(r.combined == doctest::Approx(std::hypot(r.value, r.gradient_max)));
}

TEST_CASE("rmse arithmetic") {
  std::vector<FieldEstimate> est(3);
  for (auto& e : est) {
    e.value = 2.0;
    e.gradient = {1.0, 3.0};
  }
  const std::vector<double> ref_grad{1.0, 1.0};
  const RmseResult r = rmse(est, 1.0, ref_grad);
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.gradient_max == doctest::Approx(2.0));
  CHECK(r.combined == doctest::Approx(std::sqrt(5.0)));

  const RmseResult exact = rmse(est, 2.0, est[0].gradient);
  CHECK(exact.combined == 0.0);

  CHECK(code_of([&] { rmse({}, 0.0, ref_grad); }) == ErrorCode::EmptySample);
}

TEST_CASE("replications do not depend on the thread count") {
  const BenchmarkCase bench = make_case("grad-dependent-sine", {2});
  const std::vector<double> x{0.3, -0.2};
  MlpConfig c = config(3, 2, 77);
  c.replications = 24;
  EngineOptions serial, parallel;
  serial.threads = 1;
  parallel.threads = 4;
  const auto a = replicate(bench.problem, c, 0.0, x, serial);
  const auto b = replicate(bench.problem, c, 0.0, x, parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].value == b[k].value);
    CHECK(a[k].gradient == b[k].gradient);
    CHECK(a[k].draws == b[k].draws);
  }
  // Replication k runs on path (k + 1).
  const auto single = evaluate(bench.problem, c, {5}, 0.0, x);
  CHECK(single.value == a[4].value);
  CHECK(single.gradient == a[4].gradient);
}

TEST_CASE("solve maps forward time onto the backward estimator") {
  const BenchmarkCase fwd = make_case("forward-heat");
  const BenchmarkCase bwd = make_case("grad-dependent-sine");
  const std::vector<double> x{0.4};
  MlpConfig c = config(2, 2, 8);
  c.replications = 5;
  const auto a = solve(fwd.problem, c, fwd.problem.horizon(), x);
  const auto b = solve(bwd.problem, c, 0.0, x);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].value == doctest::Approx(b[k].value).epsilon(1e-12));
    CHECK(a[k].gradient[0] == doctest::Approx(b[k].gradient[0]).epsilon(1e-12));
  }
}

TEST_CASE("query errors") {
  const BenchmarkCase bench = make_case("grad-dependent-sine", {2});
  const std::vector<double> x{0.0, 0.0};
  const std::vector<double> x3{0.0, 0.0, 0.0};
  const PdeProblem& p = bench.problem;
  CHECK(code_of([&] { evaluate(p, config(1, 1), {1}, 1.0, x); }) ==
        ErrorCode::QueryAtTerminalTime);
  CHECK(code_of([&] { evaluate(p, config(1, 1), {1}, -0.5, x); }) ==
        ErrorCode::QueryOutOfDomain);
  CHECK(code_of([&] { evaluate(p, config(1, 1), {1}, 1.5, x); }) ==
        ErrorCode::QueryOutOfDomain);
  CHECK(code_of([&] { evaluate(p, config(1, 1), {1}, 0.0, x3); }) ==
        ErrorCode::DimensionMismatch);
  const BenchmarkCase fwd = make_case("forward-heat", {2});
  CHECK(code_of([&] { evaluate(fwd.problem, config(1, 1), {1}, 0.0, x); }) ==
        ErrorCode::NotCanonical);
  MlpConfig bad = config(1, 1);
  bad.time_cdf_exponent = 1.0;
  CHECK(code_of([&] { evaluate(p, bad, {1}, 0.0, x); }) ==
        ErrorCode::ExponentOutOfRange);
}

TEST_CASE("cost guard refuses oversized runs before drawing") {
  const BenchmarkCase bench = make_case("grad-dependent-sine");
  const std::vector<double> x{0.0};
  EngineOptions small;
  small.cost_budget = 27;
  CHECK(code_of([&] { evaluate(bench.problem, config(2, 2), {1}, 0.0, x, small); }) ==
        ErrorCode::DepthCostGuard);
  small.cost_budget = 28;
  CHECK_NOTHROW(evaluate(bench.problem, config(2, 2), {1}, 0.0, x, small));
  // Counts beyond 128 bits are treated as over budget.
  CHECK(code_of([&] { evaluate(bench.problem, config(60, 1u << 20), {1}, 0.0, x); }) ==
        ErrorCode::DepthCostGuard);

  setenv("MLP_COST_BUDGET", "12345", 1);
  CHECK(cost_budget_from_env() == 12345.0);
  setenv("MLP_COST_BUDGET", "junk", 1);
  CHECK(cost_budget_from_env(7.0) == 7.0);
  unsetenv("MLP_COST_BUDGET");
  CHECK(cost_budget_from_env(7.0) == 7.0);
}

TEST_CASE("level terms describe the top-level sum") {
  const auto terms = level_terms(config(3, 2), {1});
  REQUIRE(terms.size() == 3);
  CHECK(terms[0].inner_count == 8);
  CHECK(terms[1].inner_count == 4);
  CHECK(terms[2].inner_count == 2);
  CHECK_FALSE(terms[0].has_minus());
  CHECK(terms[0].plus_prefix == ThetaPath{1, 0});
  CHECK(terms[2].plus_prefix == ThetaPath{1, 2});
  CHECK(terms[2].minus_prefix == ThetaPath{1, -2});
}

TEST_CASE("unbiasedness ladder passes and catches a wrong weight") {
  const BenchmarkCase bench = make_case("grad-dependent-sine");
  const std::vector<double> x = evaluation_points(1)[1];
  for (int n : {1, 2}) {
    CHECK(unbiasedness_ladder(bench, n, 2, 20000, 1, x).passed());
  }
  EngineOptions mutated;
  mutated.weight = &weight_without_density;
  const auto res = unbiasedness_ladder(bench, 1, 2, 20000, 1, x, mutated);
  CHECK_FALSE(res.passed());
}

}  // TEST_SUITE
