#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mlp/benchmarks.hpp"
#include "mlp/bounds.hpp"
#include "mlp/moments.hpp"

using namespace mlp;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidConfig;
}

RegularityData small_data(std::size_t d, double q) {
  RegularityData r;
  r.lipschitz_y = 0.0;
  r.lipschitz_z.assign(d, 0.0);
  r.lipschitz_fx.assign(d, 0.0);
  r.lipschitz_g.assign(d, 0.1);
  r.g_moment = 0.1;
  r.f0_moment = 0.0;
  r.q = q;
  return r;
}

// p = 2.2, a = 0.9 on a short horizon: a setting where the bound falls with n.
ScheduleRequest feasible_request(double eps) {
  ScheduleRequest req;
  req.target_eps = eps;
  req.dimension = 1;
  req.p = 2.2;
  req.density_exponent = 0.9;
  req.m_exponent = 0.895;
  req.horizon = 0.01;
  req.regularity = small_data(1, norm_exponent(2.2));
  return req;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("gradient bound reduces to K without coupling") {
  RegularityData r;
  r.lipschitz_g = {0.5, 2.0};
  r.lipschitz_z = {0.0, 0.0};
  const auto b = gradient_bound(r, 1.0, 0.0);
  CHECK(b == std::vector<double>{0.5, 2.0});

  r.lipschitz_g = {0.0};
  r.lipschitz_z = {0.0};
  r.lipschitz_fx = {1.0};
  CHECK(gradient_bound(r, 3.0, 1.0)[0] == doctest::Approx(2.0));

  r.lipschitz_y = 0.5;
  r.lipschitz_g = {1.0};
  r.lipschitz_fx = {0.0};
  CHECK(gradient_bound(r, 2.0, 0.0)[0] == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("gradient bound dominates the exact gradient of the sine cases") {
  for (const char* name : {"grad-free-exponential", "grad-dependent-sine"}) {
    const BenchmarkCase bench = make_case(name, {3});
    for (double t : {0.0, 0.5, 0.9}) {
      const std::vector<double> xi{0.1, -0.7, 1.3};
      const RegularityData reg = case_regularity(bench, t, xi, 4.0);
      const auto bound = gradient_bound(reg, bench.params.horizon, t);
      for (double shift : {-2.0, 0.0, 0.5, 3.0}) {
        std::vector<double> x = xi;
        for (double& v : x) v += shift;
        const ExactField ex = bench.exact(t, x);
        for (std::size_t i = 0; i < 3; ++i) {
          CHECK(std::abs(ex.gradient[i]) <= bound[i] * (1 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("solution moment bound") {
  RegularityData r = small_data(2, 4.0);
  r.lipschitz_g = {0.0, 0.0};
  r.g_moment = 1.5;
  CHECK(solution_moment_bound(r, 1.0) == doctest::Approx(1.5));
  r.g_moment = 0.0;
  CHECK(solution_moment_bound(r, 1.0) == 0.0);
  // Infinite K does not leak through zero gradient coupling.
  r.lipschitz_g = {std::numeric_limits<double>::infinity(), 0.0};
  CHECK(solution_moment_bound(r, 1.0) == 0.0);
}

TEST_CASE("norm and rate exponents") {
  CHECK(norm_exponent(4.0) == 4.0);
  CHECK(norm_exponent(3.0) == 6.0);
  CHECK(std::isinf(norm_exponent(2.0)));
  CHECK(rate_exponent(4.0, 0.5) == doctest::Approx(0.125));
  CHECK(rate_exponent(2.0, 0.5) == doctest::Approx(0.25));
}

TEST_CASE("error bound: zero data gives zero") {
  ErrorBoundInput in;
  in.regularity = small_data(2, 4.0);
  in.regularity.lipschitz_g = {0.0, 0.0};
  in.regularity.g_moment = 0.0;
  in.solution_norm = 0.0;
  in.depth = 3;
  in.base = 2;
  CHECK(error_bound(in) == 0.0);
  CHECK(std::isinf(log_error_bound(in)));
}

TEST_CASE("error bound grows with M at fixed n") {
  ErrorBoundInput in;
  in.regularity = small_data(1, 4.0);
  in.depth = 1;
  double prev = 0.0;
  for (std::uint64_t M = 2; M <= 10; ++M) {
    in.base = M;
    const double b = error_bound(in);
    CHECK(b >= prev);
    prev = b;
  }
}

TEST_CASE("error bound falls with n at a fixed large M") {
  ErrorBoundInput in = {};
  in.p = 2.2;
  in.density_exponent = 0.9;
  in.horizon = 0.01;
  in.regularity = small_data(1, norm_exponent(2.2));
  in.base = 100;
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= 8; ++n) {
    in.depth = n;
    const double b = error_bound(in);
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("error bound grows with the problem data") {
  ErrorBoundInput in;
  in.regularity = small_data(1, 4.0);
  in.depth = 2;
  in.base = 2;
  const double base = error_bound(in);
  ErrorBoundInput more = in;
  more.regularity.lipschitz_y = 1.0;
  CHECK(error_bound(more) > base);
  more = in;
  more.regularity.g_moment = 10.0;
  CHECK(error_bound(more) > base);
  more = in;
  more.regularity.lipschitz_g = {5.0};
  CHECK(error_bound(more) > base);
}

TEST_CASE("error bound hypotheses") {
  ErrorBoundInput in;
  in.regularity = small_data(1, 4.0);
  in.density_exponent = 0.7;  // p = 4 needs a in (1/3, 2/3)
  CHECK(code_of([&] { error_bound(in); }) == ErrorCode::HypothesisViolated);
  in.density_exponent = 0.3;
  CHECK(code_of([&] { error_bound(in); }) == ErrorCode::HypothesisViolated);
  in.density_exponent = 0.5;
  in.regularity.q = 2.0;
  CHECK(code_of([&] { error_bound(in); }) == ErrorCode::HypothesisViolated);
  in.regularity.q = 4.0;
  in.depth = 0;
  CHECK(code_of([&] { error_bound(in); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("cost recursion examples") {
  CHECK(cost_rv(1, 0, 5) == 0);
  CHECK(cost_rv(1, 1, 1) == 3);
  CHECK(cost_rv(1, 1, 2) == 6);
  CHECK(cost_rv(1, 2, 2) == 28);
  CHECK(cost_rv(10, 5, 5) == 1277005);
  CHECK(to_string(cost_rv(10, 5, 5)) == "1277005");
  CHECK(cost_bound_closed(1, 1, 2) == 10);
  CHECK(cost_bound_closed(1, 2, 2) == 100);
  for (std::size_t d : {1u, 3u, 10u, 100u}) {
    for (int n = 1; n <= 8; ++n) {
      for (std::uint64_t M = 1; M <= 8; ++M) {
        CHECK(cost_rv(d, n, M) <= cost_bound_closed(d, n, M));
      }
    }
  }
}

TEST_CASE("cost overflow is reported") {
  CHECK(code_of([] { cost_rv(1, 40, 1000); }) == ErrorCode::Overflow);
  CHECK(code_of([] { cost_bound_closed(1, 40, 1000); }) == ErrorCode::Overflow);
}

TEST_CASE("M-rule exponent interval and base") {
  const auto [lo, hi] = admissible_m_exponent(0.5);
  CHECK(lo == 0.0);
  CHECK(hi == 0.5);
  const auto [lo2, hi2] = admissible_m_exponent(0.4);
  CHECK(lo2 == doctest::Approx(1.0 / 3.0));
  CHECK(hi2 == doctest::Approx(0.6));
  CHECK(schedule_base(1, 0.25) == 1);
  CHECK(schedule_base(16, 0.25) == 2);
  CHECK(schedule_base(81, 0.25) == 3);
  CHECK(schedule_base(10, 0.5) == 3);
}

TEST_CASE("schedule: zero data needs one level") {
  ScheduleRequest req;
  req.regularity = small_data(1, 4.0);
  req.regularity.lipschitz_g = {0.0};
  req.regularity.g_moment = 0.0;
  req.solution_norm = 0.0;
  const ScheduleResult res = schedule(req);
  CHECK(res.depth == 1);
  CHECK(res.bound == 0.0);
  CHECK(res.predicted_cost == cost_rv(1, 1, 1));
}

TEST_CASE("schedule: a target above the n = 1 bound needs one level") {
  ScheduleRequest req = feasible_request(1.0);
  ErrorBoundInput in;
  in.p = req.p;
  in.density_exponent = req.density_exponent;
  in.horizon = req.horizon;
  in.regularity = req.regularity;
  in.depth = 1;
  in.base = 1;
  req.target_eps = error_bound(in) * 1.01;
  CHECK(schedule(req).depth == 1);
}

TEST_CASE("schedule: tighter targets never need fewer levels") {
  int prev = 0;
  for (double eps : {1.0, 0.5, 0.25, 0.1, 0.01}) {
    const ScheduleResult res = schedule(feasible_request(eps));
    CHECK(res.depth >= prev);
    CHECK(res.bound <= eps);
    CHECK(res.base == schedule_base(res.depth, 0.895));
    prev = res.depth;
  }
  CHECK(schedule(feasible_request(0.25)).depth >=
        schedule(feasible_request(0.5)).depth);
}

TEST_CASE("schedule errors") {
  ScheduleRequest req = feasible_request(0.1);
  req.m_exponent = 0.95;
  CHECK(code_of([&] { schedule(req); }) == ErrorCode::AdmissibilityViolated);
  req = feasible_request(1e-300);
  req.max_depth = 5;
  CHECK(code_of([&] { schedule(req); }) == ErrorCode::NoFeasibleDepth);
  req = feasible_request(0.0);
  CHECK(code_of([&] { schedule(req); }) == ErrorCode::InvalidConfig);
}

}  // TEST_SUITE

TEST_SUITE("bounds") {

TEST_CASE("estimated moments agree with the exact benchmark moments") {
  const BenchmarkCase bench = make_case("grad-dependent-sine", {2});
  const std::vector<double> xi{0.3, -0.4};
  const RegularityData exact = case_regularity(bench, 0.0, xi, 4.0);
  MomentSampling sampling;
  sampling.samples = 50000;
  const RegularityData est =
      estimate_regularity(bench.problem, 0.0, xi, 4.0, sampling, exact.lipschitz_fx);
  CHECK(est.moments_estimated);
  CHECK_FALSE(exact.moments_estimated);
  CHECK(est.lipschitz_y == doctest::Approx(exact.lipschitz_y));
  CHECK(est.lipschitz_z == exact.lipschitz_z);
  CHECK(est.g_moment == doctest::Approx(exact.g_moment).epsilon(0.03));
  CHECK(est.f0_moment == doctest::Approx(exact.f0_moment).epsilon(0.03));

  // Forward problems are estimated on their backward form.
  const BenchmarkCase fwd = make_case("forward-heat", {2});
  const RegularityData est_fwd =
      estimate_regularity(fwd.problem, 0.0, xi, 4.0, sampling, exact.lipschitz_fx);
  CHECK(est_fwd.lipschitz_y == doctest::Approx(exact.lipschitz_y));
  CHECK(est_fwd.f0_moment == doctest::Approx(est.f0_moment).epsilon(1e-9));

  const std::vector<double> wrong{0.0};
  CHECK(code_of([&] { estimate_regularity(bench.problem, 0.0, wrong, 4.0); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { estimate_regularity(bench.problem, 1.0, xi, 4.0); }) ==
        ErrorCode::QueryOutOfDomain);
}

}  // TEST_SUITE
