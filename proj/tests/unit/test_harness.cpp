#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "mlp/harness.hpp"

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

std::string csv_of(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows, false);
  return os.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("every builtin case passes its residual check") {
  for (const auto& name : builtin_case_names()) {
    for (std::size_t d : {1u, 5u}) {
      const BenchmarkCase bench = make_case(name, {d});
      const ResidualReport r = residual_check(bench, 128, 3);
      INFO(name << " d=" << d);
      CHECK(r.max_residual < 1e-6);
      CHECK(r.max_gradient_error < 1e-6);
    }
  }
  CHECK(code_of([] { make_case("no-such-case"); }) == ErrorCode::UnknownCase);
}

TEST_CASE("evaluation points") {
  const auto pts = evaluation_points(4);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0] == std::vector<double>(4, 0.0));
  double norm = 0.0;
  for (double v : pts[1]) norm += v * v;
  CHECK(norm == doctest::Approx(1.0));
}

TEST_CASE("exact terminal moments") {
  const std::vector<double> xi{0.0};
  // || W_1^2 ||_4 = 105^{1/4}.
  const RegularityData quad =
      case_regularity(make_case("linear-heat-quadratic"), 0.0, xi, 4.0);
  CHECK(quad.g_moment == doctest::Approx(std::pow(105.0, 0.25)).epsilon(1e-12));
  CHECK(quad.f0_moment == 0.0);
  CHECK(std::isinf(quad.lipschitz_g[0]));

  // E sin^4(W_v) = 3/8 - e^{-2v}/2 + e^{-8v}/8, increasing in v.
  const RegularityData sine =
      case_regularity(make_case("grad-free-exponential"), 0.0, xi, 4.0);
  const double m4 = 0.375 - 0.5 * std::exp(-2.0) + 0.125 * std::exp(-8.0);
  CHECK(sine.g_moment == doctest::Approx(std::pow(m4, 0.25)).epsilon(1e-12));
  CHECK(sine.lipschitz_y == doctest::Approx(0.75));
  CHECK(sine.lipschitz_g[0] == doctest::Approx(1.25));
}

TEST_CASE("exact solution norm of the quadratic case") {
  // u(s, x) = x^2 + (1 - s), so along the path u = W_v^2 + (1 - v) and
  // E u^4 = 105 v^4 + 60 c v^3 + 18 c^2 v^2 + 4 c^3 v + c^4 with c = 1 - v.
  double best = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double v = k / 1000.0, c = 1.0 - v;
    const double m = 105 * std::pow(v, 4) + 60 * c * std::pow(v, 3) +
                     18 * c * c * v * v + 4 * c * c * c * v + std::pow(c, 4);
    best = std::max(best, std::pow(m, 0.25));
  }
  const std::vector<double> xi{0.0};
  CHECK(case_solution_norm(make_case("linear-heat-quadratic"), 0.0, xi, 4.0) ==
        doctest::Approx(best).epsilon(1e-6));
  CHECK(code_of([&] {
          case_solution_norm(make_case("linear-heat-quadratic"), 0.0, xi, 3.0);
        }) == ErrorCode::HypothesisViolated);
}

TEST_CASE("forward case has the same canonical data as its backward twin") {
  const std::vector<double> xi{0.3, 0.3};
  const BenchmarkCase fwd = make_case("forward-heat", {2});
  const BenchmarkCase bwd = make_case("grad-dependent-sine", {2});
  const RegularityData a = case_regularity(fwd, 0.0, xi, 4.0);
  const RegularityData b = case_regularity(bwd, 0.0, xi, 4.0);
  CHECK(a.lipschitz_y == doctest::Approx(b.lipschitz_y));
  CHECK(a.g_moment == doctest::Approx(b.g_moment));
  CHECK(a.f0_moment == doctest::Approx(b.f0_moment));
  CHECK(default_query_time(fwd) == fwd.problem.horizon());
  CHECK(default_query_time(bwd) == 0.0);
}

TEST_CASE("M rules") {
  const MRule quarter = parse_m_rule("floor-n^0.25");
  CHECK_FALSE(quarter.fixed);
  CHECK(quarter.exponent == 0.25);
  CHECK(parse_m_rule("floor-n^1/4").exponent == 0.25);
  const MRule fixed = parse_m_rule("fixed:3");
  CHECK(fixed.fixed);
  CHECK(fixed.base == 3);
  for (const char* bad : {"fixed:0", "fixed:2x", "floor-n^", "floor-n^1/0",
                          "floor-n^-1", "n^2", ""}) {
    INFO(bad);
    CHECK(code_of([&] { parse_m_rule(bad); }) == ErrorCode::InvalidConfig);
  }
  const auto sched = make_schedule(16, quarter);
  REQUIRE(sched.size() == 16);
  CHECK(sched[0].M == 1);
  CHECK(sched[14].M == 1);
  CHECK(sched[15].M == 2);
  CHECK(make_schedule(3, fixed)[2].M == 3);
}

TEST_CASE("case config parsing") {
  const CaseConfig cfg = parse_case_config(
      "# comment\n"
      "case = grad-free-exponential\n"
      "\n"
      "d = 3\n"
      "T = 2\n"
      "lambda = -0.5\n"
      "c = 0.1\n"
      "n = 4\n"
      "M = 2\n"
      "e = 0.4\n"
      "seed = 12\n"
      "reps = 7\n"
      "t = 0.5\n"
      "x = 0.1, 0.2, 0.3\n");
  CHECK(cfg.case_name == "grad-free-exponential");
  CHECK(cfg.params.dimension == 3);
  CHECK(cfg.params.horizon == 2.0);
  CHECK(cfg.params.lambda == -0.5);
  CHECK(cfg.params.c == 0.1);
  CHECK(cfg.mlp.depth == 4);
  CHECK(cfg.mlp.base == 2);
  CHECK(cfg.mlp.time_cdf_exponent == 0.4);
  CHECK(cfg.mlp.root_seed == 12);
  CHECK(cfg.mlp.replications == 7);
  CHECK(cfg.t == 0.5);
  CHECK(cfg.x == std::vector<double>{0.1, 0.2, 0.3});

  CHECK(code_of([] { parse_case_config("colour = red\n"); }) ==
        ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_case_config("n 4\n"); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { parse_case_config("n = 1, 2\n"); }) ==
        ErrorCode::InvalidConfig);
  CHECK(code_of([] { load_case_config("/nonexistent/file.cfg"); }) ==
        ErrorCode::InvalidConfig);
}

TEST_CASE("convergence tables are reproducible") {
  const BenchmarkCase bench = make_case("grad-dependent-sine", {2});
  ConvergenceOptions opt;
  opt.replications = 10;
  opt.seed = 4;
  const auto sched = make_schedule(3, MRule{true, 0.0, 2});
  const std::string a = csv_of(run_convergence(bench, sched, opt));
  const std::string b = csv_of(run_convergence(bench, sched, opt));
  CHECK(a == b);
  CHECK(a.rfind("case,n,M,replications,rmse_value,rmse_grad_max,"
                "combined_error,error_bound,draws,wall_seconds\n", 0) == 0);
  opt.seed = 5;
  CHECK(csv_of(run_convergence(bench, sched, opt)) != a);
}

TEST_CASE("convergence rows") {
  const BenchmarkCase bench = make_case("linear-heat-quadratic");
  ConvergenceOptions opt;
  opt.replications = 20;
  const auto rows = run_convergence(bench, make_schedule(3, MRule{true, 0.0, 1}), opt);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.replications == 20);
    CHECK(r.value_sq_errors.size() == 20);
    CHECK(r.gradient_sq_errors.size() == 1);
    CHECK(r.draws == cost_rv(1, r.n, 1));
    CHECK(combined_error_ucl(r) >= r.combined_error);
    // Infinite terminal Lipschitz constant: the bound is vacuous.
    CHECK(std::isinf(r.error_bound));
  }
  // f = 0 and M = 1: the estimate does not depend on n.
  CHECK(rows[1].rmse_value == rows[0].rmse_value);
  CHECK(rows[2].rmse_grad_max == rows[0].rmse_grad_max);

  std::ostringstream os;
  write_csv(os, rows, false);
  CHECK(os.str().find(",inf,") != std::string::npos);
}

TEST_CASE("observed error sits below the bound") {
  const BenchmarkCase bench = make_case("grad-free-exponential", {1, 1.0, 0.0});
  ConvergenceOptions opt;
  opt.replications = 50;
  const auto rows = run_convergence(bench, make_schedule(2, MRule{true, 0.0, 2}), opt);
  for (const auto& r : rows) {
    CHECK(std::isfinite(r.error_bound));
    CHECK(combined_error_ucl(r) <= r.error_bound);
  }
}

TEST_CASE("KS critical value") {
  CHECK(ks_critical_1pct(10000) == doctest::Approx(0.016276));
}

TEST_CASE("battery detects the mutated weight and heavy tails") {
  BatteryOptions opt;
  opt.weight = +[](double tau, double r, double e) { return tau * r / e; };
  opt.diagnostic_exponent = 0.999;
  opt.ladder_samples = 20000;
  opt.convergence_replications = 10;
  const BatteryReport rep = run_test_battery(0, opt);
  CHECK_FALSE(rep.all_passed());
  int ladder_failures = 0;
  bool diag_failed = false;
  for (const auto& e : rep.entries) {
    if (e.name.rfind("unbiasedness-ladder", 0) == 0 && !e.passed) ++ladder_failures;
    if (e.name.rfind("variance-diagnostic", 0) == 0) {
      diag_failed = !e.passed;
      CHECK(e.detail.find("heavy-tail") != std::string::npos);
    }
  }
  CHECK(ladder_failures == 2);
  CHECK(diag_failed);
}

}  // TEST_SUITE
