// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#include "mlp/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace mlp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kTimeGrid = 100;

double binomial(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0));
}

double mean_of(std::span<const double> x, double (*h)(double)) {
  double s = 0.0;
  for (double v : x) s += h(v);
  return s / static_cast<double>(x.size());
}

double sin_fn(double v) { return std::sin(v); }
double cos_fn(double v) { return std::cos(v); }

// Sine-family exact solution e^{lambda tau} (1/d) sum sin x_i.
ExactField sine_field(double growth, std::span<const double> x) {
  const double d = static_cast<double>(x.size());
  ExactField out;
  out.value = growth * mean_of(x, sin_fn);
  out.gradient.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.gradient[i] = growth * std::cos(x[i]) / d;
  }
  return out;
}

// Raw moments E[h(a + b Z)^k], k = 0..q, for h = sin or cos, from
// E[e^{i m (a + b Z)}] = e^{i m a - m^2 b^2 / 2}.
std::vector<double> trig_moments(double a, double var, bool sine, int q) {
  using cd = std::complex<double>;
  std::vector<double> out(static_cast<std::size_t>(q) + 1, 0.0);
  for (int k = 0; k <= q; ++k) {
    cd total = 0.0;
    for (int j = 0; j <= k; ++j) {
      const int m = 2 * j - k;
      const cd charfn = std::polar(std::exp(-0.5 * m * m * var), m * a);
      const double sign = (sine && ((k - j) % 2 == 1)) ? -1.0 : 1.0;
      total += binomial(k, j) * sign * charfn;
    }
    // sin^k = (2i)^{-k} sum ..., cos^k = 2^{-k} sum ...
    const cd scale = sine ? std::pow(cd(0.0, 2.0), -k) : cd(std::ldexp(1.0, -k));
    out[static_cast<std::size_t>(k)] = (scale * total).real();
  }
  return out;
}

// Raw moments of a sum of independent terms from their raw moments.
std::vector<double> convolve_moments(const std::vector<double>& a,
                                     const std::vector<double>& b) {
  const int q = static_cast<int>(a.size()) - 1;
  std::vector<double> out(a.size(), 0.0);
  for (int k = 0; k <= q; ++k) {
    for (int j = 0; j <= k; ++j) out[k] += binomial(k, j) * a[j] * b[k - j];
  }
  return out;
}

// || (1/d) sum_i h(xi_i + sqrt(v) Z_i) ||_q.
double trig_mean_norm(std::span<const double> xi, double v, bool sine, int q) {
  std::vector<double> total(static_cast<std::size_t>(q) + 1, 0.0);
  total[0] = 1.0;
  for (double a : xi) total = convolve_moments(total, trig_moments(a, v, sine, q));
  const double d = static_cast<double>(xi.size());
  return std::pow(std::max(total[q], 0.0), 1.0 / q) / d;
}

// Raw moments from cumulants: mu_n = sum_k C(n-1, k-1) kappa_k mu_{n-k}.
double moment_from_cumulants(const std::vector<double>& kappa, int q) {
  std::vector<double> mu(static_cast<std::size_t>(q) + 1, 0.0);
  mu[0] = 1.0;
  for (int n = 1; n <= q; ++n) {
    for (int k = 1; k <= n; ++k) {
      mu[n] += binomial(n - 1, k - 1) * kappa[k] * mu[n - k];
    }
  }
  return mu[q];
}

// || |xi + sqrt(v) Z|^2 + shift ||_q via noncentral chi-square cumulants.
double quadratic_norm(std::span<const double> xi, double v, double shift,
                      int q) {
  std::vector<double> kappa(static_cast<std::size_t>(q) + 1, 0.0);
  for (int k = 1; k <= q; ++k) {
    const double front = std::ldexp(std::tgamma(k), k - 1);
    for (double a : xi) {
      kappa[k] += front * (std::pow(v, k) + k * a * a * std::pow(v, k - 1));
    }
  }
  kappa[1] += shift;
  return std::pow(std::max(moment_from_cumulants(kappa, q), 0.0), 1.0 / q);
}

// || a + sqrt(v) Z ||_q.
double gaussian_norm(double a, double v, int q) {
  std::vector<double> kappa(static_cast<std::size_t>(q) + 1, 0.0);
  kappa[1] = a;
  if (q >= 2) kappa[2] = v;
  return std::pow(std::max(moment_from_cumulants(kappa, q), 0.0), 1.0 / q);
}

int even_order(double q) {
  const double r = std::round(q);
  if (!(std::abs(q - r) < 1e-9) || static_cast<long>(r) % 2 != 0 || r < 2) {
    throw Error(ErrorCode::HypothesisViolated,
                "exact benchmark norms need an even integer q");
  }
  return static_cast<int>(r);
}

bool is_sine(CaseKind kind) { return kind != CaseKind::LinearHeatQuadratic; }
bool has_gradient_term(CaseKind kind) {
  return kind == CaseKind::GradDependentSine || kind == CaseKind::ForwardHeat;
}

// Canonical-form parameters: horizon and query time of the backward problem.
void check_query(const BenchmarkCase& bench, double t,
                 std::span<const double> xi) {
  if (xi.size() != bench.params.dimension) {
    throw Error(ErrorCode::DimensionMismatch, "query point has wrong size");
  }
  if (!(t >= 0.0 && t < bench.params.horizon)) {
    throw Error(ErrorCode::QueryOutOfDomain, "t must lie in [0, T)");
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    try {
      out.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidConfig, "bad number '" + item + "'");
    }
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& builtin_case_names() {
  static const std::vector<std::string> names = {
      "linear-heat-quadratic", "grad-free-exponential", "grad-dependent-sine",
      "forward-heat"};
  return names;
}

BenchmarkCase make_case(const std::string& name,
                        const BenchmarkParams& params) {
  const std::size_t d = params.dimension;
  const double T = params.horizon;
  const double lambda = params.lambda;
  const double c = params.c;
  const double dd = static_cast<double>(d);
  const double ly = std::abs(lambda + 0.5);
  const std::vector<double> k_sine(d, (std::abs(lambda) + 1.0) / dd);

  auto sine_terminal = [](std::span<const double> x) {
    return mean_of(x, sin_fn);
  };
  // f of the gradient-dependent case in backward time s.
  auto sine_f = [=](double s, std::span<const double> x, double y,
                    std::span<const double> z) {
    double zsum = 0.0;
    for (double v : z) zsum += v;
    return (lambda + 0.5) * y +
           c * (zsum - std::exp(lambda * (T - s)) * mean_of(x, cos_fn));
  };

  std::optional<BenchmarkCase> out;
  if (name == "linear-heat-quadratic") {
    auto g = [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return s;
    };
    auto f = [](double, std::span<const double>, double,
                std::span<const double>) { return 0.0; };
    PdeProblem problem(d, T, g, f, std::vector<double>(d + 1, 0.0),
                       std::vector<double>(d, kInf));
    ExactFn exact = [=](double t, std::span<const double> x) {
      ExactField e;
      e.value = g(x) + dd * (T - t);
      e.gradient.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) e.gradient[i] = 2.0 * x[i];
      return e;
    };
    out.emplace(BenchmarkCase{name, CaseKind::LinearHeatQuadratic, params,
                              std::move(problem), std::move(exact)});
  } else if (name == "grad-free-exponential") {
    auto f = [lambda](double, std::span<const double>, double y,
                      std::span<const double>) { return (lambda + 0.5) * y; };
    std::vector<double> lip(d + 1, 0.0);
    lip[0] = ly;
    PdeProblem problem(d, T, sine_terminal, f, lip, k_sine);
    ExactFn exact = [=](double t, std::span<const double> x) {
      return sine_field(std::exp(lambda * (T - t)), x);
    };
    out.emplace(BenchmarkCase{name, CaseKind::GradFreeExponential, params,
                              std::move(problem), std::move(exact)});
  } else if (name == "grad-dependent-sine") {
    std::vector<double> lip(d + 1, std::abs(c));
    lip[0] = ly;
    PdeProblem problem(d, T, sine_terminal, sine_f, lip, k_sine);
    ExactFn exact = [=](double t, std::span<const double> x) {
      return sine_field(std::exp(lambda * (T - t)), x);
    };
    out.emplace(BenchmarkCase{name, CaseKind::GradDependentSine, params,
                              std::move(problem), std::move(exact)});
  } else if (name == "forward-heat") {
    // u_t = Lap u + f on [0, T/2]; forward time t is backward time T - 2t.
    const double tf = 0.5 * T;
    auto f = [=](double t, std::span<const double> x, double y,
                 std::span<const double> z) {
      return 2.0 * sine_f(2.0 * (tf - t), x, y, z);
    };
    std::vector<double> lip(d + 1, 2.0 * std::abs(c));
    lip[0] = 2.0 * ly;
    PdeProblem problem(d, tf, sine_terminal, f, lip, k_sine,
                       TimeConvention::ForwardFullLaplacian);
    ExactFn exact = [=](double t, std::span<const double> x) {
      return sine_field(std::exp(lambda * 2.0 * t), x);
    };
    out.emplace(BenchmarkCase{name, CaseKind::ForwardHeat, params,
                              std::move(problem), std::move(exact)});
  } else {
    throw Error(ErrorCode::UnknownCase, "no builtin case named '" + name + "'");
  }

  const ResidualReport report = residual_check(*out, 64);
  if (!(report.max_residual < 1e-6) || !(report.max_gradient_error < 1e-6)) {
    throw Error(ErrorCode::InvalidConfig,
                "case '" + name + "' fails its residual check");
  }
  return std::move(*out);
}

std::vector<std::vector<double>> evaluation_points(std::size_t dimension) {
  const double v = 1.0 / std::sqrt(static_cast<double>(dimension));
  return {std::vector<double>(dimension, 0.0),
          std::vector<double>(dimension, v)};
}

ResidualReport residual_check(const BenchmarkCase& bench, std::size_t points,
                              std::uint64_t seed) {
  const PdeProblem& p = bench.problem;
  const std::size_t d = p.dimension();
  const double T = p.horizon();
  const double diffusion = p.is_canonical() ? 0.5 : 1.0;
  const double sign = p.is_canonical() ? 1.0 : -1.0;  // u_t vs -u_t
  const double ht = 1e-5;
  const double hx = 1e-3;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> time(0.1 * T, 0.9 * T);
  std::normal_distribution<double> space(0.0, 1.0);

  ResidualReport report;
  std::vector<double> x(d), xp(d);
  for (std::size_t k = 0; k < points; ++k) {
    const double t = time(rng);
    for (double& v : x) v = space(rng);
    const ExactField here = bench.exact(t, x);
    const double ut =
        (bench.exact(t + ht, x).value - bench.exact(t - ht, x).value) /
        (2.0 * ht);
    double lap = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      xp = x;
      xp[i] = x[i] + hx;
      const double up = bench.exact(t, xp).value;
      xp[i] = x[i] - hx;
      const double um = bench.exact(t, xp).value;
      lap += (up - 2.0 * here.value + um) / (hx * hx);
      report.max_gradient_error = std::max(
          report.max_gradient_error,
          std::abs((up - um) / (2.0 * hx) - here.gradient[i]));
    }
    const double residual =
        sign * ut + diffusion * lap + p.f(t, x, here.value, here.gradient);
    report.max_residual = std::max(report.max_residual, std::abs(residual));
    ++report.points;
  }
  return report;
}

RegularityData case_regularity(const BenchmarkCase& bench, double t,
                               std::span<const double> xi, double q) {
  check_query(bench, t, xi);
  const int order = even_order(q);
  const auto& pr = bench.params;
  const std::size_t d = pr.dimension;
  const double dd = static_cast<double>(d);
  const double T = pr.horizon;

  RegularityData reg;
  reg.q = q;
  reg.lipschitz_z.assign(d, 0.0);
  reg.lipschitz_fx.assign(d, 0.0);
  if (bench.kind == CaseKind::LinearHeatQuadratic) {
    reg.lipschitz_g.assign(d, kInf);
  } else {
    reg.lipschitz_y = std::abs(pr.lambda + 0.5);
    reg.lipschitz_g.assign(d, (std::abs(pr.lambda) + 1.0) / dd);
  }
  if (has_gradient_term(bench.kind)) {
    reg.lipschitz_z.assign(d, std::abs(pr.c));
    reg.lipschitz_fx.assign(
        d, std::abs(pr.c) * std::exp(std::max(pr.lambda, 0.0) * T) / dd);
  }

  for (int k = 0; k <= kTimeGrid; ++k) {
    const double s = t + (T - t) * k / kTimeGrid;
    const double v = s - t;
    if (is_sine(bench.kind)) {
      reg.g_moment =
          std::max(reg.g_moment, trig_mean_norm(xi, v, true, order));
      if (has_gradient_term(bench.kind)) {
        reg.f0_moment = std::max(
            reg.f0_moment, std::abs(pr.c) * std::exp(pr.lambda * (T - s)) *
                               trig_mean_norm(xi, v, false, order));
      }
    } else {
      reg.g_moment = std::max(reg.g_moment, quadratic_norm(xi, v, 0.0, order));
    }
  }
  return reg;
}

double case_solution_norm(const BenchmarkCase& bench, double t,
                          std::span<const double> xi, double q) {
  check_query(bench, t, xi);
  const int order = even_order(q);
  const auto& pr = bench.params;
  const double dd = static_cast<double>(pr.dimension);
  const double T = pr.horizon;

  double out = 0.0;
  for (int k = 0; k <= kTimeGrid; ++k) {
    const double s = t + (T - t) * k / kTimeGrid;
    const double v = s - t;
    if (is_sine(bench.kind)) {
      const double growth = std::exp(pr.lambda * (T - s));
      out = std::max(out, growth * trig_mean_norm(xi, v, true, order));
      for (double a : xi) {
        const double single = trig_mean_norm(std::span<const double>(&a, 1), v,
                                             false, order);
        out = std::max(out, growth * single / dd);
      }
    } else {
      out = std::max(out, quadratic_norm(xi, v, dd * (T - s), order));
      for (double a : xi) out = std::max(out, 2.0 * gaussian_norm(a, v, order));
    }
  }
  return out;
}

double default_query_time(const BenchmarkCase& bench) {
  return bench.problem.is_canonical() ? 0.0 : bench.problem.horizon();
}

CaseConfig parse_case_config(const std::string& text) {
  CaseConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto number = [&] {
      const auto list = parse_list(value);
      if (list.size() != 1) {
        throw Error(ErrorCode::InvalidConfig, "key '" + key + "' needs one number");
      }
      return list[0];
    };
    if (key == "case") {
      cfg.case_name = value;
    } else if (key == "d") {
      cfg.params.dimension = static_cast<std::size_t>(number());
    } else if (key == "T") {
      cfg.params.horizon = number();
    } else if (key == "lambda") {
      cfg.params.lambda = number();
    } else if (key == "c") {
      cfg.params.c = number();
    } else if (key == "n") {
      cfg.mlp.depth = static_cast<int>(number());
    } else if (key == "M") {
      cfg.mlp.base = static_cast<std::uint64_t>(number());
    } else if (key == "e") {
      cfg.mlp.time_cdf_exponent = number();
    } else if (key == "seed") {
      cfg.mlp.root_seed = std::stoull(value);
    } else if (key == "reps") {
      cfg.mlp.replications = static_cast<std::uint64_t>(number());
    } else if (key == "t") {
      cfg.t = number();
    } else if (key == "x") {
      cfg.x = parse_list(value);
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

CaseConfig load_case_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error(ErrorCode::InvalidConfig, "cannot open " + path);
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_case_config(buf.str());
}

}  // namespace mlp
