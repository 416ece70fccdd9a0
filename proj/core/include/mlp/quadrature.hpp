// Copyright 2026 The mlp-picard Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace mlp {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int intervals = 0;
  bool converged = false;
};

namespace detail {

struct KronrodPanel {
  double a, b, value, error;
  bool operator<(const KronrodPanel& o) const { return error < o.error; }
};

template <class F>
KronrodPanel gauss_kronrod_15(const F& f, double a, double b) {
  static constexpr std::array<double, 8> xk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.0};
  static constexpr std::array<double, 8> wk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = wk[7] * fc;
  double gauss = wg[3] * fc;
  for (int k = 0; k < 7; ++k) {
    const double sum = f(c - h * xk[k]) + f(c + h * xk[k]);
    kronrod += wk[k] * sum;
    if (k % 2 == 1) gauss += wg[k / 2] * sum;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7, 15) on a finite interval. Splits the
/// panel with the largest error estimate until the total error meets
/// max(abs_tol, rel_tol |value|) or the panel budget runs out.
template <class F>
QuadratureResult integrate(const F& f, double a, double b, double abs_tol,
                           double rel_tol, int max_panels = 2000) {
  std::priority_queue<detail::KronrodPanel> panels;
  panels.push(detail::gauss_kronrod_15(f, a, b));
  double value = panels.top().value;
  double error = panels.top().error;

  while (error > std::max(abs_tol, rel_tol * std::abs(value)) &&
         static_cast<int>(panels.size()) < max_panels) {
    const auto worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum to shed the drift of the running totals.
  QuadratureResult out;
  out.intervals = static_cast<int>(panels.size());
  out.value = 0.0;
  out.error = 0.0;
  while (!panels.empty()) {
    out.value += panels.top().value;
    out.error += panels.top().error;
    panels.pop();
  }
  out.converged = out.error <= std::max(abs_tol, rel_tol * std::abs(out.value));
  return out;
}

}  // namespace mlp
