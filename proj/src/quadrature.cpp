#include "tdpod/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "tdpod/error.hpp"

namespace tdpod {

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) fail_input("gauss_legendre_01: n must be positive");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  // Legendre P_n(x) and its derivative by the three-term recurrence.
  auto legendre = [n](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
    weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

TriangleRule seven_point() {
  TriangleRule r;
  r.degree = 5;
  const double s15 = std::sqrt(15.0);
  const double a1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
  const double a2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
  auto orbit = [&r](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.xi.insert(r.xi.end(), {a, b, a});
    r.eta.insert(r.eta.end(), {a, a, b});
    for (int k = 0; k < 3; ++k) r.weight.push_back(0.5 * w);
  };
  r.xi.push_back(1.0 / 3.0);
  r.eta.push_back(1.0 / 3.0);
  r.weight.push_back(0.5 * 0.225);
  orbit(a1, w1);
  orbit(a2, w2);
  return r;
}

TriangleRule collapsed(int degree) {
  const int n = (degree + 3) / 2;
  std::vector<double> x, w;
  gauss_legendre_01(n, x, w);
  TriangleRule r;
  r.degree = 2 * n - 2;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double s = x[static_cast<std::size_t>(i)];
      const double t = x[static_cast<std::size_t>(j)];
      r.xi.push_back(s);
      r.eta.push_back((1.0 - s) * t);
      r.weight.push_back(w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)] * (1.0 - s));
    }
  }
  return r;
}

}  // namespace

TriangleRule triangle_rule(int degree) {
  if (degree < 0) fail_input("triangle_rule: negative degree");
  if (degree <= 5) return seven_point();
  return collapsed(degree);
}

}  // namespace tdpod
