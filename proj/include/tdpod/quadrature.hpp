#pragma once

#include <vector>

namespace tdpod {

/// Quadrature on the reference triangle {(xi, eta) : xi, eta >= 0, xi + eta <= 1}.
/// Weights sum to the reference area 1/2.
struct TriangleRule {
  std::vector<double> xi;
  std::vector<double> eta;
  std::vector<double> weight;
  int degree = 0;
  std::size_t size() const { return weight.size(); }
};

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Smallest available rule exact for polynomials of total degree <= `degree`.
/// Degrees up to 5 use the symmetric 7-point rule; higher degrees use a
/// collapsed Gauss-Legendre product rule.
TriangleRule triangle_rule(int degree);

}  // namespace tdpod
