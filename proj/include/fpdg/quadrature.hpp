#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Core>

namespace fpdg {

/// Gauss-Legendre rule on the reference interval [-1/2, 1/2].
///
/// Weights sum to one, so a rule with q points integrates polynomials of
/// degree <= 2q-1 against the unit-measure interval exactly.
template <typename Scalar = double>
struct Quadrature1D {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector nodes;
  Vector weights;

  int order() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

// Legendre P_n(x) and P_n'(x) on [-1, 1] by the three-term recurrence.
template <typename Scalar>
void legendre_with_derivative(int n, Scalar x, Scalar& p, Scalar& dp) {
  Scalar p0 = 1;
  Scalar p1 = x;
  if (n == 0) {
    p = p0;
    dp = 0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const Scalar pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1);
}

}  // namespace detail

/// Returns the q-point Gauss rule mapped to [-1/2, 1/2].
/// Roots are found by Newton iteration from Chebyshev initial guesses.
template <typename Scalar = double>
Quadrature1D<Scalar> gauss_rule(int q) {
  if (q < 1) throw std::invalid_argument("gauss_rule: q must be >= 1");
  Quadrature1D<Scalar> rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  if (q == 1) {
    rule.nodes(0) = 0;
    rule.weights(0) = 1;
    return rule;
  }
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int i = 0; i < (q + 1) / 2; ++i) {
    Scalar x = std::cos(pi * (i + Scalar(0.75)) / (q + Scalar(0.5)));
    Scalar p = 0;
    Scalar dp = 0;
    for (int it = 0; it < 100; ++it) {
      detail::legendre_with_derivative(q, x, p, dp);
      const Scalar dx = p / dp;
      x -= dx;
      if (std::abs(dx) < Scalar(1e-16)) break;
    }
    detail::legendre_with_derivative(q, x, p, dp);
    const Scalar w = 2 / ((1 - x * x) * dp * dp);
    // symmetric pair, stored in ascending order
    rule.nodes(i) = -x / 2;
    rule.nodes(q - 1 - i) = x / 2;
    rule.weights(i) = w / 2;
    rule.weights(q - 1 - i) = w / 2;
  }
  if (q % 2 == 1) rule.nodes(q / 2) = 0;
  return rule;
}

/// Tensor-product rule on the reference square [-1/2, 1/2]^2.
/// Point p = ix + q*iy sits at (nodes[ix], nodes[iy]).
template <typename Scalar = double>
struct TensorQuadrature {
  Eigen::Matrix<Scalar, 2, Eigen::Dynamic> points;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  explicit TensorQuadrature(const Quadrature1D<Scalar>& line) {
    const int q = line.order();
    points.resize(2, q * q);
    weights.resize(q * q);
    for (int iy = 0; iy < q; ++iy) {
      for (int ix = 0; ix < q; ++ix) {
        const int p = ix + q * iy;
        points(0, p) = line.nodes(ix);
        points(1, p) = line.nodes(iy);
        weights(p) = line.weights(ix) * line.weights(iy);
      }
    }
  }

  int size() const { return static_cast<int>(weights.size()); }
};

}  // namespace fpdg
