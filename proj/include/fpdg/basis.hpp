#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace fpdg {

/// Orthonormal shifted Legendre polynomial sqrt(2n+1) P_n(2x) on [-1/2, 1/2],
/// together with its derivative.
template <typename Scalar>
std::pair<Scalar, Scalar> shifted_legendre(int n, Scalar x) {
  const Scalar t = 2 * x;
  Scalar p0 = 1;
  Scalar p1 = t;
  Scalar d0 = 0;
  Scalar d1 = 1;
  if (n == 0) return {1, 0};
  for (int k = 2; k <= n; ++k) {
    const Scalar pk = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
    // derivative recurrence avoids the 1/(t^2-1) singularity at the ends
    const Scalar dk = d0 + (2 * k - 1) * p1;
    p0 = p1;
    p1 = pk;
    d0 = d1;
    d1 = dk;
  }
  const Scalar scale = std::sqrt(Scalar(2 * n + 1));
  return {scale * p1, scale * 2 * d1};
}

/// Total-degree <= k modal basis on the reference square [-1/2, 1/2]^2 built
/// from products of orthonormal Legendre polynomials.
///
/// Functions are ordered by total degree, then by descending x-degree, so
/// mode 0 is the constant 1 and mode 1 is 2*sqrt(3)*x.
template <typename Scalar = double>
class LegendreBasis {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Gradients = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;
  using Point = Eigen::Matrix<Scalar, 2, 1>;

  explicit LegendreBasis(int degree) : degree_(degree) {
    if (degree < 0) throw std::invalid_argument("LegendreBasis: degree must be >= 0");
    for (int total = 0; total <= degree; ++total) {
      for (int px = total; px >= 0; --px) exponents_.emplace_back(px, total - px);
    }
  }

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  std::pair<int, int> exponents(int mode) const { return exponents_[mode]; }

  Vector values(const Point& xi) const {
    Vector out(size());
    tabulate(xi, &out, nullptr);
    return out;
  }

  /// Reference-coordinate gradients, one column per mode.
  Gradients gradients(const Point& xi) const {
    Gradients out(2, size());
    tabulate(xi, nullptr, &out);
    return out;
  }

  void tabulate(const Point& xi, Vector* values, Gradients* grads) const {
    std::vector<Scalar> lx(degree_ + 1), dx(degree_ + 1), ly(degree_ + 1), dy(degree_ + 1);
    for (int n = 0; n <= degree_; ++n) {
      std::tie(lx[n], dx[n]) = shifted_legendre(n, xi(0));
      std::tie(ly[n], dy[n]) = shifted_legendre(n, xi(1));
    }
    for (int j = 0; j < size(); ++j) {
      const auto [px, py] = exponents_[j];
      if (values) (*values)(j) = lx[px] * ly[py];
      if (grads) {
        (*grads)(0, j) = dx[px] * ly[py];
        (*grads)(1, j) = lx[px] * dy[py];
      }
    }
  }

 private:
  int degree_;
  std::vector<std::pair<int, int>> exponents_;
};

/// Basis values and reference gradients tabulated at a fixed set of points.
template <typename Scalar = double>
struct BasisTable {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> values;  // points x modes
  std::vector<Eigen::Matrix<Scalar, 2, Eigen::Dynamic>> gradients;  // per point

  BasisTable() = default;
  BasisTable(const LegendreBasis<Scalar>& basis, const Eigen::Matrix<Scalar, 2, Eigen::Dynamic>& points) {
    const auto np = points.cols();
    values.resize(np, basis.size());
    gradients.resize(np);
    for (Eigen::Index p = 0; p < np; ++p) {
      typename LegendreBasis<Scalar>::Vector v(basis.size());
      Eigen::Matrix<Scalar, 2, Eigen::Dynamic> g(2, basis.size());
      basis.tabulate(points.col(p), &v, &g);
      values.row(p) = v.transpose();
      gradients[p] = g;
    }
  }
};

}  // namespace fpdg
