#pragma once

#include <vector>

#include <Eigen/Core>

#include "fpdg/errors.hpp"

namespace fpdg {

/// Face of a Cartesian cell. For interior faces `minus < plus` and `normal`
/// points from minus into plus; boundary faces have `plus == -1` and an
/// outward normal.
struct Face {
  int minus = -1;
  int plus = -1;
  Eigen::Vector2d normal = Eigen::Vector2d::Zero();
  Eigen::Vector2d center = Eigen::Vector2d::Zero();

  bool is_boundary() const { return plus < 0; }
  /// Unit tangent; face points are center + s*h*tangent for s in [-1/2, 1/2].
  Eigen::Vector2d tangent() const { return {-normal(1), normal(0)}; }
};

/// Uniform partition of a rectangle into square cells, indexed
/// cell = ix + nx*iy.
struct Mesh {
  Eigen::Vector2d lo;
  Eigen::Vector2d hi;
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  std::vector<Face> interior_faces;
  std::vector<Face> boundary_faces;

  int num_cells() const { return nx * ny; }
  double cell_area() const { return h * h; }
  Eigen::Vector2d cell_center(int cell) const {
    const int ix = cell % nx;
    const int iy = cell / nx;
    return {lo(0) + (ix + 0.5) * h, lo(1) + (iy + 0.5) * h};
  }
  /// Physical point of a reference coordinate xi in [-1/2, 1/2]^2.
  Eigen::Vector2d map_to_physical(int cell, const Eigen::Vector2d& xi) const {
    return cell_center(cell) + h * xi;
  }
  Eigen::Vector2d map_to_reference(int cell, const Eigen::Vector2d& x) const {
    return (x - cell_center(cell)) / h;
  }
};

Mesh build_mesh(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, int nx, int ny);

}  // namespace fpdg
