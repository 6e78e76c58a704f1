#include "fpdg/mesh.hpp"

#include <cmath>
#include <string>

namespace fpdg {

Mesh build_mesh(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, int nx, int ny) {
  if (nx < 1 || ny < 1) throw ConfigurationError("build_mesh: nx and ny must be >= 1");
  if (!(hi(0) > lo(0) && hi(1) > lo(1))) throw ConfigurationError("build_mesh: hi must exceed lo componentwise");
  const double hx = (hi(0) - lo(0)) / nx;
  const double hy = (hi(1) - lo(1)) / ny;
  if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy)) {
    throw ConfigurationError("build_mesh: cells are not square (hx=" + std::to_string(hx) +
                             ", hy=" + std::to_string(hy) + ")");
  }

  Mesh mesh;
  mesh.lo = lo;
  mesh.hi = hi;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.h = hx;
  const double h = hx;
  mesh.interior_faces.reserve(static_cast<size_t>((nx - 1) * ny + nx * (ny - 1)));
  mesh.boundary_faces.reserve(static_cast<size_t>(2 * (nx + ny)));

  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int cell = ix + nx * iy;
      const Eigen::Vector2d c = mesh.cell_center(cell);
      if (ix + 1 < nx) {
        mesh.interior_faces.push_back({cell, cell + 1, {1.0, 0.0}, c + Eigen::Vector2d(0.5 * h, 0.0)});
      }
      if (iy + 1 < ny) {
        mesh.interior_faces.push_back({cell, cell + nx, {0.0, 1.0}, c + Eigen::Vector2d(0.0, 0.5 * h)});
      }
      if (ix == 0) mesh.boundary_faces.push_back({cell, -1, {-1.0, 0.0}, c - Eigen::Vector2d(0.5 * h, 0.0)});
      if (ix == nx - 1) mesh.boundary_faces.push_back({cell, -1, {1.0, 0.0}, c + Eigen::Vector2d(0.5 * h, 0.0)});
      if (iy == 0) mesh.boundary_faces.push_back({cell, -1, {0.0, -1.0}, c - Eigen::Vector2d(0.0, 0.5 * h)});
      if (iy == ny - 1) mesh.boundary_faces.push_back({cell, -1, {0.0, 1.0}, c + Eigen::Vector2d(0.0, 0.5 * h)});
    }
  }
  return mesh;
}

}  // namespace fpdg
