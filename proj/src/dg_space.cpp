#include "fpdg/dg_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fpdg {

Side side_from_normal(const Eigen::Vector2d& outward) {
  if (std::abs(outward(0)) > std::abs(outward(1))) return outward(0) > 0 ? Side::Right : Side::Left;
  return outward(1) > 0 ? Side::Top : Side::Bottom;
}

namespace {

Eigen::Vector2d side_normal(Side side) {
  switch (side) {
    case Side::Left: return {-1.0, 0.0};
    case Side::Right: return {1.0, 0.0};
    case Side::Bottom: return {0.0, -1.0};
    case Side::Top: return {0.0, 1.0};
  }
  return Eigen::Vector2d::Zero();
}

// Unit vector along a face with the given normal, pointing in the +x or +y
// direction.
Eigen::Vector2d free_axis(const Eigen::Vector2d& normal) {
  return {std::abs(normal(1)), std::abs(normal(0))};
}

}  // namespace

DGSpace::DGSpace(Mesh mesh, int degree)
    : mesh_(std::move(mesh)),
      basis_(degree),
      line_(gauss_rule<double>(degree + 1)),
      volume_(line_),
      volume_table_(basis_, volume_.points) {
  if (degree < 1) throw ConfigurationError("DGSpace: degree must be >= 1");
  const int q = line_.order();
  for (int s = 0; s < 4; ++s) {
    const Eigen::Vector2d n = side_normal(static_cast<Side>(s));
    const Eigen::Vector2d axis = free_axis(n);
    Eigen::Matrix2Xd pts(2, q);
    for (int i = 0; i < q; ++i) pts.col(i) = 0.5 * n + line_.nodes(i) * axis;
    side_tables_[s] = BasisTable<double>(basis_, pts);
  }
}

Eigen::Vector2d DGSpace::face_point(const Face& face, int q) const {
  return face.center + mesh_.h * line_.nodes(q) * free_axis(face.normal);
}

double DGSpace::min_quadrature_value(const DGField& f) const {
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < num_cells(); ++i) lowest = std::min(lowest, values_at_quadrature(f, i).minCoeff());
  return lowest;
}

DGField l2_project(const DGSpace& space, const std::function<double(const Eigen::Vector2d&)>& f) {
  DGField out = space.zero_field();
  const auto& rule = space.volume_rule();
  const auto& table = space.volume_table();
  Eigen::VectorXd samples(rule.size());
  for (int i = 0; i < space.num_cells(); ++i) {
    for (int p = 0; p < rule.size(); ++p) {
      samples(p) = rule.weights(p) * f(space.mesh().map_to_physical(i, rule.points.col(p)));
    }
    out.cell(i) = table.values.transpose() * samples;
  }
  return out;
}

}  // namespace fpdg
