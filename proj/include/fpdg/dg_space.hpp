#pragma once

#include <array>
#include <functional>

#include <Eigen/Core>

#include "fpdg/basis.hpp"
#include "fpdg/mesh.hpp"
#include "fpdg/quadrature.hpp"

namespace fpdg {

/// Modal coefficients of a broken P^k field, stored cell-major:
/// coeffs[cell * modes + j].
struct DGField {
  int num_cells = 0;
  int modes = 0;
  double cell_area = 0.0;
  Eigen::VectorXd coeffs;

  DGField() = default;
  DGField(int num_cells, int modes, double cell_area)
      : num_cells(num_cells), modes(modes), cell_area(cell_area), coeffs(Eigen::VectorXd::Zero(num_cells * modes)) {}

  auto cell(int i) { return coeffs.segment(static_cast<Eigen::Index>(i) * modes, modes); }
  auto cell(int i) const { return coeffs.segment(static_cast<Eigen::Index>(i) * modes, modes); }

  double cell_average(int i) const { return coeffs(static_cast<Eigen::Index>(i) * modes); }
  double& cell_average(int i) { return coeffs(static_cast<Eigen::Index>(i) * modes); }

  Eigen::VectorXd cell_averages() const {
    return Eigen::Map<const Eigen::MatrixXd>(coeffs.data(), modes, num_cells).row(0).transpose();
  }

  /// <f_h, 1> = |E| * sum of constant modes.
  double mass() const { return cell_area * cell_averages().sum(); }
};

/// Local side of a reference cell, identified by its outward normal.
enum class Side { Left = 0, Right = 1, Bottom = 2, Top = 3 };

Side side_from_normal(const Eigen::Vector2d& outward);

/// Mesh + basis + the (k+1)-point tensor Gauss rule, with basis tables on the
/// volume points and on each cell side.
class DGSpace {
 public:
  DGSpace(Mesh mesh, int degree);

  const Mesh& mesh() const { return mesh_; }
  const LegendreBasis<double>& basis() const { return basis_; }
  int degree() const { return basis_.degree(); }
  int modes() const { return basis_.size(); }
  int num_cells() const { return mesh_.num_cells(); }
  Eigen::Index num_dofs() const { return static_cast<Eigen::Index>(num_cells()) * modes(); }

  const Quadrature1D<double>& line_rule() const { return line_; }
  const TensorQuadrature<double>& volume_rule() const { return volume_; }
  const BasisTable<double>& volume_table() const { return volume_table_; }
  const BasisTable<double>& side_table(Side side) const { return side_tables_[static_cast<int>(side)]; }

  /// Physical location of face quadrature point q (ordered along the
  /// ascending free coordinate, matching side_table ordering).
  Eigen::Vector2d face_point(const Face& face, int q) const;

  DGField zero_field() const { return DGField(num_cells(), modes(), mesh_.cell_area()); }

  /// Field values at the volume quadrature points of a cell.
  Eigen::VectorXd values_at_quadrature(const DGField& f, int cell) const {
    return volume_table_.values * f.cell(cell);
  }
  double evaluate(const DGField& f, int cell, const Eigen::Vector2d& xi) const {
    return basis_.values(xi).dot(f.cell(cell));
  }

  double min_quadrature_value(const DGField& f) const;

 private:
  Mesh mesh_;
  LegendreBasis<double> basis_;
  Quadrature1D<double> line_;
  TensorQuadrature<double> volume_;
  BasisTable<double> volume_table_;
  std::array<BasisTable<double>, 4> side_tables_;
};

/// Coefficients c_ij = (1/|E|) int_E f phi_ij with the space's volume rule.
DGField l2_project(const DGSpace& space, const std::function<double(const Eigen::Vector2d&)>& f);

}  // namespace fpdg
