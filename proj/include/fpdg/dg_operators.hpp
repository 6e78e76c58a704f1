#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fpdg/coefficients.hpp"
#include "fpdg/dg_space.hpp"

namespace fpdg {

/// Row-major CSR operator on the cell-major DOF layout of DGField.
using SparseOperator = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

using DiffusionField = std::function<Eigen::Matrix2d(const Eigen::Vector2d&)>;

/// Block sparsity of the DG operators: each cell couples to itself and its
/// face neighbours. Every operator assembled through this pattern has the
/// same CSR structure, so operators can be combined value-by-value.
class BlockPattern {
 public:
  explicit BlockPattern(const DGSpace& space);

  int block_index(int row_cell, int col_cell) const;
  const std::vector<int>& neighbours(int cell) const { return columns_[cell]; }

  /// Accumulates dense modes x modes blocks and emits a CSR operator.
  class Builder {
   public:
    Builder(const BlockPattern& pattern, int modes);
    void add(int row_cell, int col_cell, const Eigen::MatrixXd& block);
    Eigen::Ref<Eigen::MatrixXd> block(int row_cell, int col_cell);
    SparseOperator build() const;

   private:
    const BlockPattern* pattern_;
    int modes_;
    std::vector<Eigen::MatrixXd> blocks_;
  };

 private:
  std::vector<std::vector<int>> columns_;  // sorted, includes self
  std::vector<int> offsets_;
};

/// |E| times the identity (orthonormal modal basis).
SparseOperator assemble_mass(const DGSpace& space);

/// NIPG diffusion form a_diff(f, chi) with penalty sigma: row = test mode,
/// column = trial mode. Boundary faces contribute nothing.
SparseOperator assemble_nipg(const DGSpace& space, const DiffusionField& diffusion, double sigma);
SparseOperator assemble_nipg(const DGSpace& space, const CoefficientProvider& provider, double t, double sigma);

/// Lax-Friedrichs convection form: r[chi] = a_conv(f, chi), evaluated by
/// quadrature directly on the field.
Eigen::VectorXd apply_convection(const DGSpace& space, const CoefficientProvider& provider, double t,
                                 const DGField& f);

/// The same form as a matrix C with r = C f (a_conv is linear in f).
SparseOperator assemble_convection(const DGSpace& space, const CoefficientProvider& provider, double t);

/// Per-face dissipation speed max_q |b . n_e| over the face quadrature points.
double face_dissipation_speed(const DGSpace& space, const CoefficientProvider& provider, double t, const Face& face);

}  // namespace fpdg
