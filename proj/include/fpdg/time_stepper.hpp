#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/LU>
#include <Eigen/SparseCore>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include "fpdg/coefficients.hpp"
#include "fpdg/dg_operators.hpp"
#include "fpdg/dg_space.hpp"
#include "fpdg/positivity.hpp"

namespace fpdg {

enum class SolverKind {
  Auto,        // Direct for time-independent diffusion, Refinement otherwise
  Direct,      // sparse LU, refactored whenever the operator changes
  Iterative,   // BiCGSTAB with cell-block Jacobi preconditioning
  Refinement,  // iterative refinement on a reused LU, refactored when contraction degrades
};

/// Nested-dissection ordering of the cells of an nx x ny grid
/// (cell = ix + nx*iy); entry p is the cell placed at position p.
std::vector<int> nested_dissection_cells(int nx, int ny);

struct StepConfig {
  double tau = 1e-2;
  double t_start = 0.0;
  double t_end = 1.0;
  double sigma = 1.0;
  double eps_inv = 1.0;
  bool limiter_enabled = true;
  LimiterSettings limiter;

  SolverKind solver = SolverKind::Auto;
  double solver_tolerance = 1e-12;
  long solver_max_iterations = 0;  // 0 selects 10 * dofs (Iterative) or 50 sweeps (Refinement)
  /// Assemble stationary operators once; false reassembles every step.
  bool reuse_operators = true;

  void validate() const;
  /// Number of uniform steps; throws ConfigurationError unless
  /// (t_end - t_start) / tau is an integer within 1e-9.
  long num_steps() const;
};

/// Inverse of the diagonal cell blocks of a DG operator; usable as an Eigen
/// iterative-solver preconditioner.
class BlockJacobiPreconditioner {
 public:
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

  BlockJacobiPreconditioner() = default;

  void set_block_size(int size) { block_size_ = size; }
  template <typename Mat>
  BlockJacobiPreconditioner& analyzePattern(const Mat&) { return *this; }
  template <typename Mat>
  BlockJacobiPreconditioner& factorize(const Mat& a) {
    compute_blocks(a);
    return *this;
  }
  template <typename Mat>
  BlockJacobiPreconditioner& compute(const Mat& a) {
    compute_blocks(a);
    return *this;
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::ComputationInfo info() const { return Eigen::Success; }

 private:
  template <typename Mat>
  void compute_blocks(const Mat& a) {
    const int nb = block_size_;
    const Eigen::Index cells = a.rows() / nb;
    inverses_.assign(static_cast<size_t>(cells), Eigen::MatrixXd::Zero(nb, nb));
    for (Eigen::Index outer = 0; outer < a.outerSize(); ++outer) {
      for (typename Mat::InnerIterator it(a, outer); it; ++it) {
        const Eigen::Index c = it.row() / nb;
        if (it.col() / nb == c) inverses_[static_cast<size_t>(c)](it.row() % nb, it.col() % nb) = it.value();
      }
    }
    for (auto& blk : inverses_) blk = blk.partialPivLu().inverse();
  }

  int block_size_ = 1;
  std::vector<Eigen::MatrixXd> inverses_;
};

/// Solves (M + tau eps^-1 K) x = r with relative-residual control.
/// Sparse LU factors are computed on the operator permuted by `cell_order`
/// (cell blocks of `block_size` unknowns); an empty order keeps the natural one.
class LinearSolve {
 public:
  LinearSolve(SolverKind kind, double tolerance, long max_iterations, int block_size,
              const std::vector<int>& cell_order = {});

  /// `a` must stay alive and unmoved until the next compute().
  void compute(const SparseOperator& a);
  /// Returns x with ||a x - rhs|| <= tol ||rhs||; `guess` seeds the iterative
  /// paths. Throws SolverError otherwise.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& guess);

  long last_iterations() const { return last_iterations_; }
  double last_relative_residual() const { return last_residual_; }
  long factorizations() const { return factorizations_; }
  SolverKind kind() const { return kind_; }

 private:
  using PermutationType = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>;

  void factor(const SparseOperator& a);
  Eigen::VectorXd lu_solve(const Eigen::VectorXd& b) const;
  double relative_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& rhs, double rhs_norm) const;

  SolverKind kind_;
  double tolerance_;
  long max_iterations_;
  int block_size_;
  std::vector<int> cell_order_;
  PermutationType perm_;
  const SparseOperator* op_ = nullptr;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::NaturalOrdering<int>> lu_;
  bool lu_analyzed_ = false;
  bool lu_current_ = false;  // factors belong to *op_
  std::unique_ptr<Eigen::BiCGSTAB<SparseOperator, BlockJacobiPreconditioner>> krylov_;
  long last_iterations_ = 0;
  double last_residual_ = 0.0;
  long factorizations_ = 0;
};

struct StepStats {
  long solver_iterations = 0;
  double solver_residual = 0.0;
  long factorizations = 0;  // cumulative LU factorizations of the stepper
  PostprocessReport limiter;
  bool limiter_ran = false;
};

/// L2 projection of f0 followed (when `settings` are given) by the two-stage
/// positivity postprocess.
DGField project_initial(const std::function<double(const Eigen::Vector2d&)>& f0, const DGSpace& space,
                        const LimiterSettings* settings);

/// Semi-implicit marching: implicit NIPG diffusion at t^n, explicit
/// Lax-Friedrichs convection at t^{n-1}, one linear solve per step.
class SemiImplicitStepper {
 public:
  SemiImplicitStepper(const DGSpace& space, const CoefficientProvider& provider, StepConfig config);

  /// Advances f^{n-1} at t_prev to t_prev + tau.
  DGField step(const DGField& f_prev, double t_prev, StepStats* stats = nullptr);

  const StepConfig& config() const { return config_; }
  const DGSpace& space() const { return *space_; }

 private:
  void prepare_system(double t);
  Eigen::VectorXd convection(const DGField& f, double t);

  const DGSpace* space_;
  const CoefficientProvider* provider_;
  StepConfig config_;
  double scale_;  // tau * eps^-1

  std::vector<SeparableTerm> terms_;
  std::vector<SparseOperator> diffusion_ops_;
  std::vector<int> diagonal_slots_;
  SparseOperator system_;
  std::optional<SparseOperator> convection_op_;
  LinearSolve solver_;
  // last two solutions, for the extrapolated initial guess
  Eigen::VectorXd x_prev_;
  Eigen::VectorXd x_prev2_;
  bool system_ready_ = false;
};

/// One step with freshly assembled operators.
DGField step(const DGSpace& space, const DGField& f_prev, double t_prev, const StepConfig& cfg,
             const CoefficientProvider& provider, StepStats* stats = nullptr);

struct StepRecord {
  long step = 0;
  double time = 0.0;
  double mass = 0.0;
  double min_cell_average = 0.0;
  double min_quadrature_value = 0.0;
  long dr_iterations = 0;
  long solver_iterations = 0;
};

struct RunCallbacks {
  int stride = 1;
  /// Called for step 0 (the projected initial field) and every `stride`
  /// steps, and for the final step.
  std::function<void(const StepRecord&, const DGField&)> on_output;
  /// Called after every step with the limiter report.
  std::function<void(const StepRecord&, const StepStats&)> on_step;
};

struct RunSummary {
  DGField final_field;
  std::vector<StepRecord> history;  // every step, starting with step 0
};

RunSummary run(const std::function<double(const Eigen::Vector2d&)>& f0, const DGSpace& space,
               const StepConfig& cfg, const CoefficientProvider& provider, const RunCallbacks& callbacks = {});

}  // namespace fpdg
