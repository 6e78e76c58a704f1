#pragma once

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "fpdg/dg_space.hpp"

namespace fpdg {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Cell averages in the active set K and the bounds/conservation data of
///   min |E| ||x - w||^2  s.t.  sum x = b_cons,  m <= x <= M.
struct LimiterProblem {
  Eigen::VectorXd w;
  double lower = 1e-13;
  double upper = kInfinity;
  double b_cons = 0.0;
  double eps_tol = 1e-13;
  /// Cell edge length; residuals are measured in ||v||_2h = h^{d/2} ||v||_2.
  double cell_size = 1.0;

  /// Sets b_cons to the sum of w.
  static LimiterProblem from_averages(Eigen::VectorXd w, double lower, double upper, double eps_tol, double cell_size);

  bool feasible() const;
  Eigen::Index size() const { return w.size(); }
};

/// Active cells for the cell-average limiter and the count of bad cells.
struct BadCellSet {
  std::vector<int> active;
  int bad = 0;  // r-hat: cells of `active` whose average is out of [m, M]
};

/// K = { i : w_i outside [m, M] or w_i >= 1e-8 }.
BadCellSet detect_bad_cells(const Eigen::Ref<const Eigen::VectorXd>& w, double lower, double upper);

struct DRParameters {
  double c = 0.5;
  double lambda = 1.0;
};

/// Near-optimal (c, lambda) from theta = arccos(sqrt(r_hat / n)).
DRParameters dr_parameters(int r_hat, int n);

/// Parameters the limiter actually uses: dr_parameters with r_hat capped at
/// n - 1. At r_hat = n the formula gives c = 1, a zero step that drops w from
/// the iteration, so it no longer converges to the projection.
DRParameters limiter_parameters(int r_hat, int n);

struct DROptions {
  long max_iterations = 1'000'000;
  bool record_history = true;
};

struct DRResult {
  Eigen::VectorXd x;
  long iterations = 0;
  std::vector<double> residuals;  // ||y^{k+1} - y^k||_2h per iteration
};

/// Relaxed Douglas-Rachford splitting for the limiter problem.
/// Throws ConvergenceError when max_iterations is exceeded.
DRResult dr_solve(const LimiterProblem& problem, const DRParameters& params, const DROptions& options = {});

/// Same iteration, writing into `result` and using `work` as the y buffer.
/// Both are resized only when their size differs from the problem's.
void dr_solve_into(const LimiterProblem& problem, const DRParameters& params, const DROptions& options,
                   DRResult& result, Eigen::VectorXd& work);

/// Shifts the entries lying strictly inside (lower, upper) by a common amount
/// so that x sums to b. Entries the shift would push out of the box are left
/// where they are and the shift is recomputed. Returns false, leaving x
/// unchanged, when no entry can move.
bool restore_sum(Eigen::Ref<Eigen::VectorXd> x, double b, double lower, double upper);

/// Box cutoff S(x) = min(max(x, m), M).
void box_cutoff(Eigen::Ref<Eigen::VectorXd> x, double lower, double upper);

/// Exact minimizer by active-set enumeration (each variable free, at m or at
/// M). Test oracle; limited to 20 variables.
Eigen::VectorXd qp_oracle(const LimiterProblem& problem);

struct LimiterSettings {
  double lower = 1e-13;
  double upper = kInfinity;
  double eps_tol = 1e-13;
  /// Zhang-Shu admissibility tolerance; defaults to `lower`.
  double eps_zs = 1e-13;
  bool detect_trouble_cells = true;
  DROptions dr;
};

struct CellAverageReport {
  bool applied = false;
  int active_cells = 0;
  int bad_cells = 0;
  long iterations = 0;
  double mass_change = 0.0;
  std::vector<double> residuals;
};

/// Stage 1: replace out-of-bound cell averages by the conservative L2
/// projection onto the box. Only constant modes in K change.
/// Throws InfeasibleProblem when the active set lacks the mass to satisfy
/// the lower bound.
CellAverageReport limit_cell_averages(DGField& f, double cell_size, const LimiterSettings& settings);

struct ZhangShuReport {
  int limited_cells = 0;
  double min_theta = 1.0;
};

/// Stage 2: per cell, scale the non-constant modes by
/// theta = min(1, (avg - eps) / (avg - min_q f)) using the space's volume
/// quadrature points. Throws ContractViolation if an average is below eps.
ZhangShuReport zhang_shu_limit(const DGSpace& space, DGField& f, double eps_zs);

struct PostprocessReport {
  CellAverageReport stage1;
  ZhangShuReport stage2;
};

/// Stage 1 followed by Stage 2.
PostprocessReport enforce_positivity(const DGSpace& space, DGField& f, const LimiterSettings& settings);

}  // namespace fpdg
