#include "fpdg/time_stepper.hpp"

#include <cmath>
#include <sstream>

#include "fpdg/errors.hpp"

namespace fpdg {

void StepConfig::validate() const {
  if (!(tau > 0)) throw ConfigurationError("StepConfig: tau must be positive");
  if (!(t_end >= t_start)) throw ConfigurationError("StepConfig: need t_end >= t_start");
  if (!(sigma > 0)) throw ConfigurationError("StepConfig: sigma must be positive");
  if (!(eps_inv > 0)) throw ConfigurationError("StepConfig: eps_inv must be positive");
  if (!(solver_tolerance > 0 && solver_tolerance < 1)) {
    throw ConfigurationError("StepConfig: solver tolerance must lie in (0, 1)");
  }
}

long StepConfig::num_steps() const {
  const double ratio = (t_end - t_start) / tau;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded)) {
    std::ostringstream msg;
    msg << "StepConfig: (t_end - t_start) / tau = " << ratio << " is not an integer";
    throw ConfigurationError(msg.str());
  }
  return static_cast<long>(rounded);
}

Eigen::VectorXd BlockJacobiPreconditioner::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x(b.size());
  const int nb = block_size_;
  for (size_t c = 0; c < inverses_.size(); ++c) {
    const Eigen::Index off = static_cast<Eigen::Index>(c) * nb;
    x.segment(off, nb).noalias() = inverses_[c] * b.segment(off, nb);
  }
  return x;
}

namespace {

void dissect(int x0, int x1, int y0, int y1, int nx, std::vector<int>& out) {
  const int w = x1 - x0;
  const int h = y1 - y0;
  if (w <= 0 || h <= 0) return;
  if (w * h <= 4) {
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) out.push_back(x + nx * y);
    }
    return;
  }
  // both halves first, then the separator line
  if (w >= h) {
    const int mid = x0 + w / 2;
    dissect(x0, mid, y0, y1, nx, out);
    dissect(mid + 1, x1, y0, y1, nx, out);
    for (int y = y0; y < y1; ++y) out.push_back(mid + nx * y);
  } else {
    const int mid = y0 + h / 2;
    dissect(x0, x1, y0, mid, nx, out);
    dissect(x0, x1, mid + 1, y1, nx, out);
    for (int x = x0; x < x1; ++x) out.push_back(x + nx * mid);
  }
}

}  // namespace

std::vector<int> nested_dissection_cells(int nx, int ny) {
  if (nx < 1 || ny < 1) throw ContractViolation("nested_dissection_cells: empty grid");
  std::vector<int> out;
  out.reserve(static_cast<size_t>(nx) * ny);
  dissect(0, nx, 0, ny, nx, out);
  return out;
}

LinearSolve::LinearSolve(SolverKind kind, double tolerance, long max_iterations, int block_size,
                         const std::vector<int>& cell_order)
    : kind_(kind),
      tolerance_(tolerance),
      max_iterations_(max_iterations),
      block_size_(block_size),
      cell_order_(cell_order) {
  if (kind_ == SolverKind::Auto) throw ContractViolation("LinearSolve: resolve SolverKind::Auto first");
  // small diagonal-pivot threshold: keeps the fill of the dissection order;
  // accuracy is checked through the residual
  lu_.setPivotThreshold(1e-3);
}

void LinearSolve::factor(const SparseOperator& a) {
  if (perm_.size() != a.rows()) {
    Eigen::VectorXi p(a.rows());
    if (cell_order_.empty()) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) p(i) = static_cast<int>(i);
    } else {
      if (static_cast<Eigen::Index>(cell_order_.size()) * block_size_ != a.rows()) {
        throw ContractViolation("LinearSolve: cell order does not match the operator");
      }
      for (size_t pos = 0; pos < cell_order_.size(); ++pos) {
        for (int j = 0; j < block_size_; ++j) {
          p(static_cast<Eigen::Index>(cell_order_[pos]) * block_size_ + j) = static_cast<int>(pos) * block_size_ + j;
        }
      }
    }
    perm_ = PermutationType(p);
  }
  const Eigen::SparseMatrix<double> permuted = perm_ * Eigen::SparseMatrix<double>(a) * perm_.transpose();
  if (!lu_analyzed_) {
    lu_.analyzePattern(permuted);
    lu_analyzed_ = true;
  }
  lu_.factorize(permuted);
  if (lu_.info() != Eigen::Success) throw SolverError("LinearSolve: sparse LU factorization failed", 0.0, 0);
  lu_current_ = true;
  ++factorizations_;
}

Eigen::VectorXd LinearSolve::lu_solve(const Eigen::VectorXd& b) const {
  const Eigen::VectorXd pb = perm_ * b;
  const Eigen::VectorXd y = lu_.solve(pb);
  return perm_.transpose() * y;
}

double LinearSolve::relative_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& rhs, double rhs_norm) const {
  const double r = (*op_ * x - rhs).norm();
  return rhs_norm > 0 ? r / rhs_norm : r;
}

void LinearSolve::compute(const SparseOperator& a) {
  op_ = &a;
  switch (kind_) {
    case SolverKind::Direct:
      factor(a);
      break;
    case SolverKind::Refinement:
      lu_current_ = false;
      if (factorizations_ == 0) factor(a);
      break;
    default:
      if (!krylov_) krylov_ = std::make_unique<Eigen::BiCGSTAB<SparseOperator, BlockJacobiPreconditioner>>();
      krylov_->preconditioner().set_block_size(block_size_);
      krylov_->setTolerance(tolerance_);
      krylov_->setMaxIterations(max_iterations_ > 0 ? max_iterations_ : 10 * a.rows());
      krylov_->compute(a);
      break;
  }
}

Eigen::VectorXd LinearSolve::solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& guess) {
  if (!op_) throw ContractViolation("LinearSolve: compute() must precede solve()");
  const double rhs_norm = rhs.norm();
  Eigen::VectorXd x;
  if (kind_ == SolverKind::Direct) {
    x = lu_solve(rhs);
    last_iterations_ = 1;
    last_residual_ = relative_residual(x, rhs, rhs_norm);
    for (int refine = 0; refine < 3 && last_residual_ > tolerance_; ++refine) {
      x += lu_solve(rhs - *op_ * x);
      last_residual_ = relative_residual(x, rhs, rhs_norm);
      ++last_iterations_;
    }
  } else if (kind_ == SolverKind::Refinement) {
    const long cap = max_iterations_ > 0 ? max_iterations_ : 50;
    x = guess.size() == rhs.size() ? guess : Eigen::VectorXd::Zero(rhs.size());
    Eigen::VectorXd r = rhs - *op_ * x;
    last_residual_ = rhs_norm > 0 ? r.norm() / rhs_norm : r.norm();
    last_iterations_ = 0;
    while (last_residual_ > tolerance_ && last_iterations_ < cap) {
      x += lu_solve(r);
      r = rhs - *op_ * x;
      const double previous = last_residual_;
      last_residual_ = rhs_norm > 0 ? r.norm() / rhs_norm : r.norm();
      ++last_iterations_;
      // stale factors that contract poorly are replaced by fresh ones
      if (!lu_current_ && last_residual_ > tolerance_ && last_residual_ > 1e-2 * previous) factor(*op_);
    }
  } else {
    x = krylov_->solveWithGuess(rhs, guess);
    last_iterations_ = static_cast<long>(krylov_->iterations());
    last_residual_ = relative_residual(x, rhs, rhs_norm);
  }
  if (!(last_residual_ <= tolerance_)) {
    std::ostringstream msg;
    msg << "LinearSolve: relative residual " << last_residual_ << " exceeds tolerance " << tolerance_ << " after "
        << last_iterations_ << " iterations";
    throw SolverError(msg.str(), last_residual_, last_iterations_);
  }
  return x;
}

DGField project_initial(const std::function<double(const Eigen::Vector2d&)>& f0, const DGSpace& space,
                        const LimiterSettings* settings) {
  DGField f = l2_project(space, f0);
  if (settings) enforce_positivity(space, f, *settings);
  return f;
}

namespace {

SolverKind resolve_kind(SolverKind requested, const CoefficientProvider& provider) {
  if (requested != SolverKind::Auto) return requested;
  return provider.diffusion_is_stationary() ? SolverKind::Direct : SolverKind::Refinement;
}

std::vector<int> diagonal_slots(const SparseOperator& a) {
  std::vector<int> slots(static_cast<size_t>(a.rows()), -1);
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (int k = a.outerIndexPtr()[r]; k < a.outerIndexPtr()[r + 1]; ++k) {
      if (a.innerIndexPtr()[k] == r) slots[static_cast<size_t>(r)] = k;
    }
    if (slots[static_cast<size_t>(r)] < 0) throw ContractViolation("operator pattern lacks a diagonal entry");
  }
  return slots;
}

}  // namespace

SemiImplicitStepper::SemiImplicitStepper(const DGSpace& space, const CoefficientProvider& provider, StepConfig config)
    : space_(&space),
      provider_(&provider),
      config_(std::move(config)),
      scale_(config_.tau * config_.eps_inv),
      solver_(resolve_kind(config_.solver, provider), config_.solver_tolerance, config_.solver_max_iterations,
              space.modes(), nested_dissection_cells(space.mesh().nx, space.mesh().ny)) {
  config_.validate();
  terms_ = provider.separable_diffusion();
}

void SemiImplicitStepper::prepare_system(double t) {
  const double area = space_->mesh().cell_area();
  if (!terms_.empty()) {
    if (diffusion_ops_.empty() || !config_.reuse_operators) {
      diffusion_ops_.clear();
      for (const auto& term : terms_) diffusion_ops_.push_back(assemble_nipg(*space_, term.spatial, config_.sigma));
    }
    if (diagonal_slots_.empty()) {
      system_ = diffusion_ops_.front();
      diagonal_slots_ = diagonal_slots(system_);
    }
    Eigen::Map<Eigen::VectorXd> values(system_.valuePtr(), system_.nonZeros());
    values.setZero();
    for (size_t k = 0; k < terms_.size(); ++k) {
      values += (scale_ * terms_[k].time_factor(t)) *
                Eigen::Map<const Eigen::VectorXd>(diffusion_ops_[k].valuePtr(), diffusion_ops_[k].nonZeros());
    }
  } else {
    if (system_ready_ && config_.reuse_operators && provider_->diffusion_is_stationary()) return;
    system_ = assemble_nipg(*space_, *provider_, t, config_.sigma);
    system_ *= scale_;
    diagonal_slots_ = diagonal_slots(system_);
  }
  for (int slot : diagonal_slots_) system_.valuePtr()[slot] += area;
  solver_.compute(system_);
  system_ready_ = true;
}

Eigen::VectorXd SemiImplicitStepper::convection(const DGField& f, double t) {
  if (!provider_->drift_is_stationary()) return apply_convection(*space_, *provider_, t, f);
  if (!convection_op_ || !config_.reuse_operators) convection_op_ = assemble_convection(*space_, *provider_, t);
  return *convection_op_ * f.coeffs;
}

DGField SemiImplicitStepper::step(const DGField& f_prev, double t_prev, StepStats* stats) {
  if (f_prev.num_cells != space_->num_cells() || f_prev.modes != space_->modes()) {
    throw ContractViolation("SemiImplicitStepper::step: field does not match the space");
  }
  if (t_prev + config_.tau > config_.t_end + 1e-12) throw ContractViolation("SemiImplicitStepper::step: past t_end");
  const double area = space_->mesh().cell_area();
  const Eigen::VectorXd rhs =
      area * f_prev.coeffs + (scale_ * provider_->advection_scale()) * convection(f_prev, t_prev);

  prepare_system(t_prev + config_.tau);
  DGField next = f_prev;
  Eigen::VectorXd guess = f_prev.coeffs;
  if (x_prev2_.size() == guess.size()) guess += x_prev_ - x_prev2_;
  next.coeffs = solver_.solve(rhs, guess);
  x_prev2_ = std::move(x_prev_);
  x_prev_ = next.coeffs;

  StepStats local;
  local.solver_iterations = solver_.last_iterations();
  local.solver_residual = solver_.last_relative_residual();
  local.factorizations = solver_.factorizations();
  if (config_.limiter_enabled) {
    local.limiter = enforce_positivity(*space_, next, config_.limiter);
    local.limiter_ran = true;
  }
  if (stats) *stats = std::move(local);
  return next;
}

DGField step(const DGSpace& space, const DGField& f_prev, double t_prev, const StepConfig& cfg,
             const CoefficientProvider& provider, StepStats* stats) {
  SemiImplicitStepper stepper(space, provider, cfg);
  return stepper.step(f_prev, t_prev, stats);
}

namespace {

StepRecord make_record(const DGSpace& space, const DGField& f, long n, double t) {
  StepRecord rec;
  rec.step = n;
  rec.time = t;
  rec.mass = f.mass();
  rec.min_cell_average = f.cell_averages().minCoeff();
  rec.min_quadrature_value = space.min_quadrature_value(f);
  return rec;
}

}  // namespace

RunSummary run(const std::function<double(const Eigen::Vector2d&)>& f0, const DGSpace& space,
               const StepConfig& cfg, const CoefficientProvider& provider, const RunCallbacks& callbacks) {
  cfg.validate();
  const long steps = cfg.num_steps();
  RunSummary summary;
  summary.final_field = project_initial(f0, space, cfg.limiter_enabled ? &cfg.limiter : nullptr);
  summary.history.push_back(make_record(space, summary.final_field, 0, cfg.t_start));
  if (callbacks.on_output) callbacks.on_output(summary.history.back(), summary.final_field);

  SemiImplicitStepper stepper(space, provider, cfg);
  const int stride = std::max(1, callbacks.stride);
  for (long n = 1; n <= steps; ++n) {
    const double t_prev = cfg.t_start + static_cast<double>(n - 1) * cfg.tau;
    StepStats stats;
    summary.final_field = stepper.step(summary.final_field, t_prev, &stats);
    StepRecord rec = make_record(space, summary.final_field, n, cfg.t_start + static_cast<double>(n) * cfg.tau);
    rec.dr_iterations = stats.limiter.stage1.iterations;
    rec.solver_iterations = stats.solver_iterations;
    summary.history.push_back(rec);
    if (callbacks.on_step) callbacks.on_step(rec, stats);
    if (callbacks.on_output && (n % stride == 0 || n == steps)) callbacks.on_output(rec, summary.final_field);
  }
  return summary;
}

}  // namespace fpdg
