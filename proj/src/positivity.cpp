#include "fpdg/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fpdg/errors.hpp"

namespace fpdg {

LimiterProblem LimiterProblem::from_averages(Eigen::VectorXd w, double lower, double upper, double eps_tol,
                                             double cell_size) {
  LimiterProblem p;
  p.b_cons = w.sum();
  p.w = std::move(w);
  p.lower = lower;
  p.upper = upper;
  p.eps_tol = eps_tol;
  p.cell_size = cell_size;
  return p;
}

bool LimiterProblem::feasible() const {
  const double n = static_cast<double>(w.size());
  if (w.size() == 0 || !(eps_tol > 0) || !(lower <= upper)) return false;
  const double slack = 1e-14 * std::max(1.0, std::abs(b_cons));
  if (b_cons < n * lower - slack) return false;
  if (std::isfinite(upper) && b_cons > n * upper + slack) return false;
  return true;
}

BadCellSet detect_bad_cells(const Eigen::Ref<const Eigen::VectorXd>& w, double lower, double upper) {
  BadCellSet out;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const bool out_of_bounds = w(i) < lower || w(i) > upper;
    if (out_of_bounds || w(i) >= 1e-8) out.active.push_back(static_cast<int>(i));
    if (out_of_bounds) ++out.bad;
  }
  return out;
}

DRParameters dr_parameters(int r_hat, int n) {
  if (n < 1 || r_hat < 0 || r_hat > n) throw ContractViolation("dr_parameters: need 0 <= r_hat <= n, n >= 1");
  constexpr double pi = std::numbers::pi;
  const double theta = std::acos(std::sqrt(static_cast<double>(r_hat) / n));
  const double cs = std::cos(theta) + std::sin(theta);
  DRParameters p;
  if (theta > 3.0 * pi / 8.0) {
    p.c = 0.5;
    p.lambda = 4.0 / (2.0 - std::cos(2.0 * theta));
  } else if (theta > pi / 4.0) {
    p.c = 1.0 / (cs * cs);
    const double cot = std::cos(theta) / std::sin(theta);
    p.lambda = 2.0 / (1.0 + 1.0 / (1.0 + cot) - 1.0 / (cs * cs));
  } else {
    p.c = 1.0 / (cs * cs);
    p.lambda = 2.0;
  }
  return p;
}

DRParameters limiter_parameters(int r_hat, int n) {
  return dr_parameters(n > 1 ? std::min(r_hat, n - 1) : r_hat, n);
}

void box_cutoff(Eigen::Ref<Eigen::VectorXd> x, double lower, double upper) {
  if (std::isfinite(upper)) {
    x = x.cwiseMax(lower).cwiseMin(upper);
  } else {
    x = x.cwiseMax(lower);
  }
}

DRResult dr_solve(const LimiterProblem& problem, const DRParameters& params, const DROptions& options) {
  DRResult result;
  Eigen::VectorXd work;
  dr_solve_into(problem, params, options, result, work);
  return result;
}

void dr_solve_into(const LimiterProblem& problem, const DRParameters& params, const DROptions& options,
                   DRResult& result, Eigen::VectorXd& work) {
  if (!problem.feasible()) throw InfeasibleProblem("dr_solve: problem is infeasible");
  if (!(params.c > 0 && params.c <= 1 && params.lambda > 0 && params.lambda <= 2)) {
    throw ContractViolation("dr_solve: need c in (0, 1] and lambda in (0, 2]");
  }
  const Eigen::Index n = problem.size();
  const double lam = params.lambda;
  const double lam_c = lam * params.c;
  const double m = problem.lower;
  const double M = problem.upper;
  const bool capped = std::isfinite(M);
  const double scale = problem.cell_size;  // h^{d/2} with d = 2
  const double b = problem.b_cons;
  const double inv_n = 1.0 / static_cast<double>(n);

  // x^k = S(y^k) is recomputed from y instead of being stored
  const auto cut = [&](double v) {
    double c = v < m ? m : v;
    if (capped && c > M) c = M;
    return c;
  };
  Eigen::VectorXd& y = work;
  y = problem.w;
  result.iterations = 0;
  result.residuals.clear();
  const double anchor = lam * (1.0 - params.c);

  double* yp = y.data();
  const double* wp = problem.w.data();
  // sum of the next reflection 2x - y, carried from one sweep to the next
  double zsum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) zsum += 2.0 * cut(yp[i]) - yp[i];
  for (long k = 0; k < options.max_iterations; ++k) {
    const double shift = (b - zsum) * inv_n;
    double diff2 = 0.0;
    double next_zsum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double yi = yp[i];
      const double xi = cut(yi);
      const double ynew = lam_c * (2.0 * xi - yi + shift) + anchor * wp[i] + yi - lam * xi;
      const double d = ynew - yi;
      diff2 += d * d;
      yp[i] = ynew;
      next_zsum += 2.0 * cut(ynew) - ynew;
    }
    zsum = next_zsum;
    const double residual = scale * std::sqrt(diff2);
    if (options.record_history) result.residuals.push_back(residual);
    result.iterations = k + 1;
    if (residual < problem.eps_tol) {
      result.x.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) result.x[i] = cut(yp[i]);
      return;
    }
  }
  std::vector<double> tail;
  const size_t keep = std::min<size_t>(result.residuals.size(), 20);
  tail.assign(result.residuals.end() - static_cast<long>(keep), result.residuals.end());
  std::ostringstream msg;
  msg << "dr_solve: no convergence after " << options.max_iterations << " iterations";
  if (!tail.empty()) msg << " (last residual " << tail.back() << ")";
  throw ConvergenceError(msg.str(), std::move(tail));
}

namespace {

struct OracleSearch {
  const LimiterProblem& p;
  bool capped;
  std::vector<int> state;  // 0 free, 1 at lower, 2 at upper
  std::vector<int> best_state;
  double best_objective = kInfinity;
  double best_mu = 0.0;

  void visit(Eigen::Index i, int n_free, double sum_free, double min_free, double max_free, double fixed_sum,
             double fixed_objective) {
    const Eigen::Index n = p.size();
    if (fixed_objective >= best_objective) return;
    if (i == n) {
      const double tol = 1e-12 * std::max(1.0, std::abs(p.b_cons));
      double mu = 0.0;
      double objective = fixed_objective;
      if (n_free == 0) {
        if (std::abs(fixed_sum - p.b_cons) > tol) return;
      } else {
        mu = (p.b_cons - fixed_sum - sum_free) / n_free;
        if (min_free + mu < p.lower - tol) return;
        if (capped && max_free + mu > p.upper + tol) return;
        objective += n_free * mu * mu;
      }
      if (objective < best_objective) {
        best_objective = objective;
        best_state = state;
        best_mu = mu;
      }
      return;
    }
    const double wi = p.w(i);
    state[i] = 0;
    visit(i + 1, n_free + 1, sum_free + wi, std::min(min_free, wi), std::max(max_free, wi), fixed_sum,
          fixed_objective);
    state[i] = 1;
    visit(i + 1, n_free, sum_free, min_free, max_free, fixed_sum + p.lower,
          fixed_objective + (p.lower - wi) * (p.lower - wi));
    if (capped) {
      state[i] = 2;
      visit(i + 1, n_free, sum_free, min_free, max_free, fixed_sum + p.upper,
            fixed_objective + (p.upper - wi) * (p.upper - wi));
    }
  }
};

}  // namespace

bool restore_sum(Eigen::Ref<Eigen::VectorXd> x, double b, double lower, double upper) {
  const Eigen::Index n = x.size();
  std::vector<char> movable(n);
  for (Eigen::Index i = 0; i < n; ++i) movable[i] = x(i) > lower && x(i) < upper;
  for (;;) {
    long count = 0;
    double fixed = 0.0;
    double free_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (movable[i]) {
        ++count;
        free_sum += x(i);
      } else {
        fixed += x(i);
      }
    }
    if (count == 0) return false;
    const double shift = (b - fixed - free_sum) / static_cast<double>(count);
    bool dropped = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (movable[i] && (x(i) + shift < lower || x(i) + shift > upper)) {
        movable[i] = 0;
        dropped = true;
      }
    }
    if (dropped) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (movable[i]) x(i) += shift;
    }
    return true;
  }
}

Eigen::VectorXd qp_oracle(const LimiterProblem& problem) {
  if (problem.size() > 20) throw ContractViolation("qp_oracle: at most 20 variables");
  if (!problem.feasible()) throw InfeasibleProblem("qp_oracle: sum constraint incompatible with the bounds");
  OracleSearch search{problem, std::isfinite(problem.upper), std::vector<int>(problem.size(), 0), {}};
  search.visit(0, 0, 0.0, kInfinity, -kInfinity, 0.0, 0.0);
  if (search.best_state.empty()) throw InfeasibleProblem("qp_oracle: no feasible active set");
  Eigen::VectorXd x(problem.size());
  for (Eigen::Index i = 0; i < problem.size(); ++i) {
    switch (search.best_state[i]) {
      case 0: x(i) = problem.w(i) + search.best_mu; break;
      case 1: x(i) = problem.lower; break;
      default: x(i) = problem.upper; break;
    }
  }
  box_cutoff(x, problem.lower, problem.upper);
  return x;
}

CellAverageReport limit_cell_averages(DGField& f, double cell_size, const LimiterSettings& settings) {
  CellAverageReport report;
  const Eigen::VectorXd w = f.cell_averages();
  const bool any_bad = (w.array() < settings.lower).any() || (w.array() > settings.upper).any();
  if (!any_bad) return report;

  BadCellSet set;
  if (settings.detect_trouble_cells) {
    set = detect_bad_cells(w, settings.lower, settings.upper);
  } else {
    set.active.resize(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      set.active[i] = static_cast<int>(i);
      if (w(i) < settings.lower || w(i) > settings.upper) ++set.bad;
    }
  }

  Eigen::VectorXd wk(set.active.size());
  for (size_t i = 0; i < set.active.size(); ++i) wk(static_cast<Eigen::Index>(i)) = w(set.active[i]);
  const LimiterProblem problem =
      LimiterProblem::from_averages(std::move(wk), settings.lower, settings.upper, settings.eps_tol, cell_size);
  if (!problem.feasible()) {
    throw InfeasibleProblem("limit_cell_averages: total mass insufficient for positivity on active set");
  }
  const DRParameters params = limiter_parameters(set.bad, static_cast<int>(problem.size()));
  DRResult dr = dr_solve(problem, params, settings.dr);
  // the iterate meets the sum only to the stopping tolerance; over many steps
  // that drifts the mass, so the free entries absorb the remainder
  restore_sum(dr.x, problem.b_cons, problem.lower, problem.upper);

  for (size_t i = 0; i < set.active.size(); ++i) f.cell_average(set.active[i]) = dr.x(static_cast<Eigen::Index>(i));
  report.applied = true;
  report.active_cells = static_cast<int>(set.active.size());
  report.bad_cells = set.bad;
  report.iterations = dr.iterations;
  report.mass_change = f.cell_area * (dr.x.sum() - problem.b_cons);
  report.residuals = std::move(dr.residuals);
  return report;
}

ZhangShuReport zhang_shu_limit(const DGSpace& space, DGField& f, double eps_zs) {
  ZhangShuReport report;
  const int nb = f.modes;
  const Eigen::MatrixXd& table = space.volume_table().values;
  for (int c = 0; c < f.num_cells; ++c) {
    const double avg = f.cell_average(c);
    if (avg < eps_zs) {
      std::ostringstream msg;
      msg << "zhang_shu_limit: cell " << c << " average " << avg << " below eps " << eps_zs;
      throw ContractViolation(msg.str());
    }
    auto coeffs = f.cell(c);
    const double lowest = (table * coeffs).minCoeff();
    if (lowest >= eps_zs) continue;
    double theta = std::min(1.0, (avg - eps_zs) / (avg - lowest));
    const Eigen::VectorXd original = coeffs.tail(nb - 1);
    coeffs.tail(nb - 1) = theta * original;
    // round-off can leave the new minimum a few ulps under eps
    for (int guard = 0; guard < 4 && (table * coeffs).minCoeff() < eps_zs; ++guard) {
      theta = guard < 3 ? theta * (1.0 - 1e-10) : 0.0;
      coeffs.tail(nb - 1) = theta * original;
    }
    ++report.limited_cells;
    report.min_theta = std::min(report.min_theta, theta);
  }
  return report;
}

PostprocessReport enforce_positivity(const DGSpace& space, DGField& f, const LimiterSettings& settings) {
  PostprocessReport report;
  report.stage1 = limit_cell_averages(f, space.mesh().h, settings);
  report.stage2 = zhang_shu_limit(space, f, settings.eps_zs);
  return report;
}

}  // namespace fpdg
