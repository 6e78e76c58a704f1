#pragma once

#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "fpdg/dg_space.hpp"

namespace fpdg::harness {

using ExactSolution = std::function<double(double t, const Eigen::Vector2d& v)>;

/// sqrt(dx^2 sum_cells sum_nu w_nu |f_h(q_nu) - f(t, q_nu)|^2) on the
/// space's volume rule.
double l2h_error(const DGSpace& space, const DGField& f, const ExactSolution& exact, double t);

/// max over cells and volume quadrature points of |f_h - f(t, .)|.
double linf_error(const DGSpace& space, const DGField& f, const ExactSolution& exact, double t);

/// ln(err_coarse / err_fine) / ln 2. Throws UndefinedRateError for a
/// nonpositive error.
double convergence_rate(double err_coarse, double err_fine);

/// Sigma_ij = int v_i v_j f_h dv with a (k+2)-point Gauss rule per direction.
Eigen::Matrix2d covariance_moments(const DGSpace& space, const DGField& f);

struct DiagnosticsRecord {
  long step = 0;
  double time = 0.0;
  double mass = 0.0;
  std::optional<double> l2h_err;
  std::optional<double> linf_err;
  std::optional<double> sigma11;
  std::optional<double> sigma22;
  double min_cell_avg = 0.0;
  double min_quad_val = 0.0;
  std::optional<long> dr_iters;
};

/// step,time,mass,l2h_err,linf_err,sigma11,sigma22,min_cell_avg,min_quad_val,dr_iters
class DiagnosticsWriter {
 public:
  explicit DiagnosticsWriter(const std::string& path);
  void write(const DiagnosticsRecord& rec);

  static const char* header();

 private:
  std::ofstream out_;
};

/// Header `# nx ny k t` (values), then per cell:
/// index center_x center_y average min_SE max_SE, where S_E is the volume
/// quadrature point set.
void write_grid_dump(const std::string& path, const DGSpace& space, const DGField& f, double t);

/// Shortest decimal form that round-trips a double.
std::string format_number(double value);

}  // namespace fpdg::harness
