#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fpdg/coefficients.hpp"
#include "fpdg/harness/config.hpp"
#include "fpdg/harness/diagnostics.hpp"
#include "fpdg/time_stepper.hpp"

namespace fpdg::harness {

/// Exact solution of the identity-diffusion accuracy test,
/// f = exp(-|v|^2 / 2a) / (2 pi a) with a = 1 - exp(-2t).
double ou_exact(double t, const Eigen::Vector2d& v);

/// Zero-mean Gaussian with covariance diag(s1, s2).
double gaussian(const Eigen::Vector2d& v, double s1, double s2);

struct PresetSetup {
  std::unique_ptr<CoefficientProvider> provider;
  std::function<double(const Eigen::Vector2d&)> initial;
  std::optional<ExactSolution> exact;
  Eigen::Vector2d lo{-10.0, -10.0};
  Eigen::Vector2d hi{10.0, 10.0};
  StepConfig step;
  /// True when tau was shortened so that (t_end - t_start) / tau is an integer.
  bool tau_adjusted = false;
  std::vector<double> snapshot_times;
};

/// Provider, initial data and stepping parameters of a preset.
/// Not defined for dr_benchmark.
PresetSetup make_setup(const ExperimentConfig& cfg);

struct RunOptions {
  bool write_outputs = true;
  /// Extra per-step hook (for example to capture limiter residual histories).
  std::function<void(const StepRecord&, const StepStats&)> on_step;
};

struct ExperimentResult {
  RunSummary summary;
  std::vector<DiagnosticsRecord> diagnostics;  // rows written at the output stride
  double tau = 0.0;                            // effective step
  double final_time = 0.0;
  double initial_mass = 0.0;
  double max_relative_mass_drift = 0.0;
  double min_cell_average = 0.0;     // over every step
  double min_quadrature_value = 0.0;  // over every step
  long dr_invocations = 0;            // steps in which the cell-average limiter ran
  Eigen::Matrix2d final_covariance = Eigen::Matrix2d::Zero();
  std::optional<double> final_l2h;
  std::optional<double> final_linf;
};

/// Runs a (non-benchmark) preset. With write_outputs, writes
/// diagnostics.csv, snapshot grid dumps and final_grid.txt to output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// tau(level) = tau(0) / ratio^level with ratio = 2^rate, rate being the
/// expected spatial order (k for even k, k + 1 for odd k).
double ladder_tau_ratio(int degree);

/// Base (coarsest) configuration of a preset's refinement ladder.
ExperimentConfig ladder_base(const std::string& preset, int degree);

struct ConvergenceRow {
  double dx = 0.0;
  double tau = 0.0;
  double err_a = 0.0;  // L2h error (ou_accuracy) or |Sigma11 - Sigma11(inf)| (anisotropic)
  std::optional<double> rate_a;
  double err_b = 0.0;  // Linf error (ou_accuracy) or |Sigma22 - Sigma22(inf)| (anisotropic)
  std::optional<double> rate_b;
};

bool is_accuracy_preset(const std::string& preset);

/// Runs `levels` halvings starting from `base` and tabulates the errors.
std::vector<ConvergenceRow> convergence_study(const ExperimentConfig& base, int levels);

/// dx,tau,l2h_err,l2h_rate,linf_err,linf_rate
void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows);

/// CLI entry for `run`: executes the preset and writes its artifacts.
/// Returns the process exit status.
int run_preset(const ExperimentConfig& cfg);

}  // namespace fpdg::harness
