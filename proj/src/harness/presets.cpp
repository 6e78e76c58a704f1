#include "fpdg/harness/presets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <set>

#include "fpdg/errors.hpp"
#include "fpdg/harness/benchmark.hpp"
#include "fpdg/mesh.hpp"

namespace fpdg::harness {

namespace {

constexpr double kPi = std::numbers::pi;

SpeciesParams species(const ExperimentConfig& cfg) {
  SpeciesParams p;
  p.n_b = 1.0;
  p.m_b = cfg.m_b;
  p.m = cfg.m;
  p.T = cfg.T;
  p.u = cfg.u;
  p.eps_inv = cfg.eps_inv;
  p.validate();
  return p;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

double ou_exact(double t, const Eigen::Vector2d& v) {
  const double a = 1.0 - std::exp(-2.0 * t);
  return std::exp(-v.squaredNorm() / (2.0 * a)) / (2.0 * kPi * a);
}

double gaussian(const Eigen::Vector2d& v, double s1, double s2) {
  return std::exp(-0.5 * (v(0) * v(0) / s1 + v(1) * v(1) / s2)) / (2.0 * kPi * std::sqrt(s1 * s2));
}

PresetSetup make_setup(const ExperimentConfig& cfg) {
  cfg.validate();
  PresetSetup s;
  s.step.tau = cfg.tau;
  s.step.t_start = cfg.t_start;
  s.step.t_end = cfg.t_end;
  s.step.sigma = cfg.sigma;
  s.step.eps_inv = cfg.eps_inv;
  s.step.limiter_enabled = cfg.limiter;

  const double span = cfg.t_end - cfg.t_start;
  const double ratio = span / cfg.tau;
  if (span > 0 && std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, std::round(ratio))) {
    s.step.tau = span / std::ceil(ratio);
    s.tau_adjusted = true;
  }

  const std::string& p = cfg.preset;
  if (p == "ou_accuracy") {
    s.provider = std::make_unique<OuIdentityProvider>();
    const double t0 = cfg.t_start;
    s.initial = [t0](const Eigen::Vector2d& v) { return ou_exact(t0, v); };
    s.exact = ou_exact;
  } else if (p == "anisotropic") {
    s.provider = std::make_unique<AnisotropicProvider>(1.8, 0.2);
    s.initial = [](const Eigen::Vector2d& v) { return gaussian(v, 1.8, 0.2); };
  } else if (p == "rfp_reduced") {
    s.provider = std::make_unique<MaxwellianBackgroundProvider>(species(cfg));
    const double area = (s.hi - s.lo).prod();
    s.initial = [area](const Eigen::Vector2d&) { return 1.0 / area; };
  } else if (p == "beam_relaxation") {
    s.provider = std::make_unique<MaxwellianBackgroundProvider>(species(cfg));
    const double m = cfg.m;
    s.initial = [m](const Eigen::Vector2d& v) { return maxwellian(v, 1.0, Eigen::Vector2d(7.0, 0.0), 0.25, m); };
    s.snapshot_times = {0, 1, 3, 7, 10, 20, 30, 40, 50, 80, 120, 200};
  } else if (p == "positivity_importance") {
    s.provider = std::make_unique<MaxwellianBackgroundProvider>(species(cfg));
    s.initial = [](const Eigen::Vector2d& v) { return std::exp(-0.5 * v.squaredNorm()) / (2.0 * kPi); };
  } else {
    throw ConfigurationError("preset '" + p + "' has no time-dependent setup");
  }
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  PresetSetup setup = make_setup(cfg);
  const DGSpace space(build_mesh(setup.lo, setup.hi, cfg.nx, cfg.ny), cfg.degree);
  const StepConfig& step = setup.step;
  const long steps = step.num_steps();

  std::set<long> snapshot_steps;
  for (double t : setup.snapshot_times) {
    if (t < step.t_start - 1e-12 || t > step.t_end + 1e-12) continue;
    const double chunks = std::round((t - step.t_start) / (step.tau * cfg.output_stride));
    snapshot_steps.insert(std::min(steps, static_cast<long>(chunks) * cfg.output_stride));
  }

  if (options.write_outputs) std::filesystem::create_directories(cfg.output_dir);
  std::unique_ptr<DiagnosticsWriter> writer;
  if (options.write_outputs) writer = std::make_unique<DiagnosticsWriter>(join(cfg.output_dir, "diagnostics.csv"));

  ExperimentResult result;
  result.tau = step.tau;
  RunCallbacks callbacks;
  callbacks.stride = cfg.output_stride;
  callbacks.on_output = [&](const StepRecord& rec, const DGField& f) {
    DiagnosticsRecord d;
    d.step = rec.step;
    d.time = rec.time;
    d.mass = rec.mass;
    if (setup.exact) {
      d.l2h_err = l2h_error(space, f, *setup.exact, rec.time);
      d.linf_err = linf_error(space, f, *setup.exact, rec.time);
    }
    const Eigen::Matrix2d sigma = covariance_moments(space, f);
    d.sigma11 = sigma(0, 0);
    d.sigma22 = sigma(1, 1);
    d.min_cell_avg = rec.min_cell_average;
    d.min_quad_val = rec.min_quadrature_value;
    if (rec.step > 0 && step.limiter_enabled) d.dr_iters = rec.dr_iterations;
    result.diagnostics.push_back(d);
    if (writer) writer->write(d);
    if (options.write_outputs && snapshot_steps.count(rec.step)) {
      write_grid_dump(join(cfg.output_dir, "snapshot_" + std::to_string(rec.step) + ".txt"), space, f, rec.time);
    }
  };
  callbacks.on_step = [&](const StepRecord& rec, const StepStats& stats) {
    if (stats.limiter.stage1.applied) ++result.dr_invocations;
    if (options.on_step) options.on_step(rec, stats);
  };

  result.summary = run(setup.initial, space, step, *setup.provider, callbacks);
  const auto& history = result.summary.history;
  result.initial_mass = history.front().mass;
  result.min_cell_average = history.front().min_cell_average;
  result.min_quadrature_value = history.front().min_quadrature_value;
  for (const StepRecord& rec : history) {
    result.max_relative_mass_drift =
        std::max(result.max_relative_mass_drift, std::abs(rec.mass - result.initial_mass) / std::abs(result.initial_mass));
    result.min_cell_average = std::min(result.min_cell_average, rec.min_cell_average);
    result.min_quadrature_value = std::min(result.min_quadrature_value, rec.min_quadrature_value);
  }
  result.final_time = history.back().time;
  const DGField& f = result.summary.final_field;
  result.final_covariance = covariance_moments(space, f);
  if (setup.exact) {
    result.final_l2h = l2h_error(space, f, *setup.exact, result.final_time);
    result.final_linf = linf_error(space, f, *setup.exact, result.final_time);
  }
  if (options.write_outputs) write_grid_dump(join(cfg.output_dir, "final_grid.txt"), space, f, result.final_time);
  return result;
}

double ladder_tau_ratio(int degree) {
  const int rate = degree % 2 == 0 ? degree : degree + 1;
  return std::pow(2.0, rate);
}

bool is_accuracy_preset(const std::string& preset) { return preset == "ou_accuracy" || preset == "anisotropic"; }

ExperimentConfig ladder_base(const std::string& preset, int degree) {
  if (!is_accuracy_preset(preset)) throw ConfigurationError("preset '" + preset + "' has no refinement ladder");
  ExperimentConfig c = preset_defaults(preset);
  c.degree = degree;
  if (preset == "ou_accuracy") {
    c.nx = c.ny = 64;
    c.tau = degree == 3 ? 1.6e-1 : 4e-2;
  } else {
    c.nx = c.ny = degree == 3 ? 32 : 64;
    c.tau = degree == 3 ? 1.6e-2 : 4e-4;
  }
  return c;
}

namespace {

ConvergenceRow row_from(const ExperimentConfig& cfg, const ExperimentResult& r) {
  ConvergenceRow row;
  row.dx = 20.0 / cfg.nx;
  row.tau = r.tau;
  if (cfg.preset == "ou_accuracy") {
    row.err_a = *r.final_l2h;
    row.err_b = *r.final_linf;
  } else {
    const AnisotropicProvider an(1.8, 0.2);
    const Eigen::Matrix2d target = an.equilibrium_covariance();
    row.err_a = std::abs(r.final_covariance(0, 0) - target(0, 0));
    row.err_b = std::abs(r.final_covariance(1, 1) - target(1, 1));
  }
  return row;
}

ExperimentConfig level_config(const ExperimentConfig& base, int level) {
  ExperimentConfig c = base;
  const int scale = 1 << level;
  c.nx = base.nx * scale;
  c.ny = base.ny * scale;
  c.tau = base.tau / std::pow(ladder_tau_ratio(base.degree), level);
  c.output_stride = base.output_stride * static_cast<int>(std::pow(ladder_tau_ratio(base.degree), level));
  return c;
}

void fill_rates(std::vector<ConvergenceRow>& rows) {
  for (size_t i = 1; i < rows.size(); ++i) {
    rows[i].rate_a = convergence_rate(rows[i - 1].err_a, rows[i].err_a);
    rows[i].rate_b = convergence_rate(rows[i - 1].err_b, rows[i].err_b);
  }
}

}  // namespace

std::vector<ConvergenceRow> convergence_study(const ExperimentConfig& base, int levels) {
  if (!is_accuracy_preset(base.preset)) throw ConfigurationError("convergence_study: not an accuracy preset");
  if (levels < 1) throw ConfigurationError("convergence_study: levels must be >= 1");
  std::vector<ConvergenceRow> rows;
  for (int l = 0; l < levels; ++l) {
    const ExperimentConfig c = level_config(base, l);
    rows.push_back(row_from(c, run_experiment(c, RunOptions{false, {}})));
  }
  fill_rates(rows);
  return rows;
}

void write_convergence_csv(const std::string& path, const std::vector<ConvergenceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigurationError("cannot open '" + path + "' for writing");
  out << "dx,tau,l2h_err,l2h_rate,linf_err,linf_rate\n";
  const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const auto& r : rows) {
    out << format_number(r.dx) << ',' << format_number(r.tau) << ',' << format_number(r.err_a) << ',' << opt(r.rate_a)
        << ',' << format_number(r.err_b) << ',' << opt(r.rate_b) << '\n';
  }
}

int run_preset(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  if (cfg.preset == "dr_benchmark") {
    std::vector<long> sizes;
    for (int l = 0; l < cfg.levels; ++l) sizes.push_back(static_cast<long>(cfg.nx << l) * (cfg.nx << l));
    const auto rows = dr_benchmark(sizes, 0.05, 100);
    write_benchmark_csv(join(cfg.output_dir, "bench_dr.csv"), rows);
    for (const auto& r : rows) {
      std::cout << "N=" << r.size << " neg_frac=" << r.negative_fraction << " iters=" << r.iterations
                << " mean_s=" << r.mean_seconds;
      if (r.ratio > 0) std::cout << " ratio=" << r.ratio;
      std::cout << '\n';
    }
    return 0;
  }

  const ExperimentResult result = run_experiment(cfg);
  std::cout << cfg.preset << ": " << result.summary.history.size() - 1 << " steps to t=" << result.final_time
            << " (tau=" << result.tau << "), mass drift " << result.max_relative_mass_drift << ", min cell average "
            << result.min_cell_average << ", min quadrature value " << result.min_quadrature_value << '\n';
  if (make_setup(cfg).tau_adjusted) {
    std::cout << "note: tau shortened to " << result.tau << " for a whole number of steps\n";
  }
  if (is_accuracy_preset(cfg.preset)) {
    std::vector<ConvergenceRow> rows{row_from(cfg, result)};
    for (int l = 1; l < cfg.levels; ++l) {
      const ExperimentConfig c = level_config(cfg, l);
      rows.push_back(row_from(c, run_experiment(c, RunOptions{false, {}})));
    }
    fill_rates(rows);
    write_convergence_csv(join(cfg.output_dir, "convergence.csv"), rows);
  }
  return 0;
}

}  // namespace fpdg::harness
