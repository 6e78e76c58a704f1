#include "fpdg/harness/benchmark.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include "fpdg/errors.hpp"
#include "fpdg/harness/diagnostics.hpp"
#include "fpdg/positivity.hpp"

namespace fpdg::harness {

namespace {

// Sample abscissae x_i = i / n put a sample on each strip centre, so the strip
// sample count is odd and 5% is reachable already at n = 128.
double sample_x(int i, int n) { return static_cast<double>(i) / n; }

bool in_strip(double x, double delta) { return std::abs(x - 0.25) < delta / 4 || std::abs(x - 0.75) < delta / 4; }

}  // namespace

Eigen::VectorXd strip_field(int n, double delta) {
  Eigen::VectorXd column(n);
  for (int i = 0; i < n; ++i) {
    const double x = sample_x(i, n);
    column(i) = in_strip(x, delta) ? -0.25 : std::pow(std::cos(2.0 * std::numbers::pi * x), 8) + 1e-13;
  }
  // the field only depends on x; row-major over (x, y) with x fastest
  return column.replicate(n, 1);
}

namespace {

double negative_fraction_of(int n, double delta) {
  int negative = 0;
  for (int i = 0; i < n; ++i) negative += in_strip(sample_x(i, n), delta);
  return static_cast<double>(negative) / n;
}

}  // namespace

StripCalibration calibrate_strips(int n, double target) {
  if (!(target > 0 && target < 1)) throw ConfigurationError("calibrate_strips: target fraction must lie in (0, 1)");
  // the negative fraction is a nondecreasing step function of delta
  double lo = 0.0;
  double hi = 2.0;
  StripCalibration best{target, negative_fraction_of(n, target)};
  for (int it = 0; it < 200 && std::abs(best.negative_fraction - target) > 0.1 * target; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double frac = negative_fraction_of(n, mid);
    if (std::abs(frac - target) < std::abs(best.negative_fraction - target)) best = {mid, frac};
    (frac < target ? lo : hi) = mid;
  }
  if (std::abs(best.negative_fraction - target) > 0.1 * target) {
    throw ConfigurationError("calibrate_strips: grid too coarse for the requested negative fraction");
  }
  return best;
}

std::vector<DRBenchmarkRow> dr_benchmark(const std::vector<long>& sizes, double negative_fraction, int reps) {
  if (sizes.empty()) throw ConfigurationError("dr_benchmark: no sizes given");
  if (reps < 1) throw ConfigurationError("dr_benchmark: reps must be >= 1");
  std::vector<DRBenchmarkRow> rows;
  for (size_t s = 0; s < sizes.size(); ++s) {
    if (s > 0 && sizes[s] <= sizes[s - 1]) throw ConfigurationError("dr_benchmark: sizes must increase strictly");
    const int n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(sizes[s]))));
    if (static_cast<long>(n) * n != sizes[s]) throw ConfigurationError("dr_benchmark: sizes must be perfect squares");

    const StripCalibration cal = calibrate_strips(n, negative_fraction);
    const LimiterProblem problem = LimiterProblem::from_averages(strip_field(n, cal.delta), 1e-13, kInfinity, 1e-13,
                                                                 1.0 / n);
    if (!problem.feasible()) throw InfeasibleProblem("dr_benchmark: synthetic problem is infeasible");
    const auto bad = static_cast<int>((problem.w.array() < problem.lower).count());
    const DRParameters params = limiter_parameters(bad, static_cast<int>(problem.size()));
    DROptions options;
    options.record_history = false;

    DRBenchmarkRow row;
    row.size = sizes[s];
    row.delta = cal.delta;
    row.negative_fraction = cal.negative_fraction;
    DRResult result;
    Eigen::VectorXd work;
    dr_solve_into(problem, params, options, result, work);  // untimed warm-up touches the buffers
    double total = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto start = std::chrono::steady_clock::now();
      dr_solve_into(problem, params, options, result, work);
      total += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      row.iterations = result.iterations;
    }
    row.mean_seconds = total / reps;
    row.ratio = rows.empty() ? 0.0 : row.mean_seconds / rows.back().mean_seconds;
    rows.push_back(row);
  }
  return rows;
}

void write_benchmark_csv(const std::string& path, const std::vector<DRBenchmarkRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigurationError("cannot open '" + path + "' for writing");
  out << "size,delta,neg_frac,iterations,mean_seconds,ratio\n";
  for (const auto& r : rows) {
    out << r.size << ',' << format_number(r.delta) << ',' << format_number(r.negative_fraction) << ','
        << r.iterations << ',' << format_number(r.mean_seconds) << ',';
    if (r.ratio > 0) out << format_number(r.ratio);
    out << '\n';
  }
}

}  // namespace fpdg::harness
