#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace fpdg::harness {

/// Point values of the two-strip test function at the grid nodes
/// (i/n, j/n), 0 <= i, j < n:
///   -0.25 for |x - 1/4| < delta/4 or |x - 3/4| < delta/4,
///   cos^8(2 pi x) + 1e-13 otherwise.
Eigen::VectorXd strip_field(int n, double delta);

struct StripCalibration {
  double delta = 0.0;
  double negative_fraction = 0.0;
};

/// Adjusts delta until the negative fraction of strip_field(n, .) lies within
/// 10% (relative) of `target`. Throws ConfigurationError if the grid cannot
/// resolve it.
StripCalibration calibrate_strips(int n, double target);

struct DRBenchmarkRow {
  long size = 0;  // number of cell averages N = n^2
  double delta = 0.0;
  double negative_fraction = 0.0;
  long iterations = 0;
  double mean_seconds = 0.0;
  double ratio = 0.0;  // mean time over the previous size's; 0 for the first row
};

/// Times dr_solve (eps_tol 1e-13, m = 1e-13, M = inf) on the calibrated
/// strip field, `reps` times per size after one untimed warm-up solve. Sizes must be strictly increasing
/// perfect squares.
std::vector<DRBenchmarkRow> dr_benchmark(const std::vector<long>& sizes, double negative_fraction, int reps);

void write_benchmark_csv(const std::string& path, const std::vector<DRBenchmarkRow>& rows);

}  // namespace fpdg::harness
