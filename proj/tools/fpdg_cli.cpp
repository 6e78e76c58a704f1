#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpdg/errors.hpp"
#include "fpdg/harness/benchmark.hpp"
#include "fpdg/harness/config.hpp"
#include "fpdg/harness/presets.hpp"

using namespace fpdg;

namespace {

struct CommonFlags {
  std::optional<std::string> limiter;
  std::optional<std::string> out;

  void attach(CLI::App* app) {
    app->add_option("--limiter", limiter, "Positivity postprocessing")->check(CLI::IsMember({"on", "off"}));
    app->add_option("--out", out, "Output directory");
  }
  void apply(harness::ExperimentConfig& cfg) const {
    if (limiter) cfg.limiter = harness::parse_on_off(*limiter);
    if (out) cfg.output_dir = *out;
  }
};

int print_table(const std::vector<harness::ConvergenceRow>& rows) {
  std::cout << "dx,tau,l2h_err,l2h_rate,linf_err,linf_rate\n";
  for (const auto& r : rows) {
    std::cout << r.dx << ',' << r.tau << ',' << r.err_a << ',' << (r.rate_a ? std::to_string(*r.rate_a) : "") << ','
              << r.err_b << ',' << (r.rate_b ? std::to_string(*r.rate_b) : "") << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-implicit DG solver for linearized Fokker-Planck problems with a positivity limiter"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run the preset described by a key=value config file");
  run_cmd->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run_flags.attach(run_cmd);

  CommonFlags conv_flags;
  std::string preset;
  std::vector<int> degrees{2};
  int levels = 2;
  auto* conv_cmd = app.add_subcommand("convergence", "Refinement ladder for an accuracy preset");
  conv_cmd->add_option("--preset", preset, "ou_accuracy or anisotropic")
      ->required()
      ->check(CLI::IsMember({"ou_accuracy", "anisotropic"}));
  conv_cmd->add_option("--degrees", degrees, "Polynomial degrees")->delimiter(',');
  conv_cmd->add_option("--levels", levels, "Number of meshes")->check(CLI::PositiveNumber);
  conv_flags.attach(conv_cmd);

  std::optional<std::string> bench_out;
  std::vector<long> sizes{1L << 14, 1L << 16, 1L << 18, 1L << 20, 1L << 22};
  double neg_frac = 0.05;
  int reps = 100;
  auto* bench_cmd = app.add_subcommand("bench-dr", "Time the Douglas-Rachford limiter on a synthetic field");
  bench_cmd->add_option("--sizes", sizes, "Numbers of cell averages (perfect squares)")->delimiter(',');
  bench_cmd->add_option("--neg-frac", neg_frac, "Fraction of negative samples")->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--reps", reps, "Repetitions per size")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bench_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      harness::ExperimentConfig cfg = harness::load_config(config_path);
      run_flags.apply(cfg);
      return harness::run_preset(cfg);
    }
    if (*conv_cmd) {
      for (int k : degrees) {
        harness::ExperimentConfig base = harness::ladder_base(preset, k);
        conv_flags.apply(base);
        const auto rows = harness::convergence_study(base, levels);
        std::filesystem::create_directories(base.output_dir);
        const std::string path =
            (std::filesystem::path(base.output_dir) / (preset + "_k" + std::to_string(k) + "_convergence.csv")).string();
        harness::write_convergence_csv(path, rows);
        std::cout << preset << " k=" << k << '\n';
        print_table(rows);
      }
      return 0;
    }
    if (*bench_cmd) {
      const auto rows = harness::dr_benchmark(sizes, neg_frac, reps);
      const std::string dir = bench_out.value_or("out");
      std::filesystem::create_directories(dir);
      harness::write_benchmark_csv((std::filesystem::path(dir) / "bench_dr.csv").string(), rows);
      std::cout << "size,delta,neg_frac,iterations,mean_seconds,ratio\n";
      for (const auto& r : rows) {
        std::cout << r.size << ',' << r.delta << ',' << r.negative_fraction << ',' << r.iterations << ','
                  << r.mean_seconds << ',' << (r.ratio > 0 ? std::to_string(r.ratio) : "") << '\n';
      }
      return 0;
    }
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
