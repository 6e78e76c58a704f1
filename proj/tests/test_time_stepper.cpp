#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fpdg/coefficients.hpp"
#include "fpdg/dg_space.hpp"
#include "fpdg/errors.hpp"
#include "fpdg/harness/diagnostics.hpp"
#include "fpdg/harness/presets.hpp"
#include "fpdg/time_stepper.hpp"

using namespace fpdg;

namespace {

class PureDiffusion final : public CoefficientProvider {
 public:
  Eigen::Matrix2d diffusion(double, const Eigen::Vector2d& v) const override {
    return (1.0 + 0.1 * v.squaredNorm()) * Eigen::Matrix2d::Identity();
  }
  Eigen::Vector2d drift(double, const Eigen::Vector2d&) const override { return Eigen::Vector2d::Zero(); }
};

StepConfig ou_config(double tau) {
  StepConfig cfg;
  cfg.tau = tau;
  cfg.t_start = 1.0;
  cfg.t_end = 1.0 + tau;
  cfg.limiter_enabled = false;
  return cfg;
}

double l2h(const DGSpace& space, const DGField& a, const DGField& b) {
  double s = 0;
  const auto& w = space.volume_rule().weights;
  for (int c = 0; c < space.num_cells(); ++c) {
    const Eigen::VectorXd d = space.values_at_quadrature(a, c) - space.values_at_quadrature(b, c);
    s += w.dot(d.cwiseAbs2());
  }
  return std::sqrt(space.mesh().cell_area() * s);
}

SpeciesParams beam_params() {
  SpeciesParams p;
  p.m_b = 100;
  p.eps_inv = 100;
  return p;
}

}  // namespace

TEST_CASE("step configuration") {
  StepConfig cfg;
  cfg.tau = 0.1;
  cfg.t_start = 0.0;
  cfg.t_end = 2.0;
  CHECK(cfg.num_steps() == 20);
  cfg.t_end = 2.05;
  CHECK_THROWS_AS(cfg.num_steps(), ConfigurationError);
  cfg.t_end = 0.0;
  CHECK(cfg.num_steps() == 0);
  cfg.tau = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigurationError);
  cfg = {};
  cfg.solver_tolerance = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigurationError);
  cfg = {};
  cfg.t_end = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigurationError);
}

TEST_CASE("nested dissection visits every cell once") {
  for (auto [nx, ny] : {std::pair{1, 1}, {5, 3}, {16, 16}, {33, 17}}) {
    std::vector<int> order = nested_dissection_cells(nx, ny);
    REQUIRE(order.size() == static_cast<size_t>(nx * ny));
    std::sort(order.begin(), order.end());
    std::vector<int> iota(order.size());
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(order == iota);
  }
}

TEST_CASE("linear solvers meet the residual contract") {
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 12, 12), 2);
  const AnisotropicProvider prov(1.8, 0.2);
  SparseOperator a = assemble_nipg(space, prov, 0.1, 1.0);
  a *= 4e-2;
  a += assemble_mass(space);
  std::mt19937 rng(8);
  std::normal_distribution<double> g;
  Eigen::VectorXd rhs(a.rows());
  for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs(i) = g(rng);
  const double tol = 1e-12;
  for (SolverKind kind : {SolverKind::Direct, SolverKind::Iterative, SolverKind::Refinement}) {
    LinearSolve solver(kind, tol, 0, space.modes(), nested_dissection_cells(12, 12));
    solver.compute(a);
    const Eigen::VectorXd x = solver.solve(rhs, Eigen::VectorXd::Zero(rhs.size()));
    CHECK((a * x - rhs).norm() <= tol * rhs.norm());
    CHECK(solver.last_relative_residual() <= tol);
  }
}

TEST_CASE("the iterative path reports non-convergence") {
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 8, 8), 2);
  SparseOperator a = assemble_nipg(space, OuIdentityProvider{}, 0.0, 1.0);
  a += assemble_mass(space);
  LinearSolve solver(SolverKind::Iterative, 1e-14, 1, space.modes());
  solver.compute(a);
  const Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(a.rows(), -1, 1);
  CHECK_THROWS_AS(solver.solve(rhs, Eigen::VectorXd::Zero(rhs.size())), SolverError);
}

TEST_CASE("project_initial") {
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 8, 8), 2);
  SUBCASE("uniform data") {
    const DGField f = project_initial([](const Eigen::Vector2d&) { return 1.0 / 400; }, space, nullptr);
    for (int c = 0; c < space.num_cells(); ++c) {
      CHECK(f.cell_average(c) == doctest::Approx(1.0 / 400).epsilon(1e-14));
      CHECK(f.cell(c).tail(space.modes() - 1).cwiseAbs().maxCoeff() < 1e-17);
    }
    CHECK(f.mass() == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("polynomials of degree k are reproduced") {
    auto poly = [](const Eigen::Vector2d& v) { return 1 + v(0) - 0.3 * v(1) + 0.2 * v(0) * v(1) - 0.05 * v(1) * v(1); };
    const DGField f = project_initial(poly, space, nullptr);
    const auto& rule = space.volume_rule();
    for (int c = 0; c < space.num_cells(); ++c) {
      const Eigen::VectorXd vals = space.values_at_quadrature(f, c);
      for (int p = 0; p < rule.size(); ++p) {
        const double exact = poly(space.mesh().map_to_physical(c, rule.points.col(p)));
        CHECK(std::abs(vals(p) - exact) < 1e-13 * std::max(1.0, std::abs(exact)));
      }
    }
  }
  SUBCASE("mass equals the quadrature integral") {
    auto g = [](const Eigen::Vector2d& v) { return std::exp(-0.5 * v.squaredNorm()) * (1 + 0.1 * std::sin(v(0))); };
    const DGField f = project_initial(g, space, nullptr);
    double integral = 0;
    const auto& rule = space.volume_rule();
    for (int c = 0; c < space.num_cells(); ++c)
      for (int p = 0; p < rule.size(); ++p)
        integral += space.mesh().cell_area() * rule.weights(p) * g(space.mesh().map_to_physical(c, rule.points.col(p)));
    CHECK(std::abs(f.mass() - integral) < 1e-13 * integral);
  }
  SUBCASE("the limiter makes the projection admissible") {
    auto peaked = [](const Eigen::Vector2d& v) { return maxwellian(v, 1.0, {7, 0}, 0.25, 1.0); };
    const DGField raw = project_initial(peaked, space, nullptr);
    REQUIRE(space.min_quadrature_value(raw) < 0);
    const LimiterSettings settings;
    const DGField f = project_initial(peaked, space, &settings);
    CHECK(f.cell_averages().minCoeff() >= settings.lower);
    CHECK(space.min_quadrature_value(f) >= settings.eps_zs - 1e-15);
    CHECK(std::abs(f.mass() - raw.mass()) < 1e-12);
  }
}

TEST_CASE("constants are a steady state of pure diffusion") {
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 10, 10), 2);
  const PureDiffusion prov;
  StepConfig cfg;
  cfg.tau = 0.1;
  cfg.t_end = 0.1;
  cfg.limiter_enabled = false;
  const DGField f0 = project_initial([](const Eigen::Vector2d&) { return 0.7; }, space, nullptr);
  const DGField f1 = step(space, f0, 0.0, cfg, prov);
  CHECK((f1.coeffs - f0.coeffs).cwiseAbs().maxCoeff() <= 1e-12 * 0.7);
}

TEST_CASE("one step conserves mass") {
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 16, 16), 2);
  const MaxwellianBackgroundProvider beam(beam_params());
  const AnisotropicProvider aniso(1.8, 0.2);
  const OuIdentityProvider ou;
  auto g = [](const Eigen::Vector2d& v) { return std::exp(-0.5 * (v - Eigen::Vector2d(2, 1)).squaredNorm()); };
  const DGField f0 = project_initial(g, space, nullptr);
  StepConfig cfg;
  cfg.tau = 5e-3;
  cfg.t_end = 5e-3;
  cfg.limiter_enabled = false;
  for (const CoefficientProvider* prov : {static_cast<const CoefficientProvider*>(&beam),
                                          static_cast<const CoefficientProvider*>(&aniso),
                                          static_cast<const CoefficientProvider*>(&ou)}) {
    const DGField f1 = step(space, f0, 0.0, cfg, *prov);
    CHECK(std::abs(f1.mass() - f0.mass()) <= 1e-11 * f0.mass());
  }
}

TEST_CASE("local truncation error is second order in tau") {
  // one step of size tau against two of size tau/2 from the same data: the
  // difference is the leading local error, which scales like tau^2
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 32, 32), 2);
  const OuIdentityProvider prov;
  const DGField f0 = l2_project(space, [](const Eigen::Vector2d& v) { return harness::ou_exact(1.0, v); });
  auto gap = [&](double tau) {
    const DGField one = step(space, f0, 1.0, ou_config(tau), prov);
    StepConfig half = ou_config(tau / 2);
    const DGField a = step(space, f0, 1.0, half, prov);
    half.t_start = 1.0 + tau / 2;
    half.t_end = 1.0 + tau;
    const DGField b = step(space, a, 1.0 + tau / 2, half, prov);
    return l2h(space, one, b);
  };
  // tau small against the largest eigenvalues of the DG diffusion operator
  const double g1 = gap(4e-4);
  const double g2 = gap(2e-4);
  const double g3 = gap(1e-4);
  MESSAGE("one-step vs two half-steps: " << g1 << " " << g2 << " " << g3);
  CHECK(g1 / g2 == doctest::Approx(4.0).epsilon(0.12));
  CHECK(g2 / g3 == doctest::Approx(4.0).epsilon(0.12));

  // the deviation from the exact solution shrinks with tau down to the
  // spatial floor
  const double e1 = harness::l2h_error(space, step(space, f0, 1.0, ou_config(1e-2), prov), harness::ou_exact, 1.01);
  const double e2 =
      harness::l2h_error(space, step(space, f0, 1.0, ou_config(2.5e-3), prov), harness::ou_exact, 1.0025);
  CHECK(e2 < e1);
}

TEST_CASE("reused operators give bitwise-identical trajectories") {
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 12, 12), 2);
  auto f0 = [](const Eigen::Vector2d& v) { return maxwellian(v, 1.0, {3, 0}, 0.5, 1.0); };
  SpeciesParams p = beam_params();
  p.eps_inv = 10;
  const MaxwellianBackgroundProvider beam(p);
  const AnisotropicProvider aniso(1.8, 0.2);
  for (const CoefficientProvider* prov :
       {static_cast<const CoefficientProvider*>(&beam), static_cast<const CoefficientProvider*>(&aniso)}) {
    StepConfig cfg;
    cfg.tau = 1e-2;
    cfg.t_end = 0.2;
    cfg.eps_inv = prov == &beam ? 10.0 : 1.0;
    cfg.reuse_operators = true;
    const RunSummary a = run(f0, space, cfg, *prov);
    cfg.reuse_operators = false;
    const RunSummary b = run(f0, space, cfg, *prov);
    CHECK(a.final_field.coeffs == b.final_field.coeffs);
  }
}

TEST_CASE("run with zero steps returns the projected data") {
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 8, 8), 2);
  auto f0 = [](const Eigen::Vector2d& v) { return std::exp(-v.squaredNorm()); };
  StepConfig cfg;
  cfg.tau = 0.1;
  cfg.t_start = 2.0;
  cfg.t_end = 2.0;
  cfg.limiter_enabled = false;
  int outputs = 0;
  RunCallbacks cb;
  cb.on_output = [&](const StepRecord&, const DGField&) { ++outputs; };
  const RunSummary s = run(f0, space, cfg, OuIdentityProvider{}, cb);
  CHECK(s.final_field.coeffs == project_initial(f0, space, nullptr).coeffs);
  CHECK(s.history.size() == 1);
  CHECK(outputs == 1);
}

TEST_CASE("run records and the output stride") {
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 8, 8), 2);
  auto f0 = [](const Eigen::Vector2d& v) { return std::exp(-v.squaredNorm()); };
  StepConfig cfg;
  cfg.tau = 0.1;
  cfg.t_end = 1.1;
  RunCallbacks cb;
  cb.stride = 4;
  std::vector<long> seen;
  long per_step = 0;
  cb.on_output = [&](const StepRecord& r, const DGField&) { seen.push_back(r.step); };
  cb.on_step = [&](const StepRecord&, const StepStats&) { ++per_step; };
  const RunSummary s = run(f0, space, cfg, OuIdentityProvider{}, cb);
  CHECK(s.history.size() == 12);
  CHECK(seen == std::vector<long>{0, 4, 8, 11});
  CHECK(per_step == 11);
  CHECK(s.history.back().time == doctest::Approx(1.1));
  for (const StepRecord& r : s.history) CHECK(std::abs(r.mass - s.history.front().mass) <= 1e-11 * s.history.front().mass);
}

TEST_CASE("with the limiter every step is admissible and mass is kept") {
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 16, 16), 2);
  const MaxwellianBackgroundProvider prov(beam_params());
  auto f0 = [](const Eigen::Vector2d& v) { return maxwellian(v, 1.0, {7, 0}, 0.25, 1.0); };
  StepConfig cfg;
  cfg.tau = 5e-3;
  cfg.t_end = 0.25;
  cfg.eps_inv = 100;
  long limited = 0;
  RunCallbacks cb;
  cb.on_step = [&](const StepRecord&, const StepStats& st) { limited += st.limiter.stage1.applied; };
  const RunSummary s = run(f0, space, cfg, prov, cb);
  const double m0 = s.history.front().mass;
  for (const StepRecord& r : s.history) {
    CHECK(r.min_cell_average >= cfg.limiter.lower);
    CHECK(r.min_quadrature_value >= cfg.limiter.eps_zs - 1e-15);
    CHECK(std::abs(r.mass - m0) <= 1e-10 * m0);
  }
  CHECK(limited > 0);
}
