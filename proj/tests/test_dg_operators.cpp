#include <cmath>
#include <random>

#include "doctest.h"
#include "fpdg/coefficients.hpp"
#include "fpdg/dg_operators.hpp"
#include "fpdg/dg_space.hpp"

using namespace fpdg;

namespace {

class ConstantDrift final : public CoefficientProvider {
 public:
  explicit ConstantDrift(Eigen::Vector2d b) : b_(std::move(b)) {}
  Eigen::Matrix2d diffusion(double, const Eigen::Vector2d&) const override { return Eigen::Matrix2d::Identity(); }
  Eigen::Vector2d drift(double, const Eigen::Vector2d&) const override { return b_; }

 private:
  Eigen::Vector2d b_;
};

// Global constant function 1 in modal coefficients.
Eigen::VectorXd constant_vector(const DGSpace& space) {
  DGField one = space.zero_field();
  for (int c = 0; c < space.num_cells(); ++c) one.cell_average(c) = 1.0;
  return one.coeffs;
}

DGField random_field(const DGSpace& space, std::mt19937& rng) {
  std::normal_distribution<double> g;
  DGField f = space.zero_field();
  for (Eigen::Index i = 0; i < f.coeffs.size(); ++i) f.coeffs(i) = g(rng);
  return f;
}

SpeciesParams rfp_species() {
  SpeciesParams p;
  p.m_b = 2000;
  p.m = 10;
  p.u = {2.5, 0};
  return p;
}

double max_abs(const SparseOperator& a) {
  double m = 0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseOperator::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

}  // namespace

TEST_CASE("mass matrix") {
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 128, 128), 2);
  const SparseOperator m = assemble_mass(space);
  const double area = std::pow(20.0 / 128, 2);
  CHECK(m.nonZeros() == space.num_dofs());
  for (Eigen::Index i = 0; i < space.num_dofs(); i += 997) CHECK(m.coeff(i, i) == doctest::Approx(area).epsilon(1e-14));
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(space.num_dofs());
  CHECK(((m * ones) - area * ones).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("NIPG annihilates constants from both sides") {
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 12, 12), 2);
  const MaxwellianBackgroundProvider prov(rfp_species());
  const SparseOperator k = assemble_nipg(space, prov, 0.0, 1.0);
  const Eigen::VectorXd one = constant_vector(space);
  const double scale = max_abs(k);
  CHECK((k.transpose() * one).cwiseAbs().maxCoeff() <= 1e-12 * scale * std::sqrt(space.num_dofs()));
  CHECK((k * one).cwiseAbs().maxCoeff() <= 1e-12 * scale * std::sqrt(space.num_dofs()));
}

TEST_CASE("NIPG energy of a linear function") {
  for (int n : {1, 3, 8}) {
    for (int k : {1, 2, 3}) {
      const DGSpace space(build_mesh({0, 0}, {1, 1}, n, n), k);
      const SparseOperator K = assemble_nipg(
          space, [](const Eigen::Vector2d&) -> Eigen::Matrix2d { return Eigen::Matrix2d::Identity(); }, 1.0);
      DGField f = space.zero_field();
      const double h = space.mesh().h;
      for (int c = 0; c < space.num_cells(); ++c) {
        // x = x_c + h * xi and xi = phi_1 / (2 sqrt 3)
        f.cell(c)(0) = space.mesh().cell_center(c)(0);
        f.cell(c)(1) = h / (2.0 * std::sqrt(3.0));
      }
      CHECK(f.coeffs.dot(K * f.coeffs) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("NIPG coercivity on random fields") {
  std::mt19937 rng(1);
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 10, 10), 2);
  const MaxwellianBackgroundProvider maxw(rfp_species());
  const AnisotropicProvider aniso(1.8, 0.2);
  const SparseOperator k1 = assemble_nipg(space, maxw, 0.0, 1.0);
  const SparseOperator k2 = assemble_nipg(space, aniso, 0.5, 0.1);
  for (int trial = 0; trial < 100; ++trial) {
    const DGField f = random_field(space, rng);
    CHECK(f.coeffs.dot(k1 * f.coeffs) >= 0.0);
    CHECK(f.coeffs.dot(k2 * f.coeffs) >= 0.0);
  }
}

TEST_CASE("NIPG couples only face neighbours") {
  const DGSpace space(build_mesh({0, 0}, {1, 1}, 5, 5), 2);
  const SparseOperator k = assemble_nipg(space, OuIdentityProvider{}, 0.0, 1.0);
  const int nb = space.modes();
  const int nx = space.mesh().nx;
  for (int r = 0; r < k.outerSize(); ++r) {
    for (SparseOperator::InnerIterator it(k, r); it; ++it) {
      const int a = static_cast<int>(it.row()) / nb;
      const int b = static_cast<int>(it.col()) / nb;
      const int dx = std::abs(a % nx - b % nx);
      const int dy = std::abs(a / nx - b / nx);
      CHECK(dx + dy <= 1);
    }
  }
}

TEST_CASE("NIPG is independent of stored face orientation") {
  const Mesh mesh = build_mesh({-10, -10}, {10, 10}, 6, 6);
  Mesh flipped = mesh;
  for (Face& f : flipped.interior_faces) {
    std::swap(f.minus, f.plus);
    f.normal = -f.normal;
  }
  const DGSpace a(mesh, 2);
  const DGSpace b(flipped, 2);
  const MaxwellianBackgroundProvider prov(rfp_species());
  const SparseOperator ka = assemble_nipg(a, prov, 0.0, 1.0);
  const SparseOperator kb = assemble_nipg(b, prov, 0.0, 1.0);
  const SparseOperator diff = ka - kb;
  CHECK(max_abs(diff) <= 1e-14 * max_abs(ka));
}

TEST_CASE("convection conserves mass") {
  std::mt19937 rng(2);
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 10, 10), 2);
  const MaxwellianBackgroundProvider prov(rfp_species());
  const Eigen::VectorXd one = constant_vector(space);
  for (int trial = 0; trial < 10; ++trial) {
    const DGField f = random_field(space, rng);
    const Eigen::VectorXd r = apply_convection(space, prov, 0.0, f);
    CHECK(std::abs(one.dot(r)) <= 1e-12 * std::max(1.0, r.cwiseAbs().sum()));
  }
}

TEST_CASE("zero drift gives zero convection") {
  std::mt19937 rng(4);
  const DGSpace space(build_mesh({0, 0}, {1, 1}, 4, 4), 3);
  const ConstantDrift prov({0, 0});
  const Eigen::VectorXd r = apply_convection(space, prov, 0.0, random_field(space, rng));
  CHECK(r.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single cell with constant data") {
  const DGSpace space(build_mesh({0, 0}, {1, 1}, 1, 1), 2);
  const ConstantDrift prov({0.6, -1.3});
  DGField f = space.zero_field();
  f.cell_average(0) = 2.5;
  const Eigen::VectorXd r = apply_convection(space, prov, 0.0, f);
  CHECK(std::abs(r(0)) < 1e-15);
  // int_E c b . grad chi for chi = phi_1 = 2 sqrt(3) xi: grad = (2 sqrt 3, 0) / h
  CHECK(r(1) == doctest::Approx(2.5 * 0.6 * 2.0 * std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("assembled convection matches the quadrature form") {
  std::mt19937 rng(9);
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 7, 7), 2);
  const MaxwellianBackgroundProvider prov(rfp_species());
  const SparseOperator c = assemble_convection(space, prov, 0.0);
  for (int trial = 0; trial < 5; ++trial) {
    const DGField f = random_field(space, rng);
    const Eigen::VectorXd r1 = apply_convection(space, prov, 0.0, f);
    const Eigen::VectorXd r2 = c * f.coeffs;
    CHECK((r1 - r2).cwiseAbs().maxCoeff() <= 1e-12 * r1.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("diffusion plus convection keep the total mass") {
  std::mt19937 rng(6);
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 8, 8), 3);
  const AnisotropicProvider prov(1.8, 0.2);
  const SparseOperator k = assemble_nipg(space, prov, 0.2, 1.0);
  const Eigen::VectorXd one = constant_vector(space);
  const DGField f = random_field(space, rng);
  const Eigen::VectorXd total = -(k * f.coeffs) + apply_convection(space, prov, 0.2, f);
  CHECK(std::abs(one.dot(total)) <= 1e-12 * total.cwiseAbs().sum());
}

TEST_CASE("face dissipation speed is the max normal drift over the face points") {
  const DGSpace space(build_mesh({-2, -2}, {2, 2}, 4, 4), 2);
  const OuIdentityProvider prov;
  for (const Face& face : space.mesh().interior_faces) {
    double expect = 0;
    for (int q = 0; q < space.line_rule().order(); ++q) {
      expect = std::max(expect, std::abs(face.normal.dot(space.face_point(face, q))));
    }
    CHECK(face_dissipation_speed(space, prov, 0.0, face) == expect);
  }
}
