#include <cmath>
#include <random>

#include "doctest.h"
#include "fpdg/basis.hpp"
#include "fpdg/dg_space.hpp"
#include "fpdg/mesh.hpp"
#include "fpdg/quadrature.hpp"

using namespace fpdg;

TEST_CASE("build_mesh on the velocity box") {
  const Mesh mesh = build_mesh({-10, -10}, {10, 10}, 128, 128);
  CHECK(mesh.num_cells() == 16384);
  CHECK(mesh.h == doctest::Approx(20.0 / 128).epsilon(1e-15));
  CHECK(mesh.interior_faces.size() == 2u * 127u * 128u);
  CHECK(mesh.boundary_faces.size() == 4u * 128u);
  CHECK(mesh.num_cells() * mesh.cell_area() == doctest::Approx(400.0).epsilon(1e-14));
  for (const Face& f : mesh.interior_faces) {
    REQUIRE(f.minus < f.plus);
    CHECK(f.normal.norm() == doctest::Approx(1.0));
    // normal points from the minus cell into the plus cell
    const Eigen::Vector2d d = mesh.cell_center(f.plus) - mesh.cell_center(f.minus);
    CHECK(d.dot(f.normal) == doctest::Approx(mesh.h));
  }
  for (const Face& f : mesh.boundary_faces) {
    CHECK(f.is_boundary());
    const Eigen::Vector2d out = f.center - mesh.cell_center(f.minus);
    CHECK(out.dot(f.normal) == doctest::Approx(0.5 * mesh.h));
  }
}

TEST_CASE("single-cell mesh") {
  const Mesh mesh = build_mesh({0, 0}, {1, 1}, 1, 1);
  CHECK(mesh.num_cells() == 1);
  CHECK(mesh.interior_faces.empty());
  CHECK(mesh.boundary_faces.size() == 4);
}

TEST_CASE("mesh rejects bad input") {
  CHECK_THROWS_AS(build_mesh({0, 0}, {1, 1}, 2, 1), ConfigurationError);
  CHECK_THROWS_AS(build_mesh({0, 0}, {1, 1}, 0, 1), ConfigurationError);
  CHECK_THROWS_AS(build_mesh({1, 0}, {0, 1}, 1, 1), ConfigurationError);
}

TEST_CASE("every interior face joins two distinct cells that are grid neighbours") {
  const Mesh mesh = build_mesh({0, 0}, {3, 2}, 6, 4);
  std::vector<int> degree(mesh.num_cells(), 0);
  for (const Face& f : mesh.interior_faces) {
    ++degree[f.minus];
    ++degree[f.plus];
    const bool horizontal = f.plus == f.minus + 1 && f.minus % mesh.nx != mesh.nx - 1;
    const bool vertical = f.plus == f.minus + mesh.nx;
    CHECK((horizontal || vertical));
  }
  for (const Face& f : mesh.boundary_faces) ++degree[f.minus];
  for (int d : degree) CHECK(d == 4);
}

TEST_CASE("gauss rules") {
  SUBCASE("q = 1 is the midpoint rule") {
    const auto r = gauss_rule(1);
    CHECK(r.nodes(0) == 0.0);
    CHECK(r.weights(0) == 1.0);
  }
  SUBCASE("q = 2") {
    const auto r = gauss_rule(2);
    CHECK(r.nodes(0) == doctest::Approx(-1.0 / (2.0 * std::sqrt(3.0))).epsilon(1e-15));
    CHECK(r.nodes(1) == doctest::Approx(1.0 / (2.0 * std::sqrt(3.0))).epsilon(1e-15));
    CHECK(r.weights(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.weights(1) == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("q = 3 integrates x^4 exactly") {
    const auto r = gauss_rule(3);
    double s = 0;
    for (int i = 0; i < 3; ++i) s += r.weights(i) * std::pow(r.nodes(i), 4);
    CHECK(std::abs(s - 1.0 / 80.0) < 1e-16);
  }
  SUBCASE("exactness degree 2q - 1 and unit weight sum") {
    for (int q = 1; q <= 10; ++q) {
      const auto r = gauss_rule(q);
      CHECK(r.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
      for (int p = 0; p <= 2 * q - 1; ++p) {
        double s = 0;
        for (int i = 0; i < q; ++i) s += r.weights(i) * std::pow(r.nodes(i), p);
        // int_{-1/2}^{1/2} x^p dx
        const double exact = p % 2 ? 0.0 : std::pow(0.5, p) / (p + 1);
        CHECK(std::abs(s - exact) < 1e-15);
      }
    }
  }
  CHECK_THROWS(gauss_rule(0));
}

TEST_CASE("legendre basis dimensions and first modes") {
  const LegendreBasis<> b1(1);
  CHECK(b1.size() == 3);
  const Eigen::Vector2d xi(0.3, -0.2);
  CHECK(b1.values(xi)(0) == 1.0);
  CHECK(b1.values(xi)(1) == doctest::Approx(2.0 * std::sqrt(3.0) * 0.3).epsilon(1e-15));
  CHECK(LegendreBasis<>(2).size() == 6);
  for (int k = 0; k <= 6; ++k) CHECK(LegendreBasis<>(k).size() == (k + 1) * (k + 2) / 2);
}

TEST_CASE("basis ordering is graded by total degree then x-degree") {
  const LegendreBasis<> b(3);
  int last_total = 0;
  int last_px = 1 << 20;
  for (int j = 0; j < b.size(); ++j) {
    const auto [px, py] = b.exponents(j);
    const int total = px + py;
    CHECK(total >= last_total);
    if (total == last_total && j > 0) CHECK(px < last_px);
    last_total = total;
    last_px = px;
  }
}

TEST_CASE("orthonormality at quadrature order k + 1") {
  for (int k = 1; k <= 5; ++k) {
    const LegendreBasis<> basis(k);
    const TensorQuadrature<> rule(gauss_rule(k + 1));
    const BasisTable<> table(basis, rule.points);
    const Eigen::MatrixXd gram = table.values.transpose() * rule.weights.asDiagonal() * table.values;
    CHECK((gram - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("physical mass matrix is |E| times identity") {
  const DGSpace space(build_mesh({-10, -10}, {10, 10}, 8, 8), 3);
  const auto& rule = space.volume_rule();
  const auto& table = space.volume_table();
  const double area = space.mesh().cell_area();
  // every cell shares the reference table; |E| enters through the Jacobian
  const Eigen::MatrixXd m = area * table.values.transpose() * rule.weights.asDiagonal() * table.values;
  CHECK((m - area * Eigen::MatrixXd::Identity(space.modes(), space.modes())).cwiseAbs().maxCoeff() < 1e-13 * area);
}

TEST_CASE("reference gradients map by 1/h") {
  const Mesh mesh = build_mesh({-10, -10}, {10, 10}, 16, 16);
  const LegendreBasis<> basis(3);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ref(-0.45, 0.45);
  std::uniform_int_distribution<int> cells(0, mesh.num_cells() - 1);
  const double step = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    const int c = cells(rng);
    const Eigen::Vector2d xi(ref(rng), ref(rng));
    const Eigen::Vector2d x = mesh.map_to_physical(c, xi);
    const Eigen::Matrix2Xd grad = basis.gradients(xi) / mesh.h;
    for (int d = 0; d < 2; ++d) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e(d) = step;
      const Eigen::VectorXd fd = (basis.values(mesh.map_to_reference(c, x + e)) -
                                  basis.values(mesh.map_to_reference(c, x - e))) /
                                 (2 * step);
      CHECK((fd - grad.row(d).transpose()).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("reference and physical maps are inverse") {
  const Mesh mesh = build_mesh({-1, 2}, {3, 6}, 4, 4);
  const Eigen::Vector2d xi(0.1, -0.4);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    CHECK((mesh.map_to_reference(c, mesh.map_to_physical(c, xi)) - xi).norm() < 1e-14);
  }
}

TEST_CASE("low-degree products integrate to orthonormality on face rules") {
  // products of two modes of degree <= k are degree <= 2k, exact on k + 1 points
  const int k = 3;
  const DGSpace space(build_mesh({0, 0}, {1, 1}, 1, 1), k);
  const auto& line = space.line_rule();
  for (int s = 0; s < 4; ++s) {
    const BasisTable<>& t = space.side_table(static_cast<Side>(s));
    const Eigen::MatrixXd g = t.values.transpose() * line.weights.asDiagonal() * t.values;
    // check against a high-order reference on the same side
    const auto fine = gauss_rule(12);
    Eigen::Matrix2Xd pts(2, fine.order());
    const Eigen::Vector2d n = s == 0 ? Eigen::Vector2d(-1, 0)
                              : s == 1 ? Eigen::Vector2d(1, 0)
                              : s == 2 ? Eigen::Vector2d(0, -1)
                                       : Eigen::Vector2d(0, 1);
    const Eigen::Vector2d axis(std::abs(n(1)), std::abs(n(0)));
    for (int i = 0; i < fine.order(); ++i) pts.col(i) = 0.5 * n + fine.nodes(i) * axis;
    const BasisTable<> tf(space.basis(), pts);
    const Eigen::MatrixXd gf = tf.values.transpose() * fine.weights.asDiagonal() * tf.values;
    CHECK((g - gf).cwiseAbs().maxCoeff() < 1e-13);
  }
}
