#include "fpdg/dg_operators.hpp"

#include <algorithm>
#include <cmath>

namespace fpdg {

BlockPattern::BlockPattern(const DGSpace& space) {
  const int n = space.num_cells();
  columns_.assign(n, {});
  for (int i = 0; i < n; ++i) columns_[i].push_back(i);
  for (const Face& f : space.mesh().interior_faces) {
    columns_[f.minus].push_back(f.plus);
    columns_[f.plus].push_back(f.minus);
  }
  offsets_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& c = columns_[i];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    offsets_[i + 1] = offsets_[i] + static_cast<int>(c.size());
  }
}

int BlockPattern::block_index(int row_cell, int col_cell) const {
  const auto& c = columns_[row_cell];
  const auto it = std::lower_bound(c.begin(), c.end(), col_cell);
  if (it == c.end() || *it != col_cell) throw ContractViolation("BlockPattern: cells are not adjacent");
  return offsets_[row_cell] + static_cast<int>(it - c.begin());
}

BlockPattern::Builder::Builder(const BlockPattern& pattern, int modes)
    : pattern_(&pattern), modes_(modes), blocks_(pattern.offsets_.back(), Eigen::MatrixXd::Zero(modes, modes)) {}

void BlockPattern::Builder::add(int row_cell, int col_cell, const Eigen::MatrixXd& block) {
  blocks_[pattern_->block_index(row_cell, col_cell)] += block;
}

Eigen::Ref<Eigen::MatrixXd> BlockPattern::Builder::block(int row_cell, int col_cell) {
  return blocks_[pattern_->block_index(row_cell, col_cell)];
}

SparseOperator BlockPattern::Builder::build() const {
  const int n = static_cast<int>(pattern_->columns_.size());
  const Eigen::Index dofs = static_cast<Eigen::Index>(n) * modes_;
  SparseOperator op(dofs, dofs);
  Eigen::VectorXi per_row(dofs);
  for (int i = 0; i < n; ++i) {
    per_row.segment(static_cast<Eigen::Index>(i) * modes_, modes_).setConstant(
        static_cast<int>(pattern_->columns_[i].size()) * modes_);
  }
  op.reserve(per_row);
  for (int i = 0; i < n; ++i) {
    const auto& cols = pattern_->columns_[i];
    for (int j = 0; j < modes_; ++j) {
      const Eigen::Index row = static_cast<Eigen::Index>(i) * modes_ + j;
      for (size_t b = 0; b < cols.size(); ++b) {
        const Eigen::MatrixXd& blk = blocks_[pattern_->offsets_[i] + b];
        for (int l = 0; l < modes_; ++l) {
          op.insert(row, static_cast<Eigen::Index>(cols[b]) * modes_ + l) = blk(j, l);
        }
      }
    }
  }
  op.makeCompressed();
  return op;
}

SparseOperator assemble_mass(const DGSpace& space) {
  SparseOperator m(space.num_dofs(), space.num_dofs());
  m.reserve(Eigen::VectorXi::Ones(space.num_dofs()));
  for (Eigen::Index i = 0; i < space.num_dofs(); ++i) m.insert(i, i) = space.mesh().cell_area();
  m.makeCompressed();
  return m;
}

SparseOperator assemble_nipg(const DGSpace& space, const DiffusionField& diffusion, double sigma) {
  if (!(sigma > 0)) throw ConfigurationError("assemble_nipg: sigma must be positive");
  const Mesh& mesh = space.mesh();
  const int nb = space.modes();
  const double h = mesh.h;
  const BlockPattern pattern(space);
  BlockPattern::Builder builder(pattern, nb);

  // Volume: int_E (D grad phi_l) . grad phi_j; the 1/h^2 of the gradients
  // cancels |E| = h^2.
  const auto& rule = space.volume_rule();
  const auto& vt = space.volume_table();
  Eigen::MatrixXd local(nb, nb);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    local.setZero();
    for (int p = 0; p < rule.size(); ++p) {
      const Eigen::Matrix2d D = diffusion(mesh.map_to_physical(c, rule.points.col(p)));
      const Eigen::Matrix2Xd& g = vt.gradients[p];
      local.noalias() += rule.weights(p) * (g.transpose() * (D * g));
    }
    builder.add(c, c, local);
  }

  // Interior faces: -{D grad f . n}[chi] + {D grad chi . n}[f] + sigma/h [f][chi].
  const auto& line = space.line_rule();
  Eigen::MatrixXd ll(nb, nb), lr(nb, nb), rl(nb, nb), rr(nb, nb);
  for (const Face& face : mesh.interior_faces) {
    const Eigen::Vector2d& n = face.normal;
    const BasisTable<double>& tl = space.side_table(side_from_normal(n));
    const BasisTable<double>& tr = space.side_table(side_from_normal(-n));
    ll.setZero();
    lr.setZero();
    rl.setZero();
    rr.setZero();
    for (int q = 0; q < line.order(); ++q) {
      const Eigen::Matrix2d D = diffusion(space.face_point(face, q));
      const double wq = h * line.weights(q);
      const Eigen::VectorXd phi_l = tl.values.row(q).transpose();
      const Eigen::VectorXd phi_r = tr.values.row(q).transpose();
      const Eigen::VectorXd flux_l = (tl.gradients[q].transpose() * (D * n)) / h;
      const Eigen::VectorXd flux_r = (tr.gradients[q].transpose() * (D * n)) / h;
      const double pen = sigma / h;
      // entry(test j, trial l); jump sign +1 on the minus side, -1 on the plus side
      ll.noalias() += wq * (-0.5 * phi_l * flux_l.transpose() + 0.5 * flux_l * phi_l.transpose() +
                            pen * phi_l * phi_l.transpose());
      lr.noalias() += wq * (-0.5 * phi_l * flux_r.transpose() - 0.5 * flux_l * phi_r.transpose() -
                            pen * phi_l * phi_r.transpose());
      rl.noalias() += wq * (0.5 * phi_r * flux_l.transpose() + 0.5 * flux_r * phi_l.transpose() -
                            pen * phi_r * phi_l.transpose());
      rr.noalias() += wq * (0.5 * phi_r * flux_r.transpose() - 0.5 * flux_r * phi_r.transpose() +
                            pen * phi_r * phi_r.transpose());
    }
    builder.add(face.minus, face.minus, ll);
    builder.add(face.minus, face.plus, lr);
    builder.add(face.plus, face.minus, rl);
    builder.add(face.plus, face.plus, rr);
  }
  return builder.build();
}

SparseOperator assemble_nipg(const DGSpace& space, const CoefficientProvider& provider, double t, double sigma) {
  return assemble_nipg(space, [&](const Eigen::Vector2d& v) { return provider.diffusion(t, v); }, sigma);
}

double face_dissipation_speed(const DGSpace& space, const CoefficientProvider& provider, double t, const Face& face) {
  double alpha = 0.0;
  for (int q = 0; q < space.line_rule().order(); ++q) {
    alpha = std::max(alpha, std::abs(provider.drift(t, space.face_point(face, q)).dot(face.normal)));
  }
  return alpha;
}

Eigen::VectorXd apply_convection(const DGSpace& space, const CoefficientProvider& provider, double t,
                                 const DGField& f) {
  const Mesh& mesh = space.mesh();
  const int nb = space.modes();
  const double h = mesh.h;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(space.num_dofs());

  const auto& rule = space.volume_rule();
  const auto& vt = space.volume_table();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::VectorXd fq = vt.values * f.cell(c);
    auto rc = r.segment(static_cast<Eigen::Index>(c) * nb, nb);
    for (int p = 0; p < rule.size(); ++p) {
      const Eigen::Vector2d b = provider.drift(t, mesh.map_to_physical(c, rule.points.col(p)));
      // |E| * (1/h) grad-hat = h grad-hat
      rc.noalias() += (h * rule.weights(p) * fq(p)) * (vt.gradients[p].transpose() * b);
    }
  }

  const auto& line = space.line_rule();
  for (const Face& face : mesh.interior_faces) {
    const Eigen::Vector2d& n = face.normal;
    const BasisTable<double>& tl = space.side_table(side_from_normal(n));
    const BasisTable<double>& tr = space.side_table(side_from_normal(-n));
    const double alpha = face_dissipation_speed(space, provider, t, face);
    const Eigen::VectorXd fl = tl.values * f.cell(face.minus);
    const Eigen::VectorXd fr = tr.values * f.cell(face.plus);
    auto rl = r.segment(static_cast<Eigen::Index>(face.minus) * nb, nb);
    auto rr = r.segment(static_cast<Eigen::Index>(face.plus) * nb, nb);
    for (int q = 0; q < line.order(); ++q) {
      const double bn = provider.drift(t, space.face_point(face, q)).dot(n);
      // numerical flux through the face in the direction of n
      const double flux = 0.5 * bn * (fl(q) + fr(q)) + 0.5 * alpha * (fl(q) - fr(q));
      const double wq = h * line.weights(q);
      rl.noalias() -= (wq * flux) * tl.values.row(q).transpose();
      rr.noalias() += (wq * flux) * tr.values.row(q).transpose();
    }
  }
  return r;
}

SparseOperator assemble_convection(const DGSpace& space, const CoefficientProvider& provider, double t) {
  const Mesh& mesh = space.mesh();
  const int nb = space.modes();
  const double h = mesh.h;
  const BlockPattern pattern(space);
  BlockPattern::Builder builder(pattern, nb);

  const auto& rule = space.volume_rule();
  const auto& vt = space.volume_table();
  Eigen::MatrixXd local(nb, nb);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    local.setZero();
    for (int p = 0; p < rule.size(); ++p) {
      const Eigen::Vector2d b = provider.drift(t, mesh.map_to_physical(c, rule.points.col(p)));
      local.noalias() += (h * rule.weights(p)) * (vt.gradients[p].transpose() * b) * vt.values.row(p);
    }
    builder.add(c, c, local);
  }

  const auto& line = space.line_rule();
  Eigen::MatrixXd ll(nb, nb), lr(nb, nb), rl(nb, nb), rr(nb, nb);
  for (const Face& face : mesh.interior_faces) {
    const Eigen::Vector2d& n = face.normal;
    const BasisTable<double>& tl = space.side_table(side_from_normal(n));
    const BasisTable<double>& tr = space.side_table(side_from_normal(-n));
    const double alpha = face_dissipation_speed(space, provider, t, face);
    ll.setZero();
    lr.setZero();
    rl.setZero();
    rr.setZero();
    for (int q = 0; q < line.order(); ++q) {
      const double bn = provider.drift(t, space.face_point(face, q)).dot(n);
      const double wq = h * line.weights(q);
      const double cl = wq * 0.5 * (bn + alpha);
      const double cr = wq * 0.5 * (bn - alpha);
      const auto phi_l = tl.values.row(q);
      const auto phi_r = tr.values.row(q);
      ll.noalias() -= cl * phi_l.transpose() * phi_l;
      lr.noalias() -= cr * phi_l.transpose() * phi_r;
      rl.noalias() += cl * phi_r.transpose() * phi_l;
      rr.noalias() += cr * phi_r.transpose() * phi_r;
    }
    builder.add(face.minus, face.minus, ll);
    builder.add(face.minus, face.plus, lr);
    builder.add(face.plus, face.minus, rl);
    builder.add(face.plus, face.plus, rr);
  }
  return builder.build();
}

}  // namespace fpdg
