#include "fpdg/harness/diagnostics.hpp"

#include <charconv>
#include <cmath>

#include "fpdg/errors.hpp"

namespace fpdg::harness {

namespace {

template <typename Reduce>
void for_each_error(const DGSpace& space, const DGField& f, const ExactSolution& exact, double t, Reduce reduce) {
  const Mesh& mesh = space.mesh();
  const auto& rule = space.volume_rule();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::VectorXd fh = space.values_at_quadrature(f, c);
    for (int p = 0; p < rule.size(); ++p) {
      reduce(rule.weights(p), fh(p) - exact(t, mesh.map_to_physical(c, rule.points.col(p))));
    }
  }
}

}  // namespace

double l2h_error(const DGSpace& space, const DGField& f, const ExactSolution& exact, double t) {
  double sum = 0.0;
  for_each_error(space, f, exact, t, [&](double w, double e) { sum += w * e * e; });
  return std::sqrt(space.mesh().cell_area() * sum);
}

double linf_error(const DGSpace& space, const DGField& f, const ExactSolution& exact, double t) {
  double worst = 0.0;
  for_each_error(space, f, exact, t, [&](double, double e) { worst = std::max(worst, std::abs(e)); });
  return worst;
}

double convergence_rate(double err_coarse, double err_fine) {
  if (!(err_coarse > 0) || !(err_fine > 0)) {
    throw UndefinedRateError("convergence_rate: errors must be positive");
  }
  return std::log(err_coarse / err_fine) / std::log(2.0);
}

Eigen::Matrix2d covariance_moments(const DGSpace& space, const DGField& f) {
  const Mesh& mesh = space.mesh();
  const int k = space.degree();
  const TensorQuadrature<double> rule(gauss_rule<double>(std::max(k + 2, k + 1)));
  const BasisTable<double> table(space.basis(), rule.points);
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Zero();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::VectorXd fq = table.values * f.cell(c);
    for (int p = 0; p < rule.size(); ++p) {
      const Eigen::Vector2d v = mesh.map_to_physical(c, rule.points.col(p));
      sigma.noalias() += (rule.weights(p) * fq(p)) * (v * v.transpose());
    }
  }
  return mesh.cell_area() * sigma;
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

const char* DiagnosticsWriter::header() {
  return "step,time,mass,l2h_err,linf_err,sigma11,sigma22,min_cell_avg,min_quad_val,dr_iters";
}

DiagnosticsWriter::DiagnosticsWriter(const std::string& path) : out_(path) {
  if (!out_) throw ConfigurationError("cannot open '" + path + "' for writing");
  out_ << header() << '\n';
}

void DiagnosticsWriter::write(const DiagnosticsRecord& rec) {
  const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  out_ << rec.step << ',' << format_number(rec.time) << ',' << format_number(rec.mass) << ',' << opt(rec.l2h_err)
       << ',' << opt(rec.linf_err) << ',' << opt(rec.sigma11) << ',' << opt(rec.sigma22) << ','
       << format_number(rec.min_cell_avg) << ',' << format_number(rec.min_quad_val) << ','
       << (rec.dr_iters ? std::to_string(*rec.dr_iters) : std::string()) << '\n';
  out_.flush();
}

void write_grid_dump(const std::string& path, const DGSpace& space, const DGField& f, double t) {
  std::ofstream out(path);
  if (!out) throw ConfigurationError("cannot open '" + path + "' for writing");
  const Mesh& mesh = space.mesh();
  out << "# " << mesh.nx << ' ' << mesh.ny << ' ' << space.degree() << ' ' << format_number(t) << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Eigen::Vector2d x = mesh.cell_center(c);
    const Eigen::VectorXd q = space.values_at_quadrature(f, c);
    out << c << ' ' << format_number(x(0)) << ' ' << format_number(x(1)) << ' ' << format_number(f.cell_average(c))
        << ' ' << format_number(q.minCoeff()) << ' ' << format_number(q.maxCoeff()) << '\n';
  }
}

}  // namespace fpdg::harness
