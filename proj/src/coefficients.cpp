#include "fpdg/coefficients.hpp"

#include <cmath>
#include <numbers>

#include "fpdg/errors.hpp"

namespace fpdg {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

}  // namespace

void SpeciesParams::validate() const {
  if (!(n_b > 0 && m_b > 0 && m > 0 && T > 0 && eps_inv > 0)) {
    throw ConfigurationError("SpeciesParams: n_b, m_b, m, T and eps_inv must be positive");
  }
}

double SpeciesParams::thermal_speed() const { return std::sqrt(2.0 * T / m); }

double SpeciesParams::background_scale() const { return std::sqrt(m_b / (2.0 * T)); }

double maxwellian(const Eigen::Vector2d& v, double n, const Eigen::Vector2d& u, double T, double m) {
  const double vth2 = 2.0 * T / m;
  return n / (std::numbers::pi * vth2) * std::exp(-(m / (2.0 * T)) * (v - u).squaredNorm());
}

double rosenbluth_H(double vprime, const SpeciesParams& params) {
  const double s = params.background_scale();
  const double w = s * vprime;
  if (w < kRosenbluthSeriesThreshold) {
    const double w2 = w * w;
    return params.n_b * s / kSqrtPi * (2.0 - 2.0 * w2 / 3.0 + w2 * w2 / 5.0);
  }
  return params.n_b * std::erf(w) / vprime;
}

double rosenbluth_G(double vprime, const SpeciesParams& params) {
  const double s = params.background_scale();
  const double w = s * vprime;
  if (w < kRosenbluthSeriesThreshold) {
    const double w2 = w * w;
    return params.n_b / (s * kSqrtPi) * (2.0 + 2.0 * w2 / 3.0 - w2 * w2 / 15.0);
  }
  const double w2 = w * w;
  return params.n_b * vprime *
         ((1.0 + 1.0 / (2.0 * w2)) * std::erf(w) + std::exp(-w2) / (kSqrtPi * w));
}

Eigen::Matrix2d diffusion_tensor_maxwellian(const Eigen::Vector2d& v, const SpeciesParams& params) {
  const double n = params.n_b;
  const double s = params.background_scale();
  const Eigen::Vector2d vp = v - params.u;
  const double r2 = vp.squaredNorm();
  const double r = std::sqrt(r2);
  const double w = s * r;
  const double w2 = w * w;
  Eigen::Matrix2d D;

  if (w < kRosenbluthSeriesThreshold) {
    // D = n s [a(w) I + c(w) (s v')(s v')^T] with a, c even in w
    const double a = (4.0 / 3.0 - 4.0 * w2 / 15.0 + 2.0 * w2 * w2 / 35.0) / kSqrtPi;
    const double c = (-8.0 / 15.0 + 8.0 * w2 / 35.0) / kSqrtPi;
    D = n * s * (a * Eigen::Matrix2d::Identity() + c * s * s * vp * vp.transpose());
    return D;
  }

  const double r3 = r2 * r;
  const double r5 = r3 * r2;
  const double e = std::exp(-w2);
  const double erfw = std::erf(w);
  const double off = -n * vp(0) * vp(1) *
                     (3.0 * e / (w * r3 * kSqrtPi) + (1.0 - 3.0 / (2.0 * w2)) * erfw / r3);
  for (int i = 0; i < 2; ++i) {
    const double vi2 = vp(i) * vp(i);
    D(i, i) = n * (e * (r2 - 3.0 * vi2) / (r3 * w * kSqrtPi) +
                   ((3.0 * vi2 - r2) / (2.0 * w2 * r3) + (r2 * r2 - r2 * vi2) / r5) * erfw);
  }
  D(0, 1) = off;
  D(1, 0) = off;
  return D;
}

AnisotropicProvider::AnisotropicProvider(double sigma1, double sigma2) {
  if (!(sigma1 > 0 && sigma2 > 0)) throw ConfigurationError("anisotropic_provider: sigma1, sigma2 must be positive");
  sigma0_ << sigma1, 0.0, 0.0, sigma2;
  two_energy_ = sigma0_.trace();
  sigma_inf_ = (two_energy_ / 2.0) * Eigen::Matrix2d::Identity();
}

Eigen::Matrix2d AnisotropicProvider::covariance(double t) const {
  // written from Sigma(0) so that t = 0 returns it exactly
  return sigma0_ - (sigma_inf_ - sigma0_) * std::expm1(-8.0 * t);
}

Eigen::Matrix2d AnisotropicProvider::diffusion(double t, const Eigen::Vector2d& v) const {
  return (v.squaredNorm() + two_energy_) * Eigen::Matrix2d::Identity() - v * v.transpose() - covariance(t);
}

std::vector<SeparableTerm> AnisotropicProvider::separable_diffusion() const {
  const double two_e = two_energy_;
  const Eigen::Matrix2d sigma_inf = sigma_inf_;
  const Eigen::Matrix2d relax = sigma_inf_ - sigma0_;
  return {
      {[](double) { return 1.0; },
       [two_e, sigma_inf](const Eigen::Vector2d& v) -> Eigen::Matrix2d {
         return (v.squaredNorm() + two_e) * Eigen::Matrix2d::Identity() - v * v.transpose() - sigma_inf;
       }},
      {[](double t) { return std::exp(-8.0 * t); },
       [relax](const Eigen::Vector2d&) -> Eigen::Matrix2d { return relax; }},
  };
}

MaxwellianBackgroundProvider::MaxwellianBackgroundProvider(SpeciesParams params) : params_(std::move(params)) {
  params_.validate();
}

Eigen::Matrix2d MaxwellianBackgroundProvider::diffusion(double, const Eigen::Vector2d& v) const {
  return diffusion_tensor_maxwellian(v, params_);
}

Eigen::Vector2d MaxwellianBackgroundProvider::drift(double, const Eigen::Vector2d& v) const {
  return diffusion_tensor_maxwellian(v, params_) * (params_.u - v);
}

}  // namespace fpdg
