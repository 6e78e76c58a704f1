#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace fpdg {

/// Background/test species description for the linearized collision model.
struct SpeciesParams {
  double n_b = 1.0;   // background density
  double m_b = 1.0;   // background mass
  double m = 1.0;     // test-particle mass
  double T = 1.0;     // temperature
  Eigen::Vector2d u = Eigen::Vector2d::Zero();  // background bulk velocity
  double eps_inv = 1.0;  // inverse collision time

  /// Throws ConfigurationError unless every scalar is strictly positive.
  void validate() const;
  double thermal_speed() const;
  /// sqrt(m_b / 2T); w_b = v' * background_scale().
  double background_scale() const;
};

/// Below this value of w_b the closed-form Rosenbluth expressions are replaced
/// by their Taylor expansions.
inline constexpr double kRosenbluthSeriesThreshold = 1e-3;

/// d = 2 Maxwellian with density n, drift u, temperature T and mass m.
double maxwellian(const Eigen::Vector2d& v, double n, const Eigen::Vector2d& u, double T, double m);

double rosenbluth_H(double vprime, const SpeciesParams& params);
double rosenbluth_G(double vprime, const SpeciesParams& params);

/// Cartesian diffusion tensor d_i d_j G of a Maxwellian background, evaluated
/// in the v_z = 0 plane.
Eigen::Matrix2d diffusion_tensor_maxwellian(const Eigen::Vector2d& v, const SpeciesParams& params);

/// Time-factor times spatial matrix; a provider may offer its diffusion
/// tensor as a finite sum of these so operators can be assembled once.
struct SeparableTerm {
  std::function<double(double)> time_factor;
  std::function<Eigen::Matrix2d(const Eigen::Vector2d&)> spatial;
};

/// Transport coefficients of  f_t = eps^-1 div(D grad f) - eps^-1 s div(b f),
/// with s = advection_scale().
class CoefficientProvider {
 public:
  virtual ~CoefficientProvider() = default;

  virtual Eigen::Matrix2d diffusion(double t, const Eigen::Vector2d& v) const = 0;
  virtual Eigen::Vector2d drift(double t, const Eigen::Vector2d& v) const = 0;
  virtual double advection_scale() const { return 1.0; }

  virtual bool diffusion_is_stationary() const { return true; }
  virtual bool drift_is_stationary() const { return true; }

  /// Empty unless diffusion(t, v) == sum_k time_factor_k(t) * spatial_k(v).
  virtual std::vector<SeparableTerm> separable_diffusion() const { return {}; }
};

/// D = I, b = -v.
class OuIdentityProvider final : public CoefficientProvider {
 public:
  Eigen::Matrix2d diffusion(double, const Eigen::Vector2d&) const override { return Eigen::Matrix2d::Identity(); }
  Eigen::Vector2d drift(double, const Eigen::Vector2d& v) const override { return -v; }
};

/// D_ij = delta_ij (|v|^2 + 2E) - v_i v_j - Sigma_ij(t), b = -(d-1) v, where the
/// covariance relaxes exponentially from diag(sigma1, sigma2) to (2E/d) I.
class AnisotropicProvider final : public CoefficientProvider {
 public:
  AnisotropicProvider(double sigma1, double sigma2);

  Eigen::Matrix2d covariance(double t) const;
  Eigen::Matrix2d initial_covariance() const { return sigma0_; }
  Eigen::Matrix2d equilibrium_covariance() const { return sigma_inf_; }
  double two_energy() const { return two_energy_; }

  Eigen::Matrix2d diffusion(double t, const Eigen::Vector2d& v) const override;
  Eigen::Vector2d drift(double, const Eigen::Vector2d& v) const override { return -v; }
  bool diffusion_is_stationary() const override { return false; }
  std::vector<SeparableTerm> separable_diffusion() const override;

 private:
  Eigen::Matrix2d sigma0_;
  Eigen::Matrix2d sigma_inf_;
  double two_energy_;
};

/// D = D^M_b(v) of a Maxwellian background, b = D (u - v), scale m/T.
class MaxwellianBackgroundProvider final : public CoefficientProvider {
 public:
  explicit MaxwellianBackgroundProvider(SpeciesParams params);

  const SpeciesParams& params() const { return params_; }
  Eigen::Matrix2d diffusion(double, const Eigen::Vector2d& v) const override;
  Eigen::Vector2d drift(double, const Eigen::Vector2d& v) const override;
  double advection_scale() const override { return params_.m / params_.T; }

 private:
  SpeciesParams params_;
};

inline OuIdentityProvider ou_identity_provider() { return {}; }
inline AnisotropicProvider anisotropic_provider(double sigma1, double sigma2) { return {sigma1, sigma2}; }

}  // namespace fpdg
