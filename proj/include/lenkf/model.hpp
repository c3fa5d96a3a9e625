#pragma once

#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "lenkf/domain.hpp"
#include "lenkf/rng.hpp"

namespace lenkf {

/// Linear signal-observation system
///   X_{n+1} = A X_n + b + xi_n,      xi ~ N(0, eps * Sigma)
///   Y_{n+1} = H X_{n+1} + zeta_n,    zeta ~ N(0, eps * sigma_o^2 I_q)
/// with H selecting the observed components: observation k reads site
/// sites[k]. H is never materialized; observing is component selection.
struct LinearSystem {
  int dim = 0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd Sigma;
  std::vector<int> sites;  // 1-based, strictly increasing, q < dim
  double sigma_o_sq = 1.0;
  double eps = 1.0;  // noise scale, multiplies Sigma and sigma_o^2

  int q() const { return static_cast<int>(sites.size()); }
  double obs_noise_var() const { return eps * sigma_o_sq; }

  /// Applies H: picks the observed components of x.
  Eigen::VectorXd select(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m) const;  // H M
  Eigen::MatrixXd select_cols(const Eigen::MatrixXd& m) const;  // M H^T

  /// A M and A M A^T. When A is banded the products skip the zero
  /// entries and parallelize over rows; a dense path covers the rest.
  Eigen::MatrixXd apply_dynamics(const Eigen::MatrixXd& m) const;
  Eigen::MatrixXd conjugate_dynamics(const Eigen::MatrixXd& m) const;

  void finalize();  // validates, caches bandwidth and the noise factor

  int a_bandwidth = 0;
  Eigen::MatrixXd sigma_factor;  // lower Cholesky factor of Sigma
};

/// Discretized stochastically forced dissipative advection model on a ring:
///   X_{n+1,i} = a_- X_{n,i-1} + a_0 X_{n,i} + a_+ X_{n,i+1} + sigma_x sqrt(dt) W_{n+1,i}
/// with cyclic indices and one observation every p components.
struct TurbulenceRegime {
  double h = 1.0;        // grid size
  double dt = 0.1;       // time step
  int p = 5;             // observation spacing
  double nu = 5.0;       // damping
  double c_adv = 0.1;    // advection speed
  double mu = 0.1;       // diffusion
  double sigma_x = 1.0;  // forcing amplitude
  double sigma_o = 1.0;  // observation noise std
  int dim = 100;
};

struct StencilCoefficients {
  double lower = 0.0;   // a_-
  double center = 0.0;  // a_0
  double upper = 0.0;   // a_+
};

StencilCoefficients stencil_coefficients(const TurbulenceRegime& reg);

/// Named presets: "regime1" (strong uniform damping, weak advection) and
/// "regime2" (strong advection, weak damping).
TurbulenceRegime regime_preset(const std::string& name, int dim);

LinearSystem build_turbulence(const TurbulenceRegime& reg);

Eigen::VectorXd step_signal(const LinearSystem& sys, const Eigen::VectorXd& x,
                            NoiseStream& rng);

Eigen::VectorXd observe(const LinearSystem& sys, const Eigen::VectorXd& x,
                        NoiseStream& rng);

/// True iff all distinct observation sites satisfy dist(o_i, o_j) > 2l.
bool sparse_observation_check(const LinearSystem& sys, int l,
                              const CyclicDomain& dom);

}  // namespace lenkf
