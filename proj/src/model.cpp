#include "lenkf/model.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lenkf {

Eigen::VectorXd LinearSystem::select(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(q());
  for (int k = 0; k < q(); ++k) y[k] = x[sites[k] - 1];
  return y;
}

Eigen::MatrixXd LinearSystem::select_rows(const Eigen::MatrixXd& m) const {
  Eigen::MatrixXd out(q(), m.cols());
  for (int k = 0; k < q(); ++k) out.row(k) = m.row(sites[k] - 1);
  return out;
}

Eigen::MatrixXd LinearSystem::select_cols(const Eigen::MatrixXd& m) const {
  Eigen::MatrixXd out(m.rows(), q());
  for (int k = 0; k < q(); ++k) out.col(k) = m.col(sites[k] - 1);
  return out;
}

Eigen::MatrixXd LinearSystem::apply_dynamics(const Eigen::MatrixXd& m) const {
  // Dense fallback for wide bandwidth; banded row kernel otherwise. Each
  // output row is computed independently in a fixed inner order, so the
  // result does not depend on the thread count.
  if (a_bandwidth * 4 >= dim) return A * m;
  Eigen::MatrixXd out(dim, m.cols());
  const int w = a_bandwidth;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < dim; ++i) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(m.cols());
    for (int off = -w; off <= w; ++off) {
      const int j = (i + off + dim) % dim;
      const double aij = A(i, j);
      if (aij != 0.0) acc.noalias() += aij * m.row(j);
    }
    out.row(i) = acc;
  }
  return out;
}

Eigen::MatrixXd LinearSystem::conjugate_dynamics(const Eigen::MatrixXd& m) const {
  const Eigen::MatrixXd am = apply_dynamics(m);
  return apply_dynamics(am.transpose()).transpose();
}

void LinearSystem::finalize() {
  if (dim < 1) throw std::invalid_argument("LinearSystem: dim must be >= 1");
  if (A.rows() != dim || A.cols() != dim || Sigma.rows() != dim ||
      Sigma.cols() != dim || b.size() != dim) {
    throw std::invalid_argument("LinearSystem: inconsistent dimensions");
  }
  if (sites.empty() || static_cast<int>(sites.size()) >= dim) {
    throw std::invalid_argument("LinearSystem: need 1 <= q < dim sites");
  }
  for (size_t k = 0; k < sites.size(); ++k) {
    if (sites[k] < 1 || sites[k] > dim ||
        (k + 1 < sites.size() && sites[k + 1] <= sites[k])) {
      throw std::invalid_argument(
          "LinearSystem: sites must be strictly increasing in [1, dim]");
    }
  }
  if (sigma_o_sq < 0.0) {
    // sigma_o^2 = 0 is allowed as a test mode; the filters reject it.
    throw std::invalid_argument("LinearSystem: sigma_o^2 must be >= 0");
  }
  if (eps <= 0.0) {
    throw std::invalid_argument("LinearSystem: eps must be positive");
  }
  a_bandwidth = bandwidth(CyclicDomain(dim), A);
  Eigen::LLT<Eigen::MatrixXd> llt(Sigma +
                                  1e-14 * Eigen::MatrixXd::Identity(dim, dim));
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("LinearSystem: Sigma must be PSD");
  }
  sigma_factor = llt.matrixL();
}

StencilCoefficients stencil_coefficients(const TurbulenceRegime& reg) {
  StencilCoefficients c;
  const double diffusion = reg.mu * reg.dt / (reg.h * reg.h);
  const double advection = reg.c_adv * reg.dt / (2.0 * reg.h);
  c.lower = diffusion - advection;
  c.center = 1.0 - 2.0 * diffusion - reg.nu * reg.dt;
  c.upper = diffusion + advection;
  return c;
}

TurbulenceRegime regime_preset(const std::string& name, int dim) {
  TurbulenceRegime reg;
  reg.dim = dim;
  if (name == "regime1") {
    reg.h = 1.0;
    reg.nu = 5.0;
    reg.c_adv = 0.1;
    reg.mu = 0.1;
  } else if (name == "regime2") {
    reg.h = 0.2;
    reg.nu = 0.1;
    reg.c_adv = 2.0;
    reg.mu = 0.1;
  } else {
    throw std::invalid_argument("unknown regime preset: " + name);
  }
  return reg;
}

LinearSystem build_turbulence(const TurbulenceRegime& reg) {
  if (reg.dim < 3) {
    throw std::invalid_argument("build_turbulence: dim must be >= 3");
  }
  if (reg.h <= 0.0 || reg.dt <= 0.0) {
    throw std::invalid_argument("build_turbulence: h and dt must be positive");
  }
  if (reg.p < 1) {
    throw std::invalid_argument("build_turbulence: p must be >= 1");
  }
  const StencilCoefficients c = stencil_coefficients(reg);
  LinearSystem sys;
  sys.dim = reg.dim;
  sys.A.setZero(reg.dim, reg.dim);
  for (int i = 0; i < reg.dim; ++i) {
    sys.A(i, (i - 1 + reg.dim) % reg.dim) += c.lower;
    sys.A(i, i) += c.center;
    sys.A(i, (i + 1) % reg.dim) += c.upper;
  }
  sys.b = Eigen::VectorXd::Zero(reg.dim);
  sys.Sigma = reg.sigma_x * reg.sigma_x * reg.dt *
              Eigen::MatrixXd::Identity(reg.dim, reg.dim);
  for (int site = 1; site <= reg.dim; site += reg.p) sys.sites.push_back(site);
  if (static_cast<int>(sys.sites.size()) >= reg.dim) sys.sites.pop_back();
  sys.sigma_o_sq = reg.sigma_o * reg.sigma_o;
  sys.finalize();
  return sys;
}

Eigen::VectorXd step_signal(const LinearSystem& sys, const Eigen::VectorXd& x,
                            NoiseStream& rng) {
  Eigen::VectorXd next = sys.A * x + sys.b;
  next.noalias() +=
      std::sqrt(sys.eps) * (sys.sigma_factor * rng.gaussian_vector(sys.dim));
  return next;
}

Eigen::VectorXd observe(const LinearSystem& sys, const Eigen::VectorXd& x,
                        NoiseStream& rng) {
  Eigen::VectorXd y = sys.select(x);
  const double noise_std = std::sqrt(sys.obs_noise_var());
  for (int k = 0; k < sys.q(); ++k) y[k] += noise_std * rng.gaussian();
  return y;
}

bool sparse_observation_check(const LinearSystem& sys, int l,
                              const CyclicDomain& dom) {
  for (size_t a = 0; a < sys.sites.size(); ++a) {
    for (size_t b = a + 1; b < sys.sites.size(); ++b) {
      if (dom.distance(sys.sites[a], sys.sites[b]) <= 2 * l) return false;
    }
  }
  return true;
}

}  // namespace lenkf
