#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "lenkf/domain.hpp"
#include "lenkf/filters.hpp"
#include "lenkf/model.hpp"

namespace lenkf {

/// Parameters feeding the closed-form theory objects. sigma_o_sq and
/// sigma_xi_sq are the effective (eps-scaled) noise variances.
struct TheoryParams {
  double M_A = 1.0;       // dynamics norm bound
  double m_Sigma = 0.0;   // lower noise covariance bound
  double M_Sigma = 0.0;   // upper noise covariance bound
  double lambda_A = 0.5;  // weak-interaction coefficient, in (0,1)
  double r = 1.1;         // inflation
  double sigma_o_sq = 1.0;
  double sigma_xi_sq = 0.1;
  double delta = 0.5;        // tolerance for the domination conditions
  double delta_star = 0.128; // tolerance for the localized-structure theorem
  double rho = 0.04;         // regularization
  double r_star = 1.05;      // domination threshold
  int L = 4;                 // analysis localization radius, L >= 4l
  int l = 1;                 // gain localization radius
  double c_abs = 1.0;        // absolute concentration constant (configurable)
};

/// Posterior Riccati map
///   R(C) = A (I-KH) C (I-KH)^T A^T + eps sigma_o^2 A K K^T A^T + eps Sigma.
Eigen::MatrixXd riccati_map(const LinearSystem& sys, const Eigen::MatrixXd& chat,
                            const FilterGain& gain);

/// Same map with C replaced by C o Dcut^L.
Eigen::MatrixXd riccati_localized(const LinearSystem& sys,
                                  const Eigen::MatrixXd& chat,
                                  const FilterGain& gain, int L,
                                  const CyclicDomain& dom);

/// Localization inconsistency Delta_loc = riccati_localized - riccati_map o D.
/// Requires bandwidth(A), bandwidth(Sigma) <= gain radius l and L >= 4l.
/// The result is asserted to vanish away from the localization boundary:
/// within |dist - L| <= 2l when bandwidth(chat) <= L - 2l, within
/// |dist - L| <= 4l in general.
Eigen::MatrixXd localization_inconsistency(const LinearSystem& sys,
                                           const Eigen::MatrixXd& chat,
                                           const FilterGain& gain, int L,
                                           const CyclicDomain& dom);

/// Scalar bound M M_A^2 (1 + sigma_o^-2 B_l M)^2 B_l^2 B_{L,l} Phi(L-2l).
double inconsistency_bound(double status, const TheoryParams& params,
                           double phi_at_boundary, const CyclicDomain& dom);

/// Smallest lambda in (0,1) with
///   max_i sum_k |[A]_{i,k}| lambda^-dist(i,k) <= lambda,
/// found by bisection on the (monotone) feasibility predicate; nullopt when
/// no lambda < 1 is feasible.
std::optional<double> weak_interaction_lambda(const Eigen::MatrixXd& a,
                                              const CyclicDomain& dom,
                                              double tol = 1e-6);

/// psi(M, delta) = (r+delta) max{ lam M (1+M/so2)^2 + lam M^2/so2,
///                                lam^2 M + sxi2 }.
double psi(double status, double delta, const TheoryParams& params);

/// Smallest M* >= (r + 2 delta*) sigma_xi^2 / (1 - lambda_A) with
/// psi(M*, delta*) <= M*; scan plus bisection, nullopt below the cap.
std::optional<double> find_psi_fixed_point(double delta_star,
                                           const TheoryParams& params,
                                           double cap = 1e6);

/// Gamma(x, d) = max{9 x^2, 24 x / c, 18 x^2 log(d) / c}.
double gamma_threshold(double x, double d, double c_abs);

/// n* = 2L + ceil(log(4/delta*) / log(1/lambda_A)).
int n_star(int L, double delta_star, double lambda_A);

/// Sample size of the localized-structure theorem:
///   max{ log(16 d^2 n* / delta*^2) / (c delta*^2 lambda_A^(2L)),
///        Gamma(2 r / delta*, d) }.
double formloc_sample_size(int L, double delta_star, double lambda_A, double r,
                           double d, double c_abs);

/// Back-solves c_abs so that formloc_sample_size hits a target K.
double calibrate_c_abs(int L, double delta_star, double lambda_A, double r,
                       double d, double target_k);

struct TrajectoryStats {
  std::vector<double> status_series;  // measured M_n along a run
  double c0_norm = 0.0;               // ||Chat_0||
  int sample_size = 0;                // ensemble size K
};

/// Structured pass/fail/measured report for the five domination conditions,
/// emitted as JSON for the CLI.
nlohmann::json theorem2_condition_report(const TheoryParams& params,
                                         const LinearSystem& sys,
                                         const TrajectoryStats& stats);

}  // namespace lenkf
