#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "lenkf/domain.hpp"
#include "lenkf/matrixkit.hpp"
#include "lenkf/model.hpp"
#include "lenkf/rng.hpp"

namespace lenkf {

// ---------------------------------------------------------------------------
// Exact Kalman filter
// ---------------------------------------------------------------------------

struct KalmanState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct KalmanForecast {
  Eigen::VectorXd mean;  // A m + b
  Eigen::MatrixXd cov;   // A P A^T + eps Sigma
};

KalmanForecast kalman_forecast(const LinearSystem& sys, const KalmanState& st);

/// Analysis with gain G = P H^T (eps sigma_o^2 I + H P H^T)^-1 and the
/// Joseph-form posterior (I-GH) P (I-GH)^T + eps sigma_o^2 G G^T.
KalmanState kalman_analyze(const LinearSystem& sys, const KalmanForecast& fc,
                           const Eigen::VectorXd& y);

KalmanState kalman_step(const LinearSystem& sys, const KalmanState& st,
                        const Eigen::VectorXd& y);

// ---------------------------------------------------------------------------
// Ensemble filters
// ---------------------------------------------------------------------------

/// Posterior ensemble kept as mean and spreads (columns are the Delta X^(k)).
/// loc_radius >= 0 selects the domain-localized gain; loc_radius = -1 keeps
/// the plain EnKF global gain.
struct EnsembleState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd spreads;  // d x K
  double inflation = 1.0;   // r >= 1, applied as sqrt(r) on forecast spreads
  int loc_radius = -1;

  int members() const { return static_cast<int>(spreads.cols()); }
};

/// Kalman gain as a dense d x q block; column k acts on observation k.
/// radius records the localization window (-1 for a global gain).
struct FilterGain {
  Eigen::MatrixXd K;  // d x q
  int radius = -1;

  /// Materializes K H (d x d); diagnostics and tests only.
  Eigen::MatrixXd times_H(const LinearSystem& sys) const;
};

/// Domain-localized gain: row i is row i of
///   K^i = C^i H^T (eps sigma_o^2 I_q + H C^i H^T)^-1,  C^i = P_i C P_i,
/// where P_i projects onto the window {j : dist(i,j) <= l}. Rows solve
/// independent small systems and run in parallel. The patched K H has
/// bandwidth <= l, which is asserted on every call.
FilterGain local_gain(const Eigen::MatrixXd& chat, const LinearSystem& sys,
                      int l, const CyclicDomain& dom);

/// Plain EnKF gain C H^T (eps sigma_o^2 I_q + H C H^T)^-1.
FilterGain global_gain(const Eigen::MatrixXd& chat, const LinearSystem& sys);

/// Forecast covariance K^-1 sum_k Delta X^(k) (Delta X^(k))^T.
Eigen::MatrixXd ensemble_covariance(const Eigen::MatrixXd& spreads);

struct EnsembleForecast {
  Eigen::VectorXd mean;
  Eigen::MatrixXd spreads;
  Eigen::MatrixXd cov;  // Chat from the inflated forecast spreads
  FilterGain gain;
  double inflation = 1.0;
  int loc_radius = -1;
};

/// Members drawn i.i.d. N(0, I); mean and spreads derived from them.
EnsembleState make_initial_ensemble(const LinearSystem& sys, int ensemble_size,
                                    double inflation, int loc_radius,
                                    std::uint64_t seed);

// LEnKF: mean forecast carries no noise and no inflation; spreads forecast
// as sqrt(r) (A Delta X + xi^(k)); analysis updates mean and spreads
// separately and drops the ensemble-average noise terms.
EnsembleForecast lenkf_forecast(const LinearSystem& sys,
                                const EnsembleState& st, std::uint64_t seed,
                                int time_index);
EnsembleState lenkf_analyze(const LinearSystem& sys,
                            const EnsembleForecast& fc,
                            const Eigen::VectorXd& y, std::uint64_t seed,
                            int time_index);
EnsembleState lenkf_step(const LinearSystem& sys, const EnsembleState& st,
                         const Eigen::VectorXd& y, std::uint64_t seed,
                         int time_index);

// Standard EnKF with perturbed observations: members carry their own
// forecast noise (the noise average moves the mean), the gain is global,
// and each member is shifted by -K zeta^(k). Spread inflation mirrors the
// LEnKF placement so the gain is the only difference between the filters.
EnsembleForecast enkf_forecast(const LinearSystem& sys,
                               const EnsembleState& st, std::uint64_t seed,
                               int time_index);
EnsembleState enkf_analyze(const LinearSystem& sys, const EnsembleForecast& fc,
                           const Eigen::VectorXd& y, std::uint64_t seed,
                           int time_index);
EnsembleState enkf_step(const LinearSystem& sys, const EnsembleState& st,
                        const Eigen::VectorXd& y, std::uint64_t seed,
                        int time_index);

// ---------------------------------------------------------------------------
// Exact conditional error covariance
// ---------------------------------------------------------------------------

/// One step of E_S e e^T given the realized gain:
///   E' = A [(I-KH) E (I-KH)^T + eps sigma_o^2 K K^T] A^T + eps Sigma.
/// Pass gain = nullptr for a pure forecast step (no analysis happened).
Eigen::MatrixXd error_cov_step(const LinearSystem& sys,
                               const Eigen::MatrixXd& e,
                               const FilterGain* gain);

/// Smallest r >= 1 with E <= r (Chat o Dcut^L + rho I). Throws
/// DegeneracyError when the right side is not positive definite.
double domination_track(const Eigen::MatrixXd& e, const Eigen::MatrixXd& chat,
                        int L, double rho, const CyclicDomain& dom);

}  // namespace lenkf
