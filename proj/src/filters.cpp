#include "lenkf/filters.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>

namespace lenkf {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

// Member noise block: column k is xi^(k) ~ N(0, eps Sigma) drawn from the
// (purpose, time, member) substream, so the block is identical no matter
// how the members are scheduled.
Eigen::MatrixXd member_noise(const LinearSystem& sys, std::uint64_t seed,
                             StreamPurpose purpose, int time_index,
                             int members) {
  Eigen::MatrixXd block(sys.dim, members);
  const double scale = std::sqrt(sys.eps);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < members; ++k) {
    NoiseStream stream(seed, purpose, static_cast<std::uint64_t>(time_index),
                       static_cast<std::uint64_t>(k));
    block.col(k) = scale * (sys.sigma_factor * stream.gaussian_vector(sys.dim));
  }
  return block;
}

// Observation perturbation block: column k is zeta^(k) ~ N(0, eps sigma_o^2 I_q).
Eigen::MatrixXd perturbation_noise(const LinearSystem& sys, std::uint64_t seed,
                                   int time_index, int members) {
  Eigen::MatrixXd block(sys.q(), members);
  const double noise_std = std::sqrt(sys.obs_noise_var());
#pragma omp parallel for schedule(static)
  for (int k = 0; k < members; ++k) {
    NoiseStream stream(seed, StreamPurpose::sample_zeta,
                       static_cast<std::uint64_t>(time_index),
                       static_cast<std::uint64_t>(k));
    block.col(k) = noise_std * stream.gaussian_vector(sys.q());
  }
  return block;
}

}  // namespace

// ---------------------------------------------------------------------------
// Kalman filter
// ---------------------------------------------------------------------------

KalmanForecast kalman_forecast(const LinearSystem& sys, const KalmanState& st) {
  KalmanForecast fc;
  fc.mean = sys.A * st.mean + sys.b;
  fc.cov = symmetrized(sys.conjugate_dynamics(st.cov) + sys.eps * sys.Sigma);
  return fc;
}

KalmanState kalman_analyze(const LinearSystem& sys, const KalmanForecast& fc,
                           const Eigen::VectorXd& y) {
  if (sys.obs_noise_var() <= 0.0) {
    throw std::invalid_argument("kalman_analyze: needs eps sigma_o^2 > 0");
  }
  const int q = sys.q();
  const Eigen::MatrixXd pht = sys.select_cols(fc.cov);       // P H^T
  Eigen::MatrixXd s = sys.select_rows(pht);                  // H P H^T
  s += sys.obs_noise_var() * Eigen::MatrixXd::Identity(q, q);
  s = symmetrized(s);
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw DegeneracyError("kalman_analyze: innovation covariance not PD");
  }
  const Eigen::MatrixXd gain = llt.solve(pht.transpose()).transpose();

  KalmanState out;
  out.mean = fc.mean + gain * (y - sys.select(fc.mean));
  // Joseph form expanded in H-selected blocks; G S G^T keeps the update
  // symmetric up to the final symmetrization.
  Eigen::MatrixXd cov = fc.cov;
  cov.noalias() -= gain * pht.transpose();
  cov.noalias() -= pht * gain.transpose();
  cov.noalias() += gain * s * gain.transpose();
  out.cov = symmetrized(cov);
  return out;
}

KalmanState kalman_step(const LinearSystem& sys, const KalmanState& st,
                        const Eigen::VectorXd& y) {
  return kalman_analyze(sys, kalman_forecast(sys, st), y);
}

// ---------------------------------------------------------------------------
// Gains
// ---------------------------------------------------------------------------

Eigen::MatrixXd FilterGain::times_H(const LinearSystem& sys) const {
  Eigen::MatrixXd kh = Eigen::MatrixXd::Zero(K.rows(), K.rows());
  for (int k = 0; k < sys.q(); ++k) {
    kh.col(sys.sites[k] - 1) = K.col(k);
  }
  return kh;
}

FilterGain local_gain(const Eigen::MatrixXd& chat, const LinearSystem& sys,
                      int l, const CyclicDomain& dom) {
  if (sys.obs_noise_var() <= 0.0) {
    throw std::invalid_argument("local_gain: needs eps sigma_o^2 > 0");
  }
  if (l < 0) throw std::invalid_argument("local_gain: radius must be >= 0");
  const int d = sys.dim;
  const int q = sys.q();
  FilterGain out;
  out.K = Eigen::MatrixXd::Zero(d, q);
  out.radius = l;

#pragma omp parallel for schedule(static)
  for (int i = 1; i <= d; ++i) {
    // Observations inside the window of component i.
    std::vector<int> window;
    for (int k = 0; k < q; ++k) {
      if (dom.distance(i, sys.sites[k]) <= l) window.push_back(k);
    }
    if (window.empty()) continue;
    const int m = static_cast<int>(window.size());
    Eigen::MatrixXd s(m, m);
    Eigen::VectorXd rhs(m);
    for (int a = 0; a < m; ++a) {
      const int oa = sys.sites[window[a]] - 1;
      rhs[a] = chat(i - 1, oa);
      for (int c = 0; c < m; ++c) {
        s(a, c) = chat(oa, sys.sites[window[c]] - 1);
      }
      s(a, a) += sys.obs_noise_var();
    }
    const Eigen::VectorXd row = s.llt().solve(rhs);
    for (int a = 0; a < m; ++a) {
      out.K(i - 1, window[a]) = row[a];
    }
  }

  // Patched K H must have bandwidth <= l.
  for (int i = 1; i <= d; ++i) {
    for (int k = 0; k < q; ++k) {
      if (out.K(i - 1, k) != 0.0 && dom.distance(i, sys.sites[k]) > l) {
        throw std::logic_error("local_gain: K H bandwidth exceeds l");
      }
    }
  }
  return out;
}

FilterGain global_gain(const Eigen::MatrixXd& chat, const LinearSystem& sys) {
  if (sys.obs_noise_var() <= 0.0) {
    throw std::invalid_argument("global_gain: needs eps sigma_o^2 > 0");
  }
  const int q = sys.q();
  const Eigen::MatrixXd cht = sys.select_cols(chat);
  Eigen::MatrixXd s = sys.select_rows(cht);
  s += sys.obs_noise_var() * Eigen::MatrixXd::Identity(q, q);
  s = symmetrized(s);
  FilterGain out;
  out.radius = -1;
  if (!s.allFinite()) {
    // Divergence in flight: keep propagating, the caller records it.
    out.K = Eigen::MatrixXd::Constant(sys.dim, q,
                                      std::numeric_limits<double>::quiet_NaN());
    return out;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw DegeneracyError("global_gain: innovation covariance not invertible");
  }
  out.K = llt.solve(cht.transpose()).transpose();
  return out;
}

Eigen::MatrixXd ensemble_covariance(const Eigen::MatrixXd& spreads) {
  const int d = static_cast<int>(spreads.rows());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  cov.selfadjointView<Eigen::Lower>().rankUpdate(
      spreads, 1.0 / static_cast<double>(spreads.cols()));
  return cov.selfadjointView<Eigen::Lower>();
}

// ---------------------------------------------------------------------------
// Ensemble filters
// ---------------------------------------------------------------------------

EnsembleState make_initial_ensemble(const LinearSystem& sys, int ensemble_size,
                                    double inflation, int loc_radius,
                                    std::uint64_t seed) {
  if (ensemble_size < 2) {
    throw std::invalid_argument("make_initial_ensemble: need K >= 2");
  }
  if (inflation < 1.0) {
    throw std::invalid_argument("make_initial_ensemble: need r >= 1");
  }
  Eigen::MatrixXd members(sys.dim, ensemble_size);
  for (int k = 0; k < ensemble_size; ++k) {
    NoiseStream stream(seed, StreamPurpose::ensemble_init, 0,
                       static_cast<std::uint64_t>(k));
    members.col(k) = stream.gaussian_vector(sys.dim);
  }
  EnsembleState st;
  st.mean = members.rowwise().mean();
  st.spreads = members.colwise() - st.mean;
  st.inflation = inflation;
  st.loc_radius = loc_radius;
  return st;
}

EnsembleForecast lenkf_forecast(const LinearSystem& sys,
                                const EnsembleState& st, std::uint64_t seed,
                                int time_index) {
  EnsembleForecast fc;
  fc.mean = sys.A * st.mean + sys.b;
  const Eigen::MatrixXd noise = member_noise(
      sys, seed, StreamPurpose::sample_xi, time_index, st.members());
  fc.spreads =
      std::sqrt(st.inflation) * (sys.apply_dynamics(st.spreads) + noise);
  fc.cov = ensemble_covariance(fc.spreads);
  fc.gain = local_gain(fc.cov, sys, st.loc_radius, CyclicDomain(sys.dim));
  fc.inflation = st.inflation;
  fc.loc_radius = st.loc_radius;
  return fc;
}

EnsembleState lenkf_analyze(const LinearSystem& sys, const EnsembleForecast& fc,
                            const Eigen::VectorXd& y, std::uint64_t seed,
                            int time_index) {
  EnsembleState out;
  out.inflation = fc.inflation;
  out.loc_radius = fc.loc_radius;
  out.mean = fc.mean + fc.gain.K * (y - sys.select(fc.mean));
  const Eigen::MatrixXd zeta =
      perturbation_noise(sys, seed, time_index, fc.spreads.cols());
  out.spreads = fc.spreads + fc.gain.K * (zeta - sys.select_rows(fc.spreads));
  return out;
}

EnsembleState lenkf_step(const LinearSystem& sys, const EnsembleState& st,
                         const Eigen::VectorXd& y, std::uint64_t seed,
                         int time_index) {
  if (st.members() < 2) throw std::invalid_argument("lenkf_step: need K >= 2");
  if (st.inflation < 1.0) throw std::invalid_argument("lenkf_step: need r >= 1");
  return lenkf_analyze(sys, lenkf_forecast(sys, st, seed, time_index), y,
                       seed, time_index);
}

EnsembleForecast enkf_forecast(const LinearSystem& sys,
                               const EnsembleState& st, std::uint64_t seed,
                               int time_index) {
  EnsembleForecast fc;
  const Eigen::MatrixXd noise = member_noise(
      sys, seed, StreamPurpose::sample_xi, time_index, st.members());
  const Eigen::VectorXd noise_mean = noise.rowwise().mean();
  fc.mean = sys.A * st.mean + sys.b + noise_mean;
  fc.spreads = std::sqrt(st.inflation) *
               ((sys.apply_dynamics(st.spreads) + noise).colwise() - noise_mean);
  fc.cov = ensemble_covariance(fc.spreads);
  fc.gain = global_gain(fc.cov, sys);
  fc.inflation = st.inflation;
  fc.loc_radius = st.loc_radius;
  return fc;
}

EnsembleState enkf_analyze(const LinearSystem& sys, const EnsembleForecast& fc,
                           const Eigen::VectorXd& y, std::uint64_t seed,
                           int time_index) {
  EnsembleState out;
  out.inflation = fc.inflation;
  out.loc_radius = fc.loc_radius;
  const Eigen::MatrixXd zeta =
      perturbation_noise(sys, seed, time_index, fc.spreads.cols());
  const Eigen::VectorXd zeta_mean = zeta.rowwise().mean();
  out.mean = fc.mean + fc.gain.K * (y - sys.select(fc.mean) - zeta_mean);
  out.spreads = fc.spreads - fc.gain.K * (sys.select_rows(fc.spreads) +
                                          (zeta.colwise() - zeta_mean));
  return out;
}

EnsembleState enkf_step(const LinearSystem& sys, const EnsembleState& st,
                        const Eigen::VectorXd& y, std::uint64_t seed,
                        int time_index) {
  if (st.members() < 2) throw std::invalid_argument("enkf_step: need K >= 2");
  return enkf_analyze(sys, enkf_forecast(sys, st, seed, time_index), y, seed,
                      time_index);
}

// ---------------------------------------------------------------------------
// Error covariance tracking
// ---------------------------------------------------------------------------

Eigen::MatrixXd error_cov_step(const LinearSystem& sys,
                               const Eigen::MatrixXd& e,
                               const FilterGain* gain) {
  Eigen::MatrixXd inner = e;
  if (gain != nullptr) {
    const Eigen::MatrixXd he = sys.select_rows(e);          // H E
    const Eigen::MatrixXd heh = sys.select_cols(he);        // H E H^T
    inner.noalias() -= gain->K * he;
    inner.noalias() -= he.transpose() * gain->K.transpose();
    inner.noalias() += gain->K * heh * gain->K.transpose();
    inner.noalias() +=
        sys.obs_noise_var() * gain->K * gain->K.transpose();
  }
  return symmetrized(sys.conjugate_dynamics(symmetrized(inner)) +
                     sys.eps * sys.Sigma);
}

double domination_track(const Eigen::MatrixXd& e, const Eigen::MatrixXd& chat,
                        int L, double rho, const CyclicDomain& dom) {
  Eigen::MatrixXd masked = chat;
  for (int i = 1; i <= dom.size; ++i) {
    for (int j = 1; j <= dom.size; ++j) {
      if (dom.distance(i, j) > L) masked(i - 1, j - 1) = 0.0;
    }
  }
  return domination_factor(e, masked, rho);
}

}  // namespace lenkf
