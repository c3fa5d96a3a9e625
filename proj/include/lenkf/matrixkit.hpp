#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "lenkf/domain.hpp"

namespace lenkf {

/// Raised when a matrix that must be positive definite is not (singular
/// innovation, non-dominating regularization, ...).
struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense symmetric matrix with finite entries. Construction symmetrizes
/// through (C + C^T)/2 and rejects NaN/Inf.
class CovMatrix {
 public:
  CovMatrix() = default;
  explicit CovMatrix(Eigen::MatrixXd m);

  static CovMatrix Zero(int d) { return CovMatrix(Eigen::MatrixXd::Zero(d, d)); }
  static CovMatrix Identity(int d) {
    return CovMatrix(Eigen::MatrixXd::Identity(d, d));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }  // 0-based

 private:
  Eigen::MatrixXd m_;
};

struct MatrixNorms {
  double op = 0.0;      // l2 operator norm (symmetric eigen extremum)
  double l1 = 0.0;      // max absolute row sum
  double maxabs = 0.0;  // max absolute entry
};

MatrixNorms norms(const CovMatrix& a);

/// Operator norm of a symmetric matrix via eigen extremum.
double operator_norm(const Eigen::MatrixXd& sym);

struct LocalizationMask {
  enum class Kind { cutoff, gaspari_cohn };
  Kind kind = Kind::cutoff;
  int radius = 0;
  double gc_scale = 0.0;  // gaspari-cohn only
  Eigen::MatrixXd entries;
};

/// Cutoff mask: [D]_{i,j} = 1 iff dist(i,j) <= l.
LocalizationMask cutoff_mask(const CyclicDomain& dom, int l);

/// Gaspari-Cohn taper phi(x) = (1 + x/c) exp(-x/c) for x <= l, else 0.
double gaspari_cohn_phi(double x, double gc_scale, int l);
LocalizationMask gaspari_cohn_mask(const CyclicDomain& dom, double gc_scale,
                                   int l);

/// Entrywise (Schur) product.
CovMatrix schur(const CovMatrix& a, const LocalizationMask& mask);
CovMatrix schur(const CovMatrix& a, const CovMatrix& b);

/// Minimum eigenvalue; A is PSD within tolerance tau iff psd_floor(A) >= -tau.
double psd_floor(const CovMatrix& a);
double psd_floor(const Eigen::MatrixXd& sym);

/// Relative PSD tolerance: ensemble covariances are Gram matrices with
/// roundoff, so exact PSD tests are too strict.
double psd_tolerance(const Eigen::MatrixXd& sym);

/// Smallest r >= 1 with E <= r (C + rho I) in the Loewner order, computed as
/// max(1, lambda_max(S^-1/2 E S^-1/2)) with S = C + rho I. Throws
/// DegeneracyError naming psd_floor(S) when S is not positive definite.
double domination_factor(const CovMatrix& e, const CovMatrix& c, double rho);
double domination_factor(const Eigen::MatrixXd& e, const Eigen::MatrixXd& c,
                         double rho);

/// Localization status M_{.,l}(C) = max_{i,j} |[C]_{i,j}| lambda^-(dist(i,j) ^ l).
/// With l = L this is the minimal M such that C follows the
/// (M, lambda^(x ^ L), L) localized structure.
double localization_status(const CovMatrix& c, double lambda, int l,
                           const CyclicDomain& dom);
double localization_status(const Eigen::MatrixXd& c, double lambda, int l,
                           const CyclicDomain& dom);

}  // namespace lenkf
