#include "lenkf/matrixkit.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace lenkf {

CovMatrix::CovMatrix(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("CovMatrix: matrix must be square");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("CovMatrix: entries must be finite");
  }
  m_ = 0.5 * (m + m.transpose());
}

double operator_norm(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym,
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

MatrixNorms norms(const CovMatrix& a) {
  MatrixNorms out;
  out.op = operator_norm(a.mat());
  out.l1 = a.mat().cwiseAbs().rowwise().sum().maxCoeff();
  out.maxabs = a.mat().cwiseAbs().maxCoeff();
  return out;
}

LocalizationMask cutoff_mask(const CyclicDomain& dom, int l) {
  if (l < 0) throw std::invalid_argument("cutoff_mask: radius must be >= 0");
  LocalizationMask mask;
  mask.kind = LocalizationMask::Kind::cutoff;
  mask.radius = l;
  mask.entries.setZero(dom.size, dom.size);
  for (int i = 1; i <= dom.size; ++i) {
    for (int j = 1; j <= dom.size; ++j) {
      if (dom.distance(i, j) <= l) mask.entries(i - 1, j - 1) = 1.0;
    }
  }
  return mask;
}

double gaspari_cohn_phi(double x, double gc_scale, int l) {
  if (gc_scale <= 0.0) {
    throw std::invalid_argument("gaspari_cohn_phi: scale must be positive");
  }
  if (x > static_cast<double>(l)) return 0.0;
  const double t = x / gc_scale;
  return (1.0 + t) * std::exp(-t);
}

LocalizationMask gaspari_cohn_mask(const CyclicDomain& dom, double gc_scale,
                                   int l) {
  if (l < 0) {
    throw std::invalid_argument("gaspari_cohn_mask: radius must be >= 0");
  }
  LocalizationMask mask;
  mask.kind = LocalizationMask::Kind::gaspari_cohn;
  mask.radius = l;
  mask.gc_scale = gc_scale;
  mask.entries.resize(dom.size, dom.size);
  for (int i = 1; i <= dom.size; ++i) {
    for (int j = 1; j <= dom.size; ++j) {
      mask.entries(i - 1, j - 1) =
          gaspari_cohn_phi(dom.distance(i, j), gc_scale, l);
    }
  }
  return mask;
}

CovMatrix schur(const CovMatrix& a, const LocalizationMask& mask) {
  if (a.dim() != mask.entries.rows()) {
    throw std::invalid_argument("schur: dimension mismatch");
  }
  return CovMatrix(a.mat().cwiseProduct(mask.entries));
}

CovMatrix schur(const CovMatrix& a, const CovMatrix& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("schur: dimension mismatch");
  }
  return CovMatrix(a.mat().cwiseProduct(b.mat()));
}

double psd_floor(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double psd_floor(const CovMatrix& a) { return psd_floor(a.mat()); }

double psd_tolerance(const Eigen::MatrixXd& sym) {
  return 1e-10 * operator_norm(sym);
}

double domination_factor(const Eigen::MatrixXd& e, const Eigen::MatrixXd& c,
                         double rho) {
  if (e.rows() != c.rows()) {
    throw std::invalid_argument("domination_factor: dimension mismatch");
  }
  Eigen::MatrixXd s = c + rho * Eigen::MatrixXd::Identity(c.rows(), c.cols());
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw DegeneracyError("domination_factor: C + rho I not positive definite"
                          ", psd_floor = " +
                          std::to_string(psd_floor(s)));
  }
  // lambda_max(S^-1/2 E S^-1/2) equals lambda_max(L^-1 E L^-T).
  Eigen::MatrixXd whitened = llt.matrixL().solve(e);
  whitened = llt.matrixL().solve(whitened.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (whitened + whitened.transpose()), Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues()(es.eigenvalues().size() - 1);
  return top > 1.0 ? top : 1.0;
}

double domination_factor(const CovMatrix& e, const CovMatrix& c, double rho) {
  return domination_factor(e.mat(), c.mat(), rho);
}

double localization_status(const Eigen::MatrixXd& c, double lambda, int l,
                           const CyclicDomain& dom) {
  if (lambda <= 0.0 || lambda >= 1.0) {
    throw std::invalid_argument("localization_status: lambda must be in (0,1)");
  }
  if (l < 0) {
    throw std::invalid_argument("localization_status: l must be >= 0");
  }
  // Per-distance weights lambda^-(x ^ l); the scan is O(d^2).
  std::vector<double> weight(static_cast<size_t>(dom.size / 2) + 1);
  for (size_t x = 0; x < weight.size(); ++x) {
    const int capped = static_cast<int>(x) < l ? static_cast<int>(x) : l;
    weight[x] = std::pow(lambda, -capped);
  }
  double status = 0.0;
  for (int i = 1; i <= dom.size; ++i) {
    for (int j = 1; j <= dom.size; ++j) {
      const double v =
          std::abs(c(i - 1, j - 1)) * weight[dom.distance(i, j)];
      if (v > status) status = v;
    }
  }
  return status;
}

double localization_status(const CovMatrix& c, double lambda, int l,
                           const CyclicDomain& dom) {
  return localization_status(c.mat(), lambda, l, dom);
}

}  // namespace lenkf
