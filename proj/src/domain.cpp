#include "lenkf/domain.hpp"

#include <cmath>

namespace lenkf {

int bandwidth(const CyclicDomain& dom, const Eigen::MatrixXd& a, double tol) {
  if (a.rows() != dom.size || a.cols() != dom.size) {
    throw std::invalid_argument("bandwidth: matrix does not match domain size");
  }
  int width = 0;
  for (int i = 1; i <= dom.size; ++i) {
    for (int j = 1; j <= dom.size; ++j) {
      if (std::abs(a(i - 1, j - 1)) > tol) {
        const int dist = dom.distance(i, j);
        if (dist > width) width = dist;
      }
    }
  }
  return width;
}

}  // namespace lenkf
