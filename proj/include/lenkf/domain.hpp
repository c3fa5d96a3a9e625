#pragma once

#include <stdexcept>

#include <Eigen/Core>

namespace lenkf {

/// Index set {1..d} on a ring with the cyclic distance
/// dist(i,j) = min(|i-j|, d-|i-j|). Site indices are 1-based at this
/// interface. Pure value type, safe for concurrent reads.
struct CyclicDomain {
  int size = 1;

  explicit CyclicDomain(int d) : size(d) {
    if (d < 1) throw std::invalid_argument("CyclicDomain: size must be >= 1");
  }

  int distance(int i, int j) const {
    if (i < 1 || i > size || j < 1 || j > size) {
      throw std::invalid_argument("CyclicDomain::distance: index out of range");
    }
    const int gap = i > j ? i - j : j - i;
    return gap < size - gap ? gap : size - gap;
  }

  /// Volume constant: max_i #{j : dist(i,j) <= l}.
  int volume_constant(int l) const {
    if (l < 0) throw std::invalid_argument("volume_constant: l must be >= 0");
    const long count = 2L * l + 1;
    return count < size ? static_cast<int>(count) : size;
  }

  /// Boundary volume constant: max_i #{j : |dist(i,j) - L| <= 2l}.
  int boundary_volume_constant(int L, int l) const {
    if (L < 0 || l < 0) {
      throw std::invalid_argument("boundary_volume_constant: radii must be >= 0");
    }
    int count = 0;
    for (int j = 1; j <= size; ++j) {
      const int gap = distance(1, j) - L;
      if (gap <= 2 * l && gap >= -2 * l) ++count;
    }
    return count;  // the count is the same for every i by symmetry
  }
};

/// Smallest x >= 0 with [A]_{i,j} = 0 whenever dist(i,j) > x. Entries with
/// |value| <= tol count as zero; the default is an exact-zero test.
int bandwidth(const CyclicDomain& dom, const Eigen::MatrixXd& a,
              double tol = 0.0);

}  // namespace lenkf
