#pragma once

// Internal helper: root moduli of 1 + sign * sum_k c_k z^k.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bnpspec::detail {

/// Smallest |z| over roots of 1 + sign * sum_{k=1}^p c_k z^k; +inf when the
/// polynomial is constant.
inline double min_root_modulus(const std::vector<double>& c, double sign) {
  std::size_t p = c.size();
  while (p > 0 && c[p - 1] == 0.0) --p;
  if (p == 0) return std::numeric_limits<double>::infinity();
  // Monic in z: z^p + (a_{p-1}/a_p) z^{p-1} + ... + 1/a_p with a_k = sign*c_k, a_0 = 1.
  const double lead = sign * c[p - 1];
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t i = 1; i < p; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  for (std::size_t k = 0; k < p; ++k) {
    const double ak = (k == 0) ? 1.0 : sign * c[k - 1];
    comp(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p - 1)) = -ak / lead;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) m = std::min(m, std::abs(es.eigenvalues()(i)));
  return m;
}

}  // namespace bnpspec::detail
