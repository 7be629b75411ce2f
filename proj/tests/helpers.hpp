#pragma once

#include <random>

#include "osgap/types.hpp"

namespace testing {

inline osgap::Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  osgap::Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = osgap::Complex(re, im);
    }
  return m;
}

inline osgap::Vector random_unit_vector(std::mt19937_64& rng, Eigen::Index n) {
  osgap::Vector v = random_matrix(rng, n, 1).col(0);
  return v / v.norm();
}

/// Haar-distributed unitary via QR with phase correction.
inline osgap::Matrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<osgap::Matrix> qr(random_matrix(rng, n, n));
  osgap::Matrix q = qr.householderQ();
  const osgap::Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

/// Largest singular value by a plain SVD, independent of osgap::op_norm.
inline double svd_norm(const osgap::Matrix& m) {
  Eigen::JacobiSVD<osgap::Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace testing
