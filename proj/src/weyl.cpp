#include "osgap/weyl.hpp"

#include <cmath>
#include <numbers>

namespace osgap {

namespace {

long long mod(long long a, int n) {
  long long r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

Complex unit_root(int n, long long m) {
  const long long r = mod(m, n);
  // exact values on the axes keep n = 1, 2, 4 free of rounding noise
  if (4 * r % n == 0) {
    static constexpr Complex kAxis[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return kAxis[4 * r / n];
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / n);
}

WeylFamily::WeylFamily(int n) : n_(n) {
  if (n < 1) throw DomainError("weyl family: dimension must be positive");
  phases_.resize(static_cast<size_t>(n));
  for (int m = 0; m < n; ++m) phases_[static_cast<size_t>(m)] = unit_root(n, m);

  clock_ = Matrix::Zero(n, n);
  shift_ = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    clock_(j, j) = phases_[static_cast<size_t>(j)];
    shift_((j + 1) % n, j) = 1.0;
  }

  // T_{k,l} e_j = clock^k e_{j+l} = w^{k(j+l)} e_{j+l}
  weyl_.reserve(static_cast<size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      Matrix t = Matrix::Zero(n, n);
      for (int j = 0; j < n; ++j) {
        int i = (j + l) % n;
        t(i, j) = phase(static_cast<long long>(k) * i);
      }
      weyl_.push_back(std::move(t));
    }
  }
}

Complex WeylFamily::phase(long long m) const { return phases_[static_cast<size_t>(mod(m, n_))]; }

int WeylFamily::label(long long k, long long l) const {
  return static_cast<int>(mod(k, n_) * n_ + mod(l, n_));
}

const Matrix& WeylFamily::weyl(long long k, long long l) const {
  return weyl_[static_cast<size_t>(label(k, l))];
}

WeylFamily make_weyl_family(int n) { return WeylFamily(n); }

Matrix BellBasis::gram() const {
  const auto m = static_cast<Eigen::Index>(vectors.size());
  Matrix g(m, m);
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = 0; q < m; ++q)
      g(p, q) = vectors[static_cast<size_t>(p)].dot(vectors[static_cast<size_t>(q)]);
  return g;
}

BellBasis bell_basis(const WeylFamily& family) {
  const int n = family.dim();
  BellBasis basis;
  basis.n = n;
  basis.phi = Vector::Zero(n * n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) basis.phi(j * n + j) = s;

  basis.vectors.reserve(static_cast<size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      // ((T (x) I) phi)[i*n + j] = s * T(i, j)
      const Matrix& t = family.weyl(k, l);
      Vector v(n * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v(i * n + j) = s * t(i, j);
      basis.vectors.push_back(std::move(v));
    }
  }
  return basis;
}

double teleportation_residual(const WeylFamily& family, const Vector& h) {
  const int n = family.dim();
  if (h.size() != n) throw DomainError("teleportation residual: vector length must equal n");

  const Eigen::Index n3 = static_cast<Eigen::Index>(n) * n * n;
  Vector lhs = Vector::Zero(n3);
  for (int p = 0; p < n; ++p)
    for (int i = 0; i < n; ++i) lhs((p * n + i) * n + i) = h(p);

  const BellBasis basis = bell_basis(family);
  Vector rhs = Vector::Zero(n3);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      Vector th = family.weyl(k, l).adjoint() * h;
      const Vector& eta = basis.at(k, l);
      for (Eigen::Index u = 0; u < eta.size(); ++u) {
        if (eta(u) == Complex(0.0)) continue;
        rhs.segment(u * n, n) += s * eta(u) * th;
      }
    }
  }
  return (lhs - rhs).norm();
}

Matrix unnormalized_max_entangled(int n) {
  Matrix phi = Matrix::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) phi(i * n + i, j * n + j) = 1.0;
  return phi;
}

double rank_one_frame_residual(const WeylFamily& family, const Matrix& rho) {
  const int n = family.dim();
  if (rho.rows() != n || rho.cols() != n)
    throw DomainError("frame residual: rho must be n x n");

  const Matrix lhs = kron(rho, unnormalized_max_entangled(n));

  // Block (p, q) of the right side, for p, q indexing C^{n^2}, is
  //   (1/n) (sum_{kl} eta_kl[p] T_kl^dag) rho (sum_{k'l'} conj(eta_k'l'[q]) T_k'l').
  const BellBasis basis = bell_basis(family);
  const int n2 = n * n;
  std::vector<Matrix> left(static_cast<size_t>(n2), Matrix::Zero(n, n));
  std::vector<Matrix> right(static_cast<size_t>(n2), Matrix::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      const Matrix& t = family.weyl(k, l);
      const Vector& eta = basis.at(k, l);
      for (int p = 0; p < n2; ++p) {
        if (eta(p) == Complex(0.0)) continue;
        left[static_cast<size_t>(p)] += eta(p) * t.adjoint();
        right[static_cast<size_t>(p)] += std::conj(eta(p)) * t;
      }
    }
  }

  double sq = 0.0;
  for (int p = 0; p < n2; ++p) {
    Matrix lr = left[static_cast<size_t>(p)] * rho / static_cast<double>(n);
    for (int q = 0; q < n2; ++q) {
      Matrix block = lr * right[static_cast<size_t>(q)];
      sq += (lhs.block(p * n, q * n, n, n) - block).squaredNorm();
    }
  }
  return std::sqrt(sq);
}

}  // namespace osgap
