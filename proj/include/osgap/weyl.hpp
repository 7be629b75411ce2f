#pragma once

#include <vector>

#include "osgap/types.hpp"

namespace osgap {

/// exp(2 pi i m / n) with m reduced modulo n first; exact on the axes.
Complex unit_root(int n, long long m);

/// Clock and shift unitaries in dimension n and the n^2 Weyl operators
/// T_{k,l} = clock^k * shift^l.
///
/// Naming follows the diagonal/cyclic role rather than the letters X/Z:
///   clock(e_j) = w^j e_j        (w = exp(2 pi i / n))
///   shift(e_j) = e_{j+1 mod n}
/// so that clock * shift = w * shift * clock.
class WeylFamily {
 public:
  explicit WeylFamily(int n);

  int dim() const { return n_; }
  Complex omega() const { return phases_[n_ > 1 ? 1 : 0]; }

  /// w^m with m reduced modulo n before evaluation.
  Complex phase(long long m) const;

  const Matrix& clock() const { return clock_; }
  const Matrix& shift() const { return shift_; }

  /// T_{k,l}; both indices are reduced modulo n.
  const Matrix& weyl(long long k, long long l) const;

  /// Flat label k*n + l of a reduced pair.
  int label(long long k, long long l) const;

 private:
  int n_;
  std::vector<Complex> phases_;
  Matrix clock_;
  Matrix shift_;
  std::vector<Matrix> weyl_;
};

WeylFamily make_weyl_family(int n);

/// Maximally entangled vector phi = n^{-1/2} sum_j e_j (x) e_j and the
/// generalized Bell vectors eta_{k,l} = (T_{k,l} (x) I) phi in C^{n^2}.
/// Tensor index convention: (e_i (x) e_j) has coordinate i*n + j.
struct BellBasis {
  int n = 0;
  Vector phi;
  std::vector<Vector> vectors;  // indexed by k*n + l

  const Vector& at(int k, int l) const { return vectors.at(static_cast<size_t>(k * n + l)); }
  /// n^2 x n^2 Gram matrix <eta_p, eta_q>.
  Matrix gram() const;
};

BellBasis bell_basis(const WeylFamily& family);

/// Euclidean norm of  h (x) sum_i e_i (x) e_i  -  n^{-1/2} sum_{k,l} eta_{k,l} (x) T_{k,l}^dag h.
double teleportation_residual(const WeylFamily& family, const Vector& h);

/// Frobenius norm of  rho (x) Phi  -  (1/n) sum H_{k,l}^{k',l'} (x) T_{k,l}^dag rho T_{k',l'}
/// where Phi = sum_{i,j} e_{i,j} (x) e_{i,j} is the un-normalized maximally
/// entangled projector and H_{k,l}^{k',l'} = |eta_{k,l}><eta_{k',l'}|.
double rank_one_frame_residual(const WeylFamily& family, const Matrix& rho);

/// Sum_{i,j} e_{i,j} (x) e_{i,j} as an n^2 x n^2 matrix.
Matrix unnormalized_max_entangled(int n);

}  // namespace osgap
