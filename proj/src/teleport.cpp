#include "osgap/teleport.hpp"

#include <algorithm>
#include <cmath>

namespace osgap {

namespace {

void require_square(const Matrix& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n) throw DomainError(std::string(what) + ": input must be n x n");
}

}  // namespace

std::vector<Matrix> apply_j(const WeylFamily& family, const Matrix& rho) {
  const int n = family.dim();
  require_square(rho, n, "apply_j");
  std::vector<Matrix> out;
  out.reserve(static_cast<size_t>(n) * n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const Matrix& t = family.weyl(k, l);
      out.push_back(t.adjoint() * rho * t / static_cast<double>(n));
    }
  return out;
}

std::vector<Matrix> apply_w(const WeylFamily& family, const Matrix& rho) {
  const int n = family.dim();
  require_square(rho, n, "apply_w");
  std::vector<Matrix> out;
  out.reserve(static_cast<size_t>(n) * n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const Matrix& t = family.weyl(k, l);
      out.push_back(t.transpose() * rho * t.conjugate());
    }
  return out;
}

Vector bell_projection(const BellBasis& basis, const Matrix& a) {
  const int n2 = basis.n * basis.n;
  require_square(a, n2, "bell_projection");
  Vector out(n2);
  for (int p = 0; p < n2; ++p) {
    const Vector& eta = basis.vectors[static_cast<size_t>(p)];
    out(p) = eta.dot(a * eta);
  }
  return out;
}

Matrix bell_projection_adjoint(const BellBasis& basis, const Vector& lambda) {
  const int n2 = basis.n * basis.n;
  if (lambda.size() != n2) throw DomainError("bell_projection_adjoint: need n^2 weights");
  Matrix out = Matrix::Zero(n2, n2);
  for (int p = 0; p < n2; ++p) {
    const Vector& eta = basis.vectors[static_cast<size_t>(p)];
    out += lambda(p) * eta * eta.adjoint();
  }
  return out;
}

double j_factorization_residual(const WeylFamily& family, const Matrix& rho) {
  const int n = family.dim();
  require_square(rho, n, "j_factorization_residual");
  const BellBasis basis = bell_basis(family);
  const std::vector<Matrix> direct = apply_j(family, rho);

  double sq = 0.0;
  if (n <= 7) {
    const Matrix lifted = kron(rho, unnormalized_max_entangled(n));  // n^3 x n^3
    const Matrix id = Matrix::Identity(n, n);
    for (int p = 0; p < n * n; ++p) {
      const Matrix iso = kron(basis.vectors[static_cast<size_t>(p)], id);  // n^3 x n
      const Matrix component = iso.adjoint() * lifted * iso;
      sq += (component - direct[static_cast<size_t>(p)]).squaredNorm();
    }
    return std::sqrt(sq);
  }

  // Same compression without densifying the lift: entry ((i,j,r),(i',m,s)) of
  // rho (x) Phi is rho(i,i') delta_{jr} delta_{ms}.
  for (int p = 0; p < n * n; ++p) {
    const Vector& eta = basis.vectors[static_cast<size_t>(p)];
    Matrix component = Matrix::Zero(n, n);
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s)
        for (int i = 0; i < n; ++i)
          for (int i2 = 0; i2 < n; ++i2)
            component(r, s) += std::conj(eta(i * n + r)) * rho(i, i2) * eta(i2 * n + s);
    sq += (component - direct[static_cast<size_t>(p)]).squaredNorm();
  }
  return std::sqrt(sq);
}

Matrix choi_matrix(const LinearMap& map, int input_dim) {
  Matrix choi;
  for (int i = 0; i < input_dim; ++i)
    for (int j = 0; j < input_dim; ++j) {
      const Matrix img = map(matrix_unit(input_dim, input_dim, i, j));
      if (choi.size() == 0) choi = Matrix::Zero(input_dim * img.rows(), input_dim * img.cols());
      choi.block(i * img.rows(), j * img.cols(), img.rows(), img.cols()) = img;
    }
  return choi;
}

TransferChecks transfer_checks(const WeylFamily& family) {
  const int n = family.dim();
  const int n2 = n * n;
  TransferChecks c;
  const Matrix id = Matrix::Identity(n, n);

  const auto w_of_id = apply_w(family, id);
  for (const auto& m : w_of_id) c.w_unital = std::max(c.w_unital, (m - id).norm());

  c.w_choi_min_eig = INFINITY;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const Matrix& t = family.weyl(k, l);
      const Matrix choi = choi_matrix([&](const Matrix& r) { return Matrix(t.transpose() * r * t.conjugate()); }, n);
      c.w_choi_min_eig = std::min(c.w_choi_min_eig, min_eigenvalue(choi));
    }

  // trace bookkeeping on the matrix units
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Matrix e = matrix_unit(n, n, i, j);
      const Complex expect = e.trace() / static_cast<double>(n);
      for (const auto& m : apply_j(family, e)) c.j_trace = std::max(c.j_trace, std::abs(m.trace() - expect));
    }

  const BellBasis basis = bell_basis(family);
  const Matrix frame = bell_projection_adjoint(basis, Vector::Ones(n2));
  c.frame_completeness = (frame - Matrix::Identity(n2, n2)).norm();
  c.p_adjoint_unital = c.frame_completeness;

  // The adjoint is defined on the diagonal algebra l_inf^{n^2}, so its Choi
  // matrix is block diagonal with blocks P^*(e_p) = |eta_p><eta_p|.
  c.p_adjoint_choi_min_eig = INFINITY;
  for (int p = 0; p < n2; ++p) {
    const Vector& eta = basis.vectors[static_cast<size_t>(p)];
    c.p_adjoint_choi_min_eig = std::min(c.p_adjoint_choi_min_eig, min_eigenvalue(eta * eta.adjoint()));
  }
  return c;
}

}  // namespace osgap
