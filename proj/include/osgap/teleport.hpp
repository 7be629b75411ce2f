#pragma once

#include <functional>
#include <vector>

#include "osgap/types.hpp"
#include "osgap/weyl.hpp"

namespace osgap {

/// Components of J(rho) = (1/n) sum_{k,l} T_{k,l}^dag rho T_{k,l} (x) e_{k,l},
/// indexed by k*n + l.
std::vector<Matrix> apply_j(const WeylFamily& family, const Matrix& rho);

/// Components of W(rho) = sum_{k,l} T_{k,l}^T rho conj(T_{k,l}) (x) e_{k,l}.
std::vector<Matrix> apply_w(const WeylFamily& family, const Matrix& rho);

/// Coordinates <eta_{k,l}, A eta_{k,l}> of the Bell-basis diagonal of A.
Vector bell_projection(const BellBasis& basis, const Matrix& a);

/// Adjoint of the Bell projection: lambda -> sum lambda_{k,l} |eta_{k,l}><eta_{k,l}|.
Matrix bell_projection_adjoint(const BellBasis& basis, const Vector& lambda);

/// Frobenius distance between J(rho) and (P (x) Id)(rho (x) Phi), where the
/// second route compresses the n^3 x n^3 matrix rho (x) Phi
/// (Phi = sum e_{ij} (x) e_{ij}) onto each eta_{k,l} (x) C^n.
double j_factorization_residual(const WeylFamily& family, const Matrix& rho);

using LinearMap = std::function<Matrix(const Matrix&)>;

/// Choi matrix sum_{i,j} e_{i,j} (x) map(e_{i,j}), rows ordered row-major over e_{i,j}.
Matrix choi_matrix(const LinearMap& map, int input_dim);

/// Checks of the transfer maps, each reported as a residual or eigenvalue floor.
struct TransferChecks {
  double w_unital = 0.0;           // max_{kl} || W(I)_{kl} - I ||
  double w_choi_min_eig = 0.0;     // min over components of lambda_min(Choi)
  double j_trace = 0.0;            // max_{kl} | tr J(rho)_{kl} - tr(rho)/n | over test inputs
  double frame_completeness = 0.0; // || sum |eta><eta| - I ||_F
  double p_adjoint_unital = 0.0;   // || P^*(1) - I ||_F
  double p_adjoint_choi_min_eig = 0.0;
};

TransferChecks transfer_checks(const WeylFamily& family);

}  // namespace osgap
