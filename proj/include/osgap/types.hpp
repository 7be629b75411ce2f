#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace osgap {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Fixed tolerances. They are not configurable so that certificates are
// reproducible from run to run.
namespace tol {
inline constexpr double kAlgebraic = 1e-12;   // exact identities (unitarity, Gram)
inline constexpr double kFrame = 1e-11;       // identities summed over n^4 terms
inline constexpr double kPairing = 1e-9;      // duality pairings
inline constexpr double kSpectral = 1e-10;    // computed operator norms
inline constexpr double kPsdFloor = -1e-12;   // minimum eigenvalue accepted as PSD
inline constexpr double kPrune = 1e-15;       // sparse entries at or below are dropped
inline constexpr double kContraction = 1e-9;  // contraction slack before rejecting input
}  // namespace tol

/// Thrown when an argument violates an operation's precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Largest singular value.
double op_norm(const Matrix& m);

/// Smallest eigenvalue of the Hermitian part of `m`.
double min_eigenvalue(const Matrix& m);

/// Largest eigenvalue of the Hermitian part of `m`.
double max_eigenvalue(const Matrix& m);

/// Square root of a PSD matrix; negative eigenvalues are clamped to zero.
Matrix psd_sqrt(const Matrix& m);

Matrix kron(const Matrix& a, const Matrix& b);

/// Matrix unit e_{i,j} of size rows x cols.
Matrix matrix_unit(int rows, int cols, int i, int j);

bool is_prime(long long n);

}  // namespace osgap
