#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "osgap/labeled_tensor.hpp"
#include "osgap/types.hpp"

namespace osgap {

/// Images T(e_{a,x}) of the matrix units of S_1^n under a linear map into
/// d x d matrices. Stored at a*n + x.
struct OperatorFamily {
  int n = 0;
  int d = 0;
  std::vector<Matrix> blocks;

  const Matrix& at(int a, int x) const { return blocks.at(static_cast<size_t>(a * n + x)); }
  /// The nd x nd matrix sum_{a,x} e_{a,x} (x) T(e_{a,x}).
  Matrix block_matrix() const;
};

/// Positive operators E_x^a with sum_a E_x^a <= I, stored at x*n + a.
struct Povm {
  int n = 0;
  int d = 0;
  std::vector<Matrix> elements;

  const Matrix& at(int x, int a) const { return elements.at(static_cast<size_t>(x * n + a)); }
};

/// Alice acts as M (x) I and Bob as I (x) M on C^{dA} (x) C^{dB}, so the two
/// sides commute by construction.
struct Strategy {
  OperatorFamily alice;
  OperatorFamily bob;
};

/// Operator norm of sum e_{a,x} (x) block(a,x); the cb norm of the map S_1^n -> M_d.
double cb_norm_to_matrices(const OperatorFamily& family);

/// E_x^a = T(e_{a,x})^dag T(e_{a,x}). Rejects maps whose cb norm exceeds 1 + 1e-9.
Povm povm_from_contraction(const OperatorFamily& family);

/// || sum_a alpha_a E_x^a ||; rejects |alpha_a| > 1.
double weighted_povm_norm(const Povm& p, int x, std::span<const Complex> alpha);

/// Minimum over x of the smallest eigenvalue of I - sum_a E_x^a.
double povm_completeness_gap(const Povm& p);

/// Smallest eigenvalue over all elements (PSD check).
double povm_min_eigenvalue(const Povm& p);

/// Largest || sum_a w^{ka} E_x^a || over all x and k.
double max_fourier_weighted_norm(const Povm& p);

struct FourierMatrix {
  Matrix matrix;  // entries w^{-kxy}
  double norm = 0.0;
};

/// Phi_k = (w^{-kxy})_{x,y}, with its operator norm computed by SVD.
FourierMatrix fourier_matrix(int n, int k);

/// || (Id (x) T . S)(t) || for t in C_N (x) S_1^n (x) S_1^n, i.e. the column
/// norm || sum_r Z_r^dag Z_r ||^{1/2} with Z_r = sum c T(e_{a,x}) S(e_{b,y})
/// over the entries of row r. Products are taken on C^{dA} (x) C^{dB}.
double evaluate_strategy(const LabeledTensor& eta, const Strategy& s);

struct ChshBound {
  double sharp = 0.0;   // sqrt(n + (n-1) sqrt(n))
  double stated = 0.0;  // sqrt(2) n^{3/4}
};

/// Analytic max-norm bound for the CHSH_n element; n must be prime.
ChshBound chsh_upper_bound(int n);

enum class Composition { SameSpace, TensorSplit };

/// Frobenius distance between sum_{a+b=xy} E_x^a F_y^b and its expansion
///   (1/n) sum_k sum_{x,y} w^{-kxy} (sum_a w^{ka} E_x^a)(sum_b w^{kb} F_y^b).
/// SameSpace multiplies the operators directly (equal d required);
/// TensorSplit uses E (x) F.
double fourier_decomposition_residual(const Povm& p, const Povm& q,
                                      Composition mode = Composition::SameSpace);

/// [[T, -sqrt(1 - T T^dag)], [sqrt(1 - T^dag T), T^dag]]; rejects ||T|| > 1 + 1e-12.
Matrix unitary_dilation(const Matrix& t);

/// Complex Ginibre n*d x n*d matrix scaled to unit operator norm and cut into
/// d x d blocks. Deterministic in `seed`.
OperatorFamily sample_contraction(int n, int d, std::uint64_t seed);

Strategy sample_strategy(int n, int d_alice, int d_bob, std::uint64_t seed);

/// Per-sample seed derived from a base seed and a sample index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Strategy replay format: "osgap-strategy 1", then the alice and bob
/// families as sparse dumps with legs (FullOperator n, FullOperator d).
void write_strategy(std::ostream& out, const Strategy& s);
Strategy read_strategy(std::istream& in);

LabeledTensor to_tensor(const OperatorFamily& f);
OperatorFamily from_tensor(const LabeledTensor& t);

}  // namespace osgap
