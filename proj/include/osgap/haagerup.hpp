#pragma once

#include <span>
#include <string>
#include <vector>

#include "osgap/labeled_tensor.hpp"
#include "osgap/types.hpp"

namespace osgap {

/// Exact norm of sum_k e_k (x) x_k (x) e_k in R (x)_h X (x)_h R: the l2
/// aggregate of the block norms.
double norm_r_x_r(std::span<const double> block_norms);

/// Exact norm of sum_k e_k (x) x_k (x) e_k in R (x)_h X (x)_h C: the l1
/// aggregate (diagonal of S_1(X)).
double norm_r_x_c(std::span<const double> block_norms);

/// f : Z_n^4 -> {0,1} such that for each (x,y) the pairs (a,b) with
/// f(x,y,a,b) = 1 form the graph of a bijection a -> b.
class BijectionFamilyFunction {
 public:
  /// Validates the table (indexed ((x*n + y)*n + a)*n + b).
  BijectionFamilyFunction(int n, std::vector<bool> table);

  /// f(x,y,a,b) = 1 iff b = perms[x*n+y][a].
  static BijectionFamilyFunction from_permutations(int n, const std::vector<std::vector<int>>& perms);
  /// f = delta_{b, xy - a}.
  static BijectionFamilyFunction chsh(int n);

  int n() const { return n_; }
  bool operator()(int x, int y, int a, int b) const;

 private:
  int n_;
  std::vector<bool> table_;
};

enum class Aggregation { L2Sum, L1Sum, InnerNorm };

std::string to_string(Aggregation a);

/// Value of a staged Haagerup norm evaluation, with every intermediate
/// aggregate kept for auditing.
struct HaagerupChainValue {
  struct Stage {
    std::string name;
    Aggregation aggregation;
    std::vector<double> values;
  };
  double value = 0.0;
  std::vector<Stage> stages;

  /// Re-derives `value` from the innermost stage.
  double recompose() const;
};

/// Norm of xi_f = sum f(x,y,a,b) e_{xyab} (x) e_{a,x} (x) e_{b,y}
/// in R_{n^4} (x)_h (S_inf^n (x)_h S_inf^n).
HaagerupChainValue xi_chain_norm(const BijectionFamilyFunction& f);

/// Same for xi_f^T = sum f e_{xyab} (x) e_{b,y} (x) e_{a,x}.
HaagerupChainValue xi_transposed_chain_norm(const BijectionFamilyFunction& f);

/// xi_f as a sparse tensor with legs (RowVec n^4 [shape n,n,n,n], FullOperator n, FullOperator n).
LabeledTensor xi_tensor(const BijectionFamilyFunction& f);

/// Chain evaluation for any tensor of the form
///   sum_r c_r e_r (x) e_{alpha,chi} (x) e_{beta,gamma}
/// with one vector leg followed by two matrix legs, where distinct entries
/// use distinct row labels and distinct (alpha, chi, beta, gamma). The
/// result is the norm in R (x)_h (S_inf (x)_h S_inf), with the first matrix
/// leg read as e_{a,x} and the second as e_{b,y}. Throws on other shapes.
HaagerupChainValue chain_norm(const LabeledTensor& t);

struct BalanceResult {
  double value = 0.0;          // final upper bound
  double initial_value = 0.0;  // bound of the (merged) starting representation
  int iterations = 0;          // accepted steps
  int merged_terms = 0;        // terms removed by proportional-duplicate merging
  bool regularized = false;    // a singular step needed the eps*I shift
  double last_decrease = 0.0;  // relative decrease of the last accepted step
};

/// Upper bound on the Haagerup norm of sum_k u_k (x) v_k in
/// M_{p1,p2} (x)_h M_{q1,q2}:
///   || sum u_k u_k^dag ||^{1/2} || sum v_k^dag v_k ||^{1/2}
/// minimised over re-mixings u <- u A, v <- A^{-1} v. Terms with
/// proportional right (or left) factors are merged first. Each step is a
/// geometric-mean proposal followed by a geodesic backtracking search and is
/// accepted only if it lowers the bound by at least tol * current value, so
/// the sequence of bounds is nonincreasing.
BalanceResult balance_haagerup_upper(std::span<const Matrix> u, std::span<const Matrix> v,
                                     double tol, int max_iter);

/// Factorised form of a chain-shaped tensor (see chain_norm) as
///   row-weight * [ sum_t (e_t (x) A_t) (x) B_t ]
/// where A_t, B_t are the matrix legs of entry t. The bracket lives in
/// C_T(S_inf) (x)_h S_inf, whose Haagerup norm the balancer bounds.
struct ColumnRepresentation {
  double row_weight = 0.0;
  std::vector<Matrix> left;
  std::vector<Matrix> right;
};

ColumnRepresentation column_representation(const LabeledTensor& t);

/// row_weight * balance_haagerup_upper(column representation).
BalanceResult balanced_upper_bound(const LabeledTensor& t, double tol = 1e-12, int max_iter = 200);

}  // namespace osgap
