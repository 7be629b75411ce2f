#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "osgap/types.hpp"

namespace osgap {

/// Operator-space role of one tensor leg.
///   RowVec / ColVec        : R_dim / C_dim
///   TraceClass / FullOperator : S_1^dim / S_inf^dim (dim x dim matrices)
///   DiagL1 / DiagLinf      : l_1^dim / l_inf^dim
enum class FactorKind { RowVec, ColVec, TraceClass, FullOperator, DiagL1, DiagLinf };

std::string to_string(FactorKind kind);
FactorKind factor_kind_from_string(const std::string& s);

/// One tensor leg. Vector-like legs (Row/Col/Diag) carry a digit shape whose
/// product is `dim`, so that labels such as xyab stay a 4-tuple. Matrix legs
/// are addressed by (row, col) with both < dim.
struct FactorSpec {
  FactorKind kind = FactorKind::ColVec;
  int dim = 1;
  std::vector<int> shape;

  static FactorSpec make(FactorKind kind, int dim);
  static FactorSpec make(FactorKind kind, std::vector<int> shape);

  bool is_matrix() const { return kind == FactorKind::TraceClass || kind == FactorKind::FullOperator; }
  /// Number of integer coordinates this leg contributes to an index.
  int arity() const { return is_matrix() ? 2 : static_cast<int>(shape.size()); }
  /// Upper bound of coordinate `c` of this leg.
  int extent(int c) const { return is_matrix() ? dim : shape[static_cast<size_t>(c)]; }

  friend bool operator==(const FactorSpec&, const FactorSpec&) = default;
};

FactorKind dual_kind(FactorKind kind);

/// Whether `a` and `b` can be paired (dual kinds, equal dims and shapes).
bool dual_compatible(const FactorSpec& a, const FactorSpec& b);

using Index = std::vector<int>;

/// Sparse element of a tensor product of labelled legs. Immutable once built;
/// entries are kept in index order with no stored values of magnitude
/// <= tol::kPrune.
class LabeledTensor {
 public:
  using Term = std::pair<Index, Complex>;

  LabeledTensor() = default;
  explicit LabeledTensor(std::vector<FactorSpec> factors);

  /// Builds from unsorted terms. Colliding indices are summed after a stable
  /// sort, so the result does not depend on the order terms were produced in
  /// beyond ties.
  static LabeledTensor from_terms(std::vector<FactorSpec> factors, std::vector<Term> terms);

  const std::vector<FactorSpec>& factors() const { return factors_; }
  const std::map<Index, Complex>& entries() const { return entries_; }
  size_t nnz() const { return entries_.size(); }
  int index_arity() const { return arity_; }

  /// Coordinate offset of leg `position` within an index.
  int offset(int position) const;

  Complex at(const Index& idx) const;

  LabeledTensor scaled(Complex s) const;

 private:
  std::vector<FactorSpec> factors_;
  std::map<Index, Complex> entries_;
  int arity_ = 0;

  void check_index(const Index& idx) const;
};

/// Bilinear pairing sum_idx t[idx] * s[idx]; legs must be dual position by position.
Complex pair(const LabeledTensor& t, const LabeledTensor& s);

/// Output leg i is input leg perm[i].
LabeledTensor swap_factors(const LabeledTensor& t, std::span<const int> perm);

std::vector<int> inverse_permutation(std::span<const int> perm);

/// Exchanges the last two legs (w -> w^T on the tail).
LabeledTensor transpose_tail(const LabeledTensor& t);

/// A linear map on one leg, given on basis elements. `image(basis)` returns a
/// tensor whose legs are `outputs`.
struct FactorMap {
  FactorSpec input;
  std::vector<FactorSpec> outputs;
  std::function<LabeledTensor(const Index& basis)> image;
};

/// Replaces leg `position` by the legs of `map`, extending linearly.
LabeledTensor apply_factorwise(const LabeledTensor& t, int position, const FactorMap& map);

// Sparse coordinate dump: a header naming the legs followed by one line per
// entry: "<coords...> <real> <imag>". Values are written with 17 significant
// digits so that a dump round-trips exactly.
void write_sparse(std::ostream& out, const LabeledTensor& t);
LabeledTensor read_sparse(std::istream& in);

}  // namespace osgap
