#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "osgap/certificate.hpp"
#include "osgap/labeled_tensor.hpp"
#include "osgap/types.hpp"

namespace osgap {

/// Sum over a+b=xy of e_{xyab} (column) ⊗ e_{a,x} ⊗ e_{b,y}. Legs
/// (ColVec{n,n,n,n}, TraceClass n, TraceClass n).
LabeledTensor build_eta(int n, bool allow_composite = false);

/// (1/n^2) sum over a+b=xy of e_{xyab} (row) ⊗ e_{a,x} ⊗ e_{b,y}. Legs
/// (RowVec{n,n,n,n}, FullOperator n, FullOperator n).
LabeledTensor build_p(int n);

/// (Id⊗J⊗J)(eta), legs reordered to (ColVec, FullOperator, FullOperator,
/// DiagL1{n,n}, DiagL1{n,n}).
LabeledTensor build_beta(int n, bool allow_composite = false);

/// (1/n^2)(Id⊗W⊗W)(P), legs (RowVec, TraceClass, TraceClass, DiagLinf{n,n},
/// DiagLinf{n,n}).
LabeledTensor build_q(int n, bool allow_composite = false);

/// <beta_n, Q_n> from the factored form, without materializing either tensor.
struct BlockwisePairing {
  Complex value;
  double max_block_residual = 0.0;  // max |<R^{kl}_{ax}, S^{kl}_{ax}> - 1|
  long long blocks_checked = 0;
};
BlockwisePairing blockwise_transfer_pairing(int n);

/// Position of a beta_n entry inside M_{n^6} ⊗ l1^{n^2} ⊗ l1^{n^2}: the column
/// leg and both matrix legs flatten to an (n^6 x n^2) block of M_{n^6}.
struct FlatIndex {
  long long row = 0;
  long long col = 0;
  int label_a = 0;
  int label_b = 0;
};
FlatIndex flatten_beta_index(int n, const Index& idx);

/// Commuting l1-side strategy: one d x d contraction per Weyl label on each side.
struct L1Strategy {
  std::vector<Matrix> alice;  // indexed k*n + l
  std::vector<Matrix> bob;
};
L1Strategy sample_l1_strategy(int n, int d, std::uint64_t seed);
double evaluate_l1_strategy(const LabeledTensor& beta, const L1Strategy& s);

NormCertificate certify_lower(int n);
/// Lower certificate from an explicit (eta, P) pair; fails if P is not a
/// norm-one witness pairing to n.
NormCertificate certify_lower(const LabeledTensor& eta, const LabeledTensor& p, int n);
NormCertificate certify_lower_transfer(int n);

struct UpperOptions {
  int samples = 0;
  std::uint64_t seed = 0;
  int local_dim = 0;   // 0 means n
  int l1_samples = -1; // -1 means min(samples, 20) when n <= 3, else 0
  int l1_dim = 2;
};
NormCertificate certify_upper(int n, const UpperOptions& options, double* empirical_max = nullptr);
NormCertificate certify_upper(int n, int samples, std::uint64_t seed, int local_dim = 0);

struct ReportRow {
  int n = 0;
  double lower = 0.0;
  double upper_stated = 0.0;
  double upper_sharp = 0.0;
  double ratio = 0.0;
  double empirical_max = 0.0;
  bool all_checks_passed = false;
  bool certified = false;
};

struct ViolationReport {
  std::vector<ReportRow> rows;
  std::vector<NormCertificate> certificates;
  std::vector<std::string> failures;
};

ViolationReport violation_report(std::span<const int> ns, int samples, std::uint64_t seed, int local_dim = 0);

}  // namespace osgap
