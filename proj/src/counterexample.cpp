#include "osgap/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "osgap/game.hpp"
#include "osgap/haagerup.hpp"
#include "osgap/parallel.hpp"
#include "osgap/teleport.hpp"
#include "osgap/weyl.hpp"

namespace osgap {

namespace {

int mod(long long v, int n) { return static_cast<int>(((v % n) + n) % n); }

void require_prime(int n, bool allow_composite, const char* who) {
  if (n < 2) throw DomainError(std::string(who) + ": n must be at least 2");
  if (!allow_composite && !is_prime(n))
    throw DomainError(std::string(who) + ": n = " + std::to_string(n) + " is not prime");
}

/// Visits every (x, y, a, b) with a + b = xy mod n.
template <class F>
void for_each_constraint(int n, F&& f) {
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int a = 0; a < n; ++a) f(x, y, a, mod(static_cast<long long>(x) * y - a, n));
}

/// T^dag e_{ax} T
Matrix r_block(const WeylFamily& fam, int k, int l, int a, int x) {
  const Matrix& t = fam.weyl(k, l);
  return t.adjoint() * matrix_unit(fam.dim(), fam.dim(), a, x) * t;
}

/// T^T e_{ax} conj(T)
Matrix s_block(const WeylFamily& fam, int k, int l, int a, int x) {
  const Matrix& t = fam.weyl(k, l);
  return t.transpose() * matrix_unit(fam.dim(), fam.dim(), a, x) * t.conjugate();
}

LabeledTensor block_image(const WeylFamily& fam, const Index& basis, bool j_side) {
  const int n = fam.dim();
  const int a = basis[0], x = basis[1];
  std::vector<LabeledTensor::Term> terms;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      const Matrix m = j_side ? r_block(fam, k, l, a, x) : s_block(fam, k, l, a, x);
      const double scale = j_side ? 1.0 / n : 1.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (std::abs(m(i, j)) > tol::kPrune) terms.push_back({{i, j, k, l}, scale * m(i, j)});
    }
  const FactorKind mat = j_side ? FactorKind::FullOperator : FactorKind::TraceClass;
  const FactorKind diag = j_side ? FactorKind::DiagL1 : FactorKind::DiagLinf;
  return LabeledTensor::from_terms({FactorSpec::make(mat, n), FactorSpec::make(diag, {n, n})}, std::move(terms));
}

LabeledTensor transfer(const LabeledTensor& t, bool j_side) {
  const int n = t.factors()[1].dim;
  const WeylFamily fam(n);
  const FactorKind in = j_side ? FactorKind::TraceClass : FactorKind::FullOperator;
  FactorMap map{FactorSpec::make(in, n),
                {FactorSpec::make(j_side ? FactorKind::FullOperator : FactorKind::TraceClass, n),
                 FactorSpec::make(j_side ? FactorKind::DiagL1 : FactorKind::DiagLinf, {n, n})},
                [&](const Index& basis) { return block_image(fam, basis, j_side); }};
  // legs (V, M, M) -> (V, M', D, M) -> (V, M', D, M', D) -> (V, M', M', D, D)
  LabeledTensor once = apply_factorwise(t, 1, map);
  LabeledTensor twice = apply_factorwise(once, 3, map);
  const int perm[] = {0, 1, 3, 2, 4};
  return swap_factors(twice, perm);
}

double chain_of(const LabeledTensor& p) { return chain_norm(p).value; }

std::string n_input(int n) { return "n=" + std::to_string(n); }

}  // namespace

LabeledTensor build_eta(int n, bool allow_composite) {
  require_prime(n, allow_composite, "build_eta");
  std::vector<LabeledTensor::Term> terms;
  for_each_constraint(n, [&](int x, int y, int a, int b) { terms.push_back({{x, y, a, b, a, x, b, y}, 1.0}); });
  return LabeledTensor::from_terms({FactorSpec::make(FactorKind::ColVec, {n, n, n, n}),
                                    FactorSpec::make(FactorKind::TraceClass, n),
                                    FactorSpec::make(FactorKind::TraceClass, n)},
                                   std::move(terms));
}

LabeledTensor build_p(int n) {
  if (n < 2) throw DomainError("build_p: n must be at least 2");
  const double c = 1.0 / (static_cast<double>(n) * n);
  std::vector<LabeledTensor::Term> terms;
  for_each_constraint(n, [&](int x, int y, int a, int b) { terms.push_back({{x, y, a, b, a, x, b, y}, c}); });
  return LabeledTensor::from_terms({FactorSpec::make(FactorKind::RowVec, {n, n, n, n}),
                                    FactorSpec::make(FactorKind::FullOperator, n),
                                    FactorSpec::make(FactorKind::FullOperator, n)},
                                   std::move(terms));
}

LabeledTensor build_beta(int n, bool allow_composite) {
  return transfer(build_eta(n, allow_composite), true);
}

LabeledTensor build_q(int n, bool allow_composite) {
  require_prime(n, allow_composite, "build_q");
  const double n2 = static_cast<double>(n) * n;
  return transfer(build_p(n), false).scaled(1.0 / n2);
}

BlockwisePairing blockwise_transfer_pairing(int n) {
  require_prime(n, false, "blockwise_transfer_pairing");
  const WeylFamily fam(n);
  BlockwisePairing out;
  // g(a,x) = sum_{kl} <R^{kl}_{ax}, S^{kl}_{ax}>, bilinear
  std::vector<Complex> g(static_cast<size_t>(n) * n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int x = 0; x < n; ++x)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const Complex p = r_block(fam, k, l, a, x).cwiseProduct(s_block(fam, k, l, a, x)).sum();
          out.max_block_residual = std::max(out.max_block_residual, std::abs(p - 1.0));
          g[static_cast<size_t>(a * n + x)] += p;
          ++out.blocks_checked;
        }
  Complex total = 0.0;
  for_each_constraint(n, [&](int x, int y, int a, int b) {
    total += g[static_cast<size_t>(a * n + x)] * g[static_cast<size_t>(b * n + y)];
  });
  // beta carries 1/n^2, Q carries 1/n^4
  out.value = total / std::pow(static_cast<double>(n), 6);
  return out;
}

FlatIndex flatten_beta_index(int n, const Index& idx) {
  if (idx.size() != 12) throw DomainError("flatten_beta_index: expected a 12-coordinate beta index");
  for (int c : idx)
    if (c < 0 || c >= n) throw DomainError("flatten_beta_index: coordinate out of range");
  const long long r = ((static_cast<long long>(idx[0]) * n + idx[1]) * n + idx[2]) * n + idx[3];
  FlatIndex f;
  f.row = (r * n + idx[4]) * n + idx[6];
  f.col = static_cast<long long>(idx[5]) * n + idx[7];
  f.label_a = idx[8] * n + idx[9];
  f.label_b = idx[10] * n + idx[11];
  return f;
}

L1Strategy sample_l1_strategy(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw DomainError("sample_l1_strategy: n and d must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&] {
    Matrix g(d, d);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        g(i, j) = Complex(re, im);
      }
    return Matrix(g / op_norm(g));
  };
  L1Strategy s;
  for (int i = 0; i < n * n; ++i) s.alice.push_back(draw());
  for (int i = 0; i < n * n; ++i) s.bob.push_back(draw());
  return s;
}

double evaluate_l1_strategy(const LabeledTensor& beta, const L1Strategy& s) {
  const auto& legs = beta.factors();
  if (legs.size() != 5 || legs[0].kind != FactorKind::ColVec || legs[1].kind != FactorKind::FullOperator ||
      legs[2].kind != FactorKind::FullOperator || legs[3].kind != FactorKind::DiagL1 ||
      legs[4].kind != FactorKind::DiagL1)
    throw DomainError("evaluate_l1_strategy: expected beta legs (ColVec, FullOperator^2, DiagL1^2)");
  if (s.alice.size() != static_cast<size_t>(legs[3].dim) || s.bob.size() != static_cast<size_t>(legs[4].dim))
    throw DomainError("evaluate_l1_strategy: strategy size does not match the diagonal legs");
  const int n = legs[1].dim;
  const int off = beta.offset(1);
  const Eigen::Index da = s.alice.front().rows(), db = s.bob.front().rows();
  const Eigen::Index dim = static_cast<Eigen::Index>(n) * n * da * db;

  Matrix total = Matrix::Zero(dim, dim);
  Matrix z = Matrix::Zero(dim, dim);
  Index current;
  bool open = false;
  auto flush = [&] {
    if (open) total += z.adjoint() * z;
    z.setZero();
  };
  for (const auto& [idx, v] : beta.entries()) {
    Index row(idx.begin(), idx.begin() + off);
    if (!open || row != current) {
      flush();
      current = std::move(row);
      open = true;
    }
    const auto o = static_cast<size_t>(off);
    const int la = idx[o + 4] * legs[3].shape[1] + idx[o + 5];
    const int lb = idx[o + 6] * legs[4].shape[1] + idx[o + 7];
    const Matrix ts = kron(s.alice[static_cast<size_t>(la)], s.bob[static_cast<size_t>(lb)]);
    // matrix legs are matrix units: place v * ts in the block (i n + i', j n + j')
    const Eigen::Index r = (idx[o] * n + idx[o + 2]) * da * db;
    const Eigen::Index c = (idx[o + 1] * n + idx[o + 3]) * da * db;
    z.block(r, c, da * db, da * db) += v * ts;
  }
  flush();
  return std::sqrt(std::max(0.0, max_eigenvalue(total)));
}

NormCertificate certify_lower(const LabeledTensor& eta, const LabeledTensor& p, int n) {
  require_prime(n, false, "certify_lower");
  const double pairing = std::abs(pair(eta, p) - static_cast<double>(n));
  const double chain_p = chain_of(p);
  const double chain_pt = chain_of(transpose_tail(p));
  CertificateBuilder b("mu-lower via Haagerup duality", Direction::Lower);
  b.check("pairing <eta_n, P_n> = n", n_input(n), pairing, tol::kPairing, "n = <eta_n, P_n>")
      .check("chain norm of P_n = 1", n_input(n), std::abs(chain_p - 1.0), tol::kAlgebraic,
             "||P_n||_{R (x)h S_inf (x)h S_inf} = 1")
      .check("chain norm of P_n^T = 1", n_input(n), std::abs(chain_pt - 1.0), tol::kAlgebraic,
             "||P_n^T||_{R (x)h S_inf (x)h S_inf} = 1")
      .structural("mu-norm duality", "w = w_1 + w_2 gives <w, P> <= ||w_1||_h ||P|| + ||w_2^T||_h ||P^T||",
                  "mu(eta_n) >= <eta_n, P_n> / max(||P_n||, ||P_n^T||)");
  return b.seal(static_cast<double>(n), tol::kPairing);
}

NormCertificate certify_lower(int n) {
  require_prime(n, false, "certify_lower");
  return certify_lower(build_eta(n), build_p(n), n);
}

NormCertificate certify_lower_transfer(int n) {
  require_prime(n, false, "certify_lower_transfer");
  CertificateBuilder b("mu-lower via transfer duality", Direction::Lower);
  if (n <= 3) {
    const double r = std::abs(pair(build_beta(n), build_q(n)) - static_cast<double>(n));
    b.check("pairing <beta_n, Q_n> = n (sparse)", n_input(n), r, tol::kPairing, "<beta_n, Q_n> = <eta_n, P_n> = n");
  } else {
    const BlockwisePairing bp = blockwise_transfer_pairing(n);
    b.check("pairing <beta_n, Q_n> = n (blockwise)", n_input(n), std::abs(bp.value - static_cast<double>(n)),
            tol::kPairing, "<beta_n, Q_n> = <eta_n, P_n> = n")
        .check("block pairing <R^{kl}_{ax}, S^{kl}_{ax}> = 1", n_input(n) + " blocks=" + std::to_string(bp.blocks_checked),
               bp.max_block_residual, tol::kAlgebraic, "S^{kl}_{ax} = conj(R^{kl}_{ax}), ||R||_F = 1");
  }
  const TransferChecks tc = transfer_checks(WeylFamily(n));
  const LabeledTensor p = build_p(n);
  b.check("W unital", n_input(n), tc.w_unital, tol::kAlgebraic, "W(1) = 1 (x) 1")
      .check("W completely positive", n_input(n), std::max(0.0, -tc.w_choi_min_eig), -tol::kPsdFloor,
             "Choi(T^T . conj(T)) >= 0")
      .check("chain norm of P_n = 1", n_input(n), std::abs(chain_of(p) - 1.0), tol::kAlgebraic,
             "||P_n||_{R (x)h S_inf (x)h S_inf} = 1")
      .check("chain norm of P_n^T = 1", n_input(n), std::abs(chain_of(transpose_tail(p)) - 1.0), tol::kAlgebraic,
             "||P_n^T||_{R (x)h S_inf (x)h S_inf} = 1")
      .structural("W (x) W is a complete contraction on the dual side",
                  "unital CP maps are complete contractions; Q_n norm <= P_n norm", "||(W (x) W)(P_n)|| <= ||P_n||")
      .structural("rearrangement of legs",
                  "(C, S_inf, S_inf, l1, l1) read as M_{n^6} (x) l1^{n^2} (x) l1^{n^2} via flatten_beta_index",
                  "C_{n^4} (x) S_inf^n (x) S_inf^n -> M_{n^6}");
  return b.seal(static_cast<double>(n), tol::kPairing);
}

NormCertificate certify_upper(int n, const UpperOptions& opt, double* empirical_max) {
  require_prime(n, false, "certify_upper");
  if (opt.samples < 0) throw DomainError("certify_upper: samples must be non-negative");
  const int d = opt.local_dim > 0 ? opt.local_dim : n;
  const ChshBound bound = chsh_upper_bound(n);
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  CertificateBuilder b("max-upper via CHSH_n", Direction::Upper);
  for (int k = 1; k < n; ++k)
    b.check("Fourier matrix norm k=" + std::to_string(k), n_input(n), std::abs(fourier_matrix(n, k).norm - sqrt_n),
            tol::kSpectral, "||Phi_k|| = sqrt(n), k != 0");
  b.check("sharp bound <= stated bound", n_input(n), std::max(0.0, bound.sharp - bound.stated), tol::kAlgebraic,
          "sqrt(n + (n-1) sqrt(n)) <= sqrt(2) n^{3/4}");

  double emp = 0.0;
  if (opt.samples > 0) {
    struct SampleStats {
      double cb = 0, psd = 0, complete = 0, weighted = 0, fourier = 0, value = 0;
    };
    const LabeledTensor eta = build_eta(n);
    const auto stats = parallel_map(static_cast<size_t>(opt.samples), [&](size_t i) {
      const Strategy s = sample_strategy(n, d, d, derive_seed(opt.seed, i));
      const Povm pa = povm_from_contraction(s.alice);
      const Povm pb = povm_from_contraction(s.bob);
      SampleStats st;
      st.cb = std::max(cb_norm_to_matrices(s.alice), cb_norm_to_matrices(s.bob));
      st.psd = std::min(povm_min_eigenvalue(pa), povm_min_eigenvalue(pb));
      st.complete = std::min(povm_completeness_gap(pa), povm_completeness_gap(pb));
      st.weighted = std::max(max_fourier_weighted_norm(pa), max_fourier_weighted_norm(pb));
      st.fourier = fourier_decomposition_residual(pa, pb, Composition::TensorSplit);
      st.value = evaluate_strategy(eta, s);
      return st;
    });
    SampleStats worst{0, INFINITY, INFINITY, 0, 0, 0};
    for (const auto& st : stats) {
      worst.cb = std::max(worst.cb, st.cb);
      worst.psd = std::min(worst.psd, st.psd);
      worst.complete = std::min(worst.complete, st.complete);
      worst.weighted = std::max(worst.weighted, st.weighted);
      worst.fourier = std::max(worst.fourier, st.fourier);
      worst.value = std::max(worst.value, st.value);
    }
    emp = worst.value;
    std::ostringstream in;
    in << n_input(n) << " d=" << d << " samples=" << opt.samples << " seed=" << opt.seed;
    b.check("sampled maps are complete contractions", in.str(), std::max(0.0, worst.cb - 1.0), tol::kContraction,
            "||T||_cb <= 1")
        .check("POVM elements positive", in.str(), std::max(0.0, -worst.psd), -tol::kPsdFloor, "E_x^a >= 0")
        .check("POVM completeness", in.str(), std::max(0.0, -worst.complete), -tol::kPsdFloor,
               "sum_a E_x^a <= 1")
        .check("Fourier-weighted POVM contraction", in.str(), std::max(0.0, worst.weighted - 1.0), tol::kAlgebraic,
               "||sum_a w^{ka} E_x^a|| <= 1")
        .check("Fourier decomposition residual", in.str(), worst.fourier, tol::kContraction,
               "sum_{a+b=xy} E (x) F = (1/n) sum_k sum_{xy} w^{-kxy} A_x^k (x) B_y^k")
        .check("empirical strategy max <= sharp bound", in.str(), std::max(0.0, worst.value - bound.sharp),
               tol::kContraction, "||sum E (x) F||^{1/2} <= sqrt(n + (n-1) sqrt(n))");
  }

  b.structural("transfer of the bound to beta_n",
               "commuting T(e_kl), S(e_k'l') and their adjoints give ||beta_n||_max <= ||eta_n||_max",
               "[T(e_kl), S(e_k'l')] = [T(e_kl), S(e_k'l')^dag] = 0");

  const int l1_samples = opt.l1_samples >= 0 ? opt.l1_samples : (n <= 3 ? std::min(opt.samples, 20) : 0);
  if (l1_samples > 0) {
    const LabeledTensor beta = build_beta(n);
    const auto values = parallel_map(static_cast<size_t>(l1_samples), [&](size_t i) {
      return evaluate_l1_strategy(beta, sample_l1_strategy(n, opt.l1_dim, derive_seed(opt.seed ^ 0x6c31ULL, i)));
    });
    const double l1max = *std::max_element(values.begin(), values.end());
    std::ostringstream in;
    in << n_input(n) << " d=" << opt.l1_dim << " samples=" << l1_samples << " seed=" << opt.seed;
    b.check("l1-side strategy max <= sharp bound", in.str(), std::max(0.0, l1max - bound.sharp), tol::kContraction,
            "||beta_n||_max <= ||eta_n||_max");
  }

  if (empirical_max) *empirical_max = emp;
  return b.seal(bound.stated, tol::kContraction);
}

NormCertificate certify_upper(int n, int samples, std::uint64_t seed, int local_dim) {
  UpperOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  opt.local_dim = local_dim;
  return certify_upper(n, opt);
}

ViolationReport violation_report(std::span<const int> ns, int samples, std::uint64_t seed, int local_dim) {
  for (int n : ns) require_prime(n, false, "violation_report");
  ViolationReport rep;
  for (size_t i = 0; i < ns.size(); ++i) {
    const int n = ns[i];
    ReportRow row;
    row.n = n;
    const ChshBound bound = chsh_upper_bound(n);
    row.lower = n;
    row.upper_stated = bound.stated;
    row.upper_sharp = bound.sharp;
    row.all_checks_passed = true;
    auto attempt = [&](auto&& make) {
      try {
        NormCertificate c = make();
        if (!c.valid()) throw CertificationError("certificate failed validation: " + c.norm_name());
        rep.certificates.push_back(std::move(c));
      } catch (const CertificationError& e) {
        row.all_checks_passed = false;
        rep.failures.push_back(n_input(n) + ": " + e.what());
      }
    };
    attempt([&] { return certify_lower(n); });
    attempt([&] { return certify_lower_transfer(n); });
    attempt([&] {
      UpperOptions opt;
      opt.samples = samples;
      opt.seed = derive_seed(seed, static_cast<std::uint64_t>(n));
      opt.local_dim = local_dim;
      return certify_upper(n, opt, &row.empirical_max);
    });
    row.ratio = row.lower / row.upper_stated;
    row.certified = row.ratio > 1.0 && row.all_checks_passed;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace osgap
