#include "osgap/game.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <string>

#include "osgap/weyl.hpp"

namespace osgap {

namespace {

void require_family(const OperatorFamily& f) {
  if (f.n < 1 || f.d < 1 || f.blocks.size() != static_cast<size_t>(f.n) * f.n)
    throw DomainError("operator family: need n^2 blocks");
  for (const auto& b : f.blocks)
    if (b.rows() != f.d || b.cols() != f.d) throw DomainError("operator family: ragged block dimensions");
}

std::vector<Complex> fourier_weights(int n, int k) {
  std::vector<Complex> w(static_cast<size_t>(n));
  for (int a = 0; a < n; ++a) w[static_cast<size_t>(a)] = unit_root(n, static_cast<long long>(k) * a);
  return w;
}

Matrix weighted_sum(const Povm& p, int x, std::span<const Complex> alpha) {
  Matrix s = Matrix::Zero(p.d, p.d);
  for (int a = 0; a < p.n; ++a) s += alpha[static_cast<size_t>(a)] * p.at(x, a);
  return s;
}

}  // namespace

Matrix OperatorFamily::block_matrix() const {
  require_family(*this);
  Matrix m(static_cast<Eigen::Index>(n) * d, static_cast<Eigen::Index>(n) * d);
  for (int a = 0; a < n; ++a)
    for (int x = 0; x < n; ++x) m.block(a * d, x * d, d, d) = at(a, x);
  return m;
}

double cb_norm_to_matrices(const OperatorFamily& family) { return op_norm(family.block_matrix()); }

Povm povm_from_contraction(const OperatorFamily& family) {
  const double cb = cb_norm_to_matrices(family);
  if (cb > 1.0 + tol::kContraction)
    throw DomainError("povm_from_contraction: map is not a complete contraction (cb norm " +
                      std::to_string(cb) + ")");
  Povm p;
  p.n = family.n;
  p.d = family.d;
  p.elements.resize(family.blocks.size());
  for (int x = 0; x < p.n; ++x)
    for (int a = 0; a < p.n; ++a) {
      const Matrix& t = family.at(a, x);
      p.elements[static_cast<size_t>(x * p.n + a)] = t.adjoint() * t;
    }
  return p;
}

double weighted_povm_norm(const Povm& p, int x, std::span<const Complex> alpha) {
  if (x < 0 || x >= p.n) throw DomainError("weighted_povm_norm: x out of range");
  if (alpha.size() != static_cast<size_t>(p.n)) throw DomainError("weighted_povm_norm: need n weights");
  for (const auto& a : alpha)
    if (std::abs(a) > 1.0 + tol::kAlgebraic) throw DomainError("weighted_povm_norm: |alpha_a| > 1");
  return op_norm(weighted_sum(p, x, alpha));
}

double povm_completeness_gap(const Povm& p) {
  double gap = INFINITY;
  for (int x = 0; x < p.n; ++x) {
    Matrix s = Matrix::Identity(p.d, p.d);
    for (int a = 0; a < p.n; ++a) s -= p.at(x, a);
    gap = std::min(gap, min_eigenvalue(s));
  }
  return gap;
}

double povm_min_eigenvalue(const Povm& p) {
  double m = INFINITY;
  for (const auto& e : p.elements) m = std::min(m, min_eigenvalue(e));
  return m;
}

double max_fourier_weighted_norm(const Povm& p) {
  double worst = 0.0;
  for (int k = 0; k < p.n; ++k) {
    const auto w = fourier_weights(p.n, k);
    for (int x = 0; x < p.n; ++x) worst = std::max(worst, weighted_povm_norm(p, x, w));
  }
  return worst;
}

FourierMatrix fourier_matrix(int n, int k) {
  if (n < 1) throw DomainError("fourier_matrix: n must be positive");
  if (k < 0 || k >= n) throw DomainError("fourier_matrix: k out of range");
  FourierMatrix f;
  f.matrix = Matrix(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) f.matrix(x, y) = unit_root(n, -static_cast<long long>(k) * x * y);
  f.norm = op_norm(f.matrix);
  return f;
}

double evaluate_strategy(const LabeledTensor& eta, const Strategy& s) {
  require_family(s.alice);
  require_family(s.bob);
  const auto& legs = eta.factors();
  if (legs.size() != 3 || legs[0].kind != FactorKind::ColVec || legs[1].kind != FactorKind::TraceClass ||
      legs[2].kind != FactorKind::TraceClass)
    throw DomainError("evaluate_strategy: expected legs (ColVec, TraceClass, TraceClass)");
  if (legs[1].dim != s.alice.n || legs[2].dim != s.bob.n)
    throw DomainError("evaluate_strategy: strategy n does not match tensor");

  const int off = eta.offset(1);
  const Eigen::Index dim = static_cast<Eigen::Index>(s.alice.d) * s.bob.d;

  std::map<Index, std::vector<std::pair<size_t, Complex>>> rows;  // row -> (alice idx, bob idx) packed
  std::vector<std::pair<int, int>> legs_of;
  for (const auto& [idx, v] : eta.entries()) {
    Index row(idx.begin(), idx.begin() + off);
    const int ia = idx[static_cast<size_t>(off)] * s.alice.n + idx[static_cast<size_t>(off + 1)];
    const int ib = idx[static_cast<size_t>(off + 2)] * s.bob.n + idx[static_cast<size_t>(off + 3)];
    legs_of.emplace_back(ia, ib);
    rows[row].emplace_back(legs_of.size() - 1, v);
  }

  // Cache T^dag T and S^dag S for single-entry rows.
  std::vector<Matrix> ea(s.alice.blocks.size()), fb(s.bob.blocks.size());
  auto gram_a = [&](int i) -> const Matrix& {
    auto& m = ea[static_cast<size_t>(i)];
    if (m.size() == 0) m = s.alice.blocks[static_cast<size_t>(i)].adjoint() * s.alice.blocks[static_cast<size_t>(i)];
    return m;
  };
  auto gram_b = [&](int i) -> const Matrix& {
    auto& m = fb[static_cast<size_t>(i)];
    if (m.size() == 0) m = s.bob.blocks[static_cast<size_t>(i)].adjoint() * s.bob.blocks[static_cast<size_t>(i)];
    return m;
  };

  // Single-entry rows contribute |c|^2 T^dag T (x) S^dag S; grouping them by
  // the alice block leaves one Kronecker product per alice block.
  std::map<int, Matrix> bob_weight;
  Matrix total = Matrix::Zero(dim, dim);
  for (const auto& [row, terms] : rows) {
    if (terms.size() == 1) {
      const auto [ia, ib] = legs_of[terms[0].first];
      auto it = bob_weight.try_emplace(ia, Matrix::Zero(s.bob.d, s.bob.d)).first;
      it->second += std::norm(terms[0].second) * gram_b(ib);
      continue;
    }
    Matrix z = Matrix::Zero(dim, dim);
    for (const auto& [t, c] : terms) {
      const auto [ia, ib] = legs_of[t];
      z += c * kron(s.alice.blocks[static_cast<size_t>(ia)], s.bob.blocks[static_cast<size_t>(ib)]);
    }
    total += z.adjoint() * z;
  }
  for (const auto& [ia, w] : bob_weight) total += kron(gram_a(ia), w);
  return std::sqrt(std::max(0.0, max_eigenvalue(total)));
}

ChshBound chsh_upper_bound(int n) {
  if (!is_prime(n)) throw DomainError("chsh_upper_bound: n must be prime");
  const double dn = n;
  return {std::sqrt(dn + (dn - 1.0) * std::sqrt(dn)), std::sqrt(2.0) * std::pow(dn, 0.75)};
}

double fourier_decomposition_residual(const Povm& p, const Povm& q, Composition mode) {
  if (p.n != q.n) throw DomainError("fourier residual: POVMs have different n");
  if (mode == Composition::SameSpace && p.d != q.d)
    throw DomainError("fourier residual: same-space product needs equal dimensions");
  const int n = p.n;
  auto product = [&](const Matrix& a, const Matrix& b) -> Matrix {
    return mode == Composition::SameSpace ? Matrix(a * b) : kron(a, b);
  };
  const Eigen::Index dim = mode == Composition::SameSpace ? p.d : static_cast<Eigen::Index>(p.d) * q.d;

  // Both sides are bilinear, so the y-sums are taken before the product.
  Matrix lhs = Matrix::Zero(dim, dim);
  for (int x = 0; x < n; ++x)
    for (int a = 0; a < n; ++a) {
      Matrix f = Matrix::Zero(q.d, q.d);
      for (int y = 0; y < n; ++y) f += q.at(y, static_cast<int>(((static_cast<long long>(x) * y - a) % n + n) % n));
      lhs += product(p.at(x, a), f);
    }

  Matrix rhs = Matrix::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    const auto w = fourier_weights(n, k);
    std::vector<Matrix> sy;
    for (int y = 0; y < n; ++y) sy.push_back(weighted_sum(q, y, w));
    for (int x = 0; x < n; ++x) {
      Matrix g = Matrix::Zero(q.d, q.d);
      for (int y = 0; y < n; ++y)
        g += unit_root(n, -static_cast<long long>(k) * x * y) * sy[static_cast<size_t>(y)];
      rhs += product(weighted_sum(p, x, w), g);
    }
  }
  rhs /= static_cast<double>(n);
  return (lhs - rhs).norm();
}

Matrix unitary_dilation(const Matrix& t) {
  if (t.rows() != t.cols()) throw DomainError("unitary_dilation: matrix must be square");
  if (op_norm(t) > 1.0 + tol::kAlgebraic) throw DomainError("unitary_dilation: input norm exceeds 1");
  const Eigen::Index d = t.rows();
  // Both defect operators from one SVD, so the blocks commute exactly as in
  // the functional calculus even when t has singular values at 1.
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  Eigen::VectorXd c(d);
  for (Eigen::Index i = 0; i < d; ++i) c(i) = std::sqrt(std::max(0.0, 1.0 - s(i) * s(i)));
  const Matrix& uu = svd.matrixU();
  const Matrix& vv = svd.matrixV();
  Matrix u(2 * d, 2 * d);
  u.topLeftCorner(d, d) = t;
  u.topRightCorner(d, d) = -(uu * c.cast<Complex>().asDiagonal() * uu.adjoint());
  u.bottomLeftCorner(d, d) = vv * c.cast<Complex>().asDiagonal() * vv.adjoint();
  u.bottomRightCorner(d, d) = t.adjoint();
  return u;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 over a combined state
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

OperatorFamily sample_contraction(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw DomainError("sample_contraction: n and d must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index m = static_cast<Eigen::Index>(n) * d;
  Matrix g(m, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  g /= op_norm(g);

  OperatorFamily f;
  f.n = n;
  f.d = d;
  for (int a = 0; a < n; ++a)
    for (int x = 0; x < n; ++x) f.blocks.push_back(g.block(a * d, x * d, d, d));
  return f;
}

Strategy sample_strategy(int n, int d_alice, int d_bob, std::uint64_t seed) {
  return {sample_contraction(n, d_alice, derive_seed(seed, 0)),
          sample_contraction(n, d_bob, derive_seed(seed, 1))};
}

LabeledTensor to_tensor(const OperatorFamily& f) {
  require_family(f);
  std::vector<LabeledTensor::Term> terms;
  for (int a = 0; a < f.n; ++a)
    for (int x = 0; x < f.n; ++x) {
      const Matrix& b = f.at(a, x);
      for (int i = 0; i < f.d; ++i)
        for (int j = 0; j < f.d; ++j)
          if (b(i, j) != Complex(0.0)) terms.push_back({{a, x, i, j}, b(i, j)});
    }
  return LabeledTensor::from_terms(
      {FactorSpec::make(FactorKind::FullOperator, f.n), FactorSpec::make(FactorKind::FullOperator, f.d)},
      std::move(terms));
}

OperatorFamily from_tensor(const LabeledTensor& t) {
  const auto& legs = t.factors();
  if (legs.size() != 2 || legs[0].kind != FactorKind::FullOperator || legs[1].kind != FactorKind::FullOperator)
    throw DomainError("strategy dump: expected legs (FullOperator n, FullOperator d)");
  OperatorFamily f;
  f.n = legs[0].dim;
  f.d = legs[1].dim;
  f.blocks.assign(static_cast<size_t>(f.n) * f.n, Matrix::Zero(f.d, f.d));
  for (const auto& [idx, v] : t.entries()) f.blocks[static_cast<size_t>(idx[0] * f.n + idx[1])](idx[2], idx[3]) = v;
  return f;
}

void write_strategy(std::ostream& out, const Strategy& s) {
  out << "osgap-strategy 1\n";
  write_sparse(out, to_tensor(s.alice));
  write_sparse(out, to_tensor(s.bob));
}

Strategy read_strategy(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "osgap-strategy" || version != 1)
    throw DomainError("read_strategy: missing 'osgap-strategy 1' header");
  Strategy s;
  s.alice = from_tensor(read_sparse(in));
  s.bob = from_tensor(read_sparse(in));
  if (s.alice.n != s.bob.n) throw DomainError("read_strategy: alice and bob disagree on n");
  return s;
}

}  // namespace osgap
