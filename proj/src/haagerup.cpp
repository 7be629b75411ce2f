#include "osgap/haagerup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace osgap {

namespace {

void require_block_norms(std::span<const double> xs) {
  for (double x : xs)
    if (!std::isfinite(x) || x < 0.0) throw DomainError("block norms must be finite and nonnegative");
}

// Coefficient grid c[((x*n + y)*n + a)*n + b].
struct ChainGrid {
  int n = 0;
  std::vector<double> magnitude;
  double at(int x, int y, int a, int b) const {
    return magnitude[static_cast<size_t>(((x * n + y) * n + a) * n + b)];
  }
};

HaagerupChainValue evaluate_chain(const ChainGrid& g) {
  const int n = g.n;
  HaagerupChainValue out;
  HaagerupChainValue::Stage inner{"S1 norm of diagonal over a", Aggregation::InnerNorm, {}};
  HaagerupChainValue::Stage over_x{"l2 over x", Aggregation::L2Sum, {}};
  HaagerupChainValue::Stage over_b{"l1 over b", Aggregation::L1Sum, {}};
  HaagerupChainValue::Stage over_y{"l2 over y", Aggregation::L2Sum, {}};

  for (int y = 0; y < n; ++y) {
    std::vector<double> per_b;
    for (int b = 0; b < n; ++b) {
      std::vector<double> per_x;
      for (int x = 0; x < n; ++x) {
        // trace norm of diag_a(c(x,y,a,b))
        double s = 0.0;
        for (int a = 0; a < n; ++a) s += g.at(x, y, a, b);
        per_x.push_back(s);
      }
      inner.values.insert(inner.values.end(), per_x.begin(), per_x.end());
      per_b.push_back(norm_r_x_r(per_x));
    }
    over_x.values.insert(over_x.values.end(), per_b.begin(), per_b.end());
    over_b.values.push_back(norm_r_x_c(per_b));
  }
  out.value = norm_r_x_r(over_b.values);
  over_y.values = {out.value};
  out.stages = {std::move(inner), std::move(over_x), std::move(over_b), std::move(over_y)};
  return out;
}

ChainGrid grid_from(const BijectionFamilyFunction& f, bool transposed) {
  const int n = f.n();
  ChainGrid g{n, std::vector<double>(static_cast<size_t>(n) * n * n * n, 0.0)};
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (!f(x, y, a, b)) continue;
          // the transposed element has legs e_{b,y}, e_{a,x}: swap roles
          const size_t i = transposed ? static_cast<size_t>(((y * n + x) * n + b) * n + a)
                                      : static_cast<size_t>(((x * n + y) * n + a) * n + b);
          g.magnitude[i] = 1.0;
        }
  return g;
}

void require_chain_shape(const LabeledTensor& t) {
  const auto& f = t.factors();
  if (f.size() != 3 || f[0].kind != FactorKind::RowVec || f[1].kind != FactorKind::FullOperator ||
      f[2].kind != FactorKind::FullOperator || f[1].dim != f[2].dim)
    throw DomainError("chain norm: expected legs (RowVec, FullOperator n, FullOperator n)");
}

// lambda with other = lambda * base, if such a lambda exists.
Complex proportionality(const Matrix& base, const Matrix& other, bool* ok) {
  *ok = false;
  const double bb = base.squaredNorm();
  if (bb == 0.0) return 0.0;
  const Complex lambda = base.conjugate().cwiseProduct(other).sum() / bb;
  *ok = (other - lambda * base).norm() <= 1e-14 * std::max(other.norm(), 1.0);
  return lambda;
}

struct Rep {
  std::vector<Matrix> u, v;
};

int merge_proportional(std::vector<Matrix>& keyed, std::vector<Matrix>& partner) {
  // if keyed[k] = lambda * keyed[j] (j kept earlier), fold partner[k] into partner[j]
  std::vector<Matrix> kk, pp;
  int merged = 0;
  for (size_t k = 0; k < keyed.size(); ++k) {
    if (keyed[k].norm() == 0.0 || partner[k].norm() == 0.0) {
      ++merged;
      continue;
    }
    bool done = false;
    for (size_t j = 0; j < kk.size() && !done; ++j) {
      bool ok = false;
      const Complex lambda = proportionality(kk[j], keyed[k], &ok);
      if (ok) {
        pp[j] += lambda * partner[k];
        done = true;
      }
    }
    if (done) {
      ++merged;
    } else {
      kk.push_back(keyed[k]);
      pp.push_back(partner[k]);
    }
  }
  keyed = std::move(kk);
  partner = std::move(pp);
  return merged;
}

Matrix row_gram(const Rep& r) {
  Matrix s = Matrix::Zero(r.u.front().rows(), r.u.front().rows());
  for (const auto& u : r.u) s += u * u.adjoint();
  return s;
}

Matrix col_gram(const Rep& r) {
  Matrix s = Matrix::Zero(r.v.front().cols(), r.v.front().cols());
  for (const auto& v : r.v) s += v.adjoint() * v;
  return s;
}

double bound_of(const Rep& r) {
  return std::sqrt(std::max(0.0, max_eigenvalue(row_gram(r)))) *
         std::sqrt(std::max(0.0, max_eigenvalue(col_gram(r))));
}

// u'_k = sum_j A_jk u_j, v'_k = sum_j (A^{-1})_kj v_j with G = A A^dag.
Rep remix(const Rep& r, const Matrix& g) {
  Eigen::LLT<Matrix> llt(g);
  const Matrix a = llt.matrixL();
  const Matrix ainv = a.inverse();
  const size_t m = r.u.size();
  Rep out;
  out.u.assign(m, Matrix::Zero(r.u[0].rows(), r.u[0].cols()));
  out.v.assign(m, Matrix::Zero(r.v[0].rows(), r.v[0].cols()));
  for (size_t k = 0; k < m; ++k)
    for (size_t j = 0; j < m; ++j) {
      const auto jj = static_cast<Eigen::Index>(j), ki = static_cast<Eigen::Index>(k);
      if (a(jj, ki) != Complex(0.0)) out.u[k] += a(jj, ki) * r.u[j];
      if (ainv(ki, jj) != Complex(0.0)) out.v[k] += ainv(ki, jj) * r.v[j];
    }
  return out;
}

// Softmax-weighted linearisation of lambda_max(sum_jj' G_jj' X_j X_j'^dag) at G = I:
// returns P with value ~ tr(G P).
Matrix linearise(const std::vector<Matrix>& xs, bool left) {
  const size_t m = xs.size();
  Matrix gram = Matrix::Zero(xs[0].rows(), xs[0].rows());
  if (!left) gram = Matrix::Zero(xs[0].cols(), xs[0].cols());
  for (const auto& x : xs) gram += left ? Matrix(x * x.adjoint()) : Matrix(x.adjoint() * x);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gram + gram.adjoint()));
  const auto& ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  Matrix p = Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  if (top <= 0.0) return p;
  constexpr double kSharpness = 30.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double w = std::exp(kSharpness * (ev(i) / top - 1.0));
    if (w < 1e-10) continue;
    const Vector psi = es.eigenvectors().col(i);
    std::vector<Vector> alpha;
    alpha.reserve(m);
    for (const auto& x : xs) alpha.push_back(left ? Vector(x.adjoint() * psi) : Vector(x * psi));
    for (size_t j = 0; j < m; ++j)
      for (size_t k = 0; k < m; ++k)
        p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) += w * alpha[j].dot(alpha[k]);
  }
  return p;
}

Matrix spd_power(const Matrix& g, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues().array().max(1e-300).pow(t).matrix();
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double norm_r_x_r(std::span<const double> block_norms) {
  require_block_norms(block_norms);
  double s = 0.0;
  for (double x : block_norms) s += x * x;
  return std::sqrt(s);
}

double norm_r_x_c(std::span<const double> block_norms) {
  require_block_norms(block_norms);
  return std::accumulate(block_norms.begin(), block_norms.end(), 0.0);
}

BijectionFamilyFunction::BijectionFamilyFunction(int n, std::vector<bool> table)
    : n_(n), table_(std::move(table)) {
  if (n < 1) throw DomainError("bijection family: n must be positive");
  if (table_.size() != static_cast<size_t>(n) * n * n * n)
    throw DomainError("bijection family: table must have n^4 entries");
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      std::vector<int> row_count(static_cast<size_t>(n), 0), col_count(static_cast<size_t>(n), 0);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if ((*this)(x, y, a, b)) {
            ++row_count[static_cast<size_t>(a)];
            ++col_count[static_cast<size_t>(b)];
          }
      for (int i = 0; i < n; ++i)
        if (row_count[static_cast<size_t>(i)] != 1 || col_count[static_cast<size_t>(i)] != 1)
          throw DomainError("bijection family: (x,y) = (" + std::to_string(x) + "," +
                            std::to_string(y) + ") is not a bijection");
    }
}

bool BijectionFamilyFunction::operator()(int x, int y, int a, int b) const {
  return table_[static_cast<size_t>(((x * n_ + y) * n_ + a) * n_ + b)];
}

BijectionFamilyFunction BijectionFamilyFunction::from_permutations(
    int n, const std::vector<std::vector<int>>& perms) {
  if (perms.size() != static_cast<size_t>(n) * n)
    throw DomainError("bijection family: need n^2 permutations");
  std::vector<bool> table(static_cast<size_t>(n) * n * n * n, false);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const auto& p = perms[static_cast<size_t>(x * n + y)];
      if (p.size() != static_cast<size_t>(n)) throw DomainError("bijection family: bad permutation length");
      for (int a = 0; a < n; ++a) {
        const int b = p[static_cast<size_t>(a)];
        if (b < 0 || b >= n) throw DomainError("bijection family: permutation value out of range");
        table[static_cast<size_t>(((x * n + y) * n + a) * n + b)] = true;
      }
    }
  return BijectionFamilyFunction(n, std::move(table));
}

BijectionFamilyFunction BijectionFamilyFunction::chsh(int n) {
  std::vector<std::vector<int>> perms;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      std::vector<int> p(static_cast<size_t>(n));
      for (int a = 0; a < n; ++a) p[static_cast<size_t>(a)] = (((x * y - a) % n) + n) % n;
      perms.push_back(std::move(p));
    }
  return from_permutations(n, perms);
}

std::string to_string(Aggregation a) {
  switch (a) {
    case Aggregation::L2Sum: return "l2-sum";
    case Aggregation::L1Sum: return "l1-sum";
    case Aggregation::InnerNorm: return "inner-norm";
  }
  return "?";
}

double HaagerupChainValue::recompose() const {
  if (stages.size() != 4) return std::nan("");
  const auto& inner = stages[0].values;
  const size_t total = inner.size();
  const auto n = static_cast<size_t>(std::llround(std::cbrt(static_cast<double>(total))));
  if (n * n * n != total) return std::nan("");
  std::vector<double> per_y;
  for (size_t y = 0; y < n; ++y) {
    std::vector<double> per_b;
    for (size_t b = 0; b < n; ++b)
      per_b.push_back(norm_r_x_r(std::span(inner).subspan((y * n + b) * n, n)));
    per_y.push_back(norm_r_x_c(per_b));
  }
  return norm_r_x_r(per_y);
}

HaagerupChainValue xi_chain_norm(const BijectionFamilyFunction& f) {
  return evaluate_chain(grid_from(f, false));
}

HaagerupChainValue xi_transposed_chain_norm(const BijectionFamilyFunction& f) {
  return evaluate_chain(grid_from(f, true));
}

LabeledTensor xi_tensor(const BijectionFamilyFunction& f) {
  const int n = f.n();
  std::vector<FactorSpec> legs = {FactorSpec::make(FactorKind::RowVec, {n, n, n, n}),
                                  FactorSpec::make(FactorKind::FullOperator, n),
                                  FactorSpec::make(FactorKind::FullOperator, n)};
  std::vector<LabeledTensor::Term> terms;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (f(x, y, a, b)) terms.push_back({{x, y, a, b, a, x, b, y}, 1.0});
  return LabeledTensor::from_terms(std::move(legs), std::move(terms));
}

HaagerupChainValue chain_norm(const LabeledTensor& t) {
  require_chain_shape(t);
  const int n = t.factors()[1].dim;
  const int off = t.offset(1);
  ChainGrid g{n, std::vector<double>(static_cast<size_t>(n) * n * n * n, 0.0)};
  std::vector<bool> used(g.magnitude.size(), false);
  std::set<Index> rows;
  for (const auto& [idx, v] : t.entries()) {
    const int a = idx[static_cast<size_t>(off)], x = idx[static_cast<size_t>(off + 1)];
    const int b = idx[static_cast<size_t>(off + 2)], y = idx[static_cast<size_t>(off + 3)];
    const auto i = static_cast<size_t>(((x * n + y) * n + a) * n + b);
    if (used[i]) throw DomainError("chain norm: matrix-leg labels repeat across rows");
    if (!rows.insert(Index(idx.begin(), idx.begin() + off)).second)
      throw DomainError("chain norm: row label carries more than one entry");
    used[i] = true;
    g.magnitude[i] = std::abs(v);
  }
  return evaluate_chain(g);
}

BalanceResult balance_haagerup_upper(std::span<const Matrix> u, std::span<const Matrix> v,
                                     double tol, int max_iter) {
  if (u.size() != v.size()) throw DomainError("balance: u and v must have equal length");
  if (!(tol > 0.0)) throw DomainError("balance: tol must be positive");
  for (size_t k = 1; k < u.size(); ++k)
    if (u[k].rows() != u[0].rows() || u[k].cols() != u[0].cols() || v[k].rows() != v[0].rows() ||
        v[k].cols() != v[0].cols())
      throw DomainError("balance: ragged factor shapes");

  BalanceResult res;
  Rep rep{std::vector<Matrix>(u.begin(), u.end()), std::vector<Matrix>(v.begin(), v.end())};
  res.merged_terms += merge_proportional(rep.v, rep.u);
  res.merged_terms += merge_proportional(rep.u, rep.v);
  if (rep.u.empty()) return res;

  double current = bound_of(rep);
  res.initial_value = current;
  const auto m = static_cast<Eigen::Index>(rep.u.size());
  constexpr double kEps = 1e-12;

  for (int it = 0; it < max_iter; ++it) {
    Matrix p = linearise(rep.u, true);
    Matrix q = linearise(rep.v, false);
    const double ps = std::max(p.norm(), 1e-300), qs = std::max(q.norm(), 1e-300);
    if (min_eigenvalue(p) < kEps * ps || min_eigenvalue(q) < kEps * qs) res.regularized = true;
    p += kEps * ps * Matrix::Identity(m, m);
    q += kEps * qs * Matrix::Identity(m, m);

    // argmin_G tr(G P) tr(G^{-1} Q) is the geometric mean P^{-1} # Q
    const Matrix ph = spd_power(p, 0.5), pih = spd_power(p, -0.5);
    Matrix target = pih * spd_power(ph * q * ph, 0.5) * pih;
    target /= target.trace().real() / static_cast<double>(m);

    bool accepted = false;
    for (double step = 1.0; step > 1.0 / 1024; step *= 0.5) {
      Rep trial = remix(rep, spd_power(target, step));
      const double val = bound_of(trial);
      if (std::isfinite(val) && val <= current * (1.0 - tol)) {
        res.last_decrease = (current - val) / current;
        rep = std::move(trial);
        current = val;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    ++res.iterations;
  }
  res.value = current;
  return res;
}

ColumnRepresentation column_representation(const LabeledTensor& t) {
  require_chain_shape(t);
  const int n = t.factors()[1].dim;
  const int off = t.offset(1);
  const auto count = static_cast<Eigen::Index>(t.nnz());
  ColumnRepresentation rep;
  rep.row_weight = std::sqrt(static_cast<double>(count));
  Eigen::Index k = 0;
  for (const auto& [idx, val] : t.entries()) {
    Matrix left = Matrix::Zero(count * n, n);
    left(k * n + idx[static_cast<size_t>(off)], idx[static_cast<size_t>(off + 1)]) = val;
    rep.left.push_back(std::move(left));
    rep.right.push_back(matrix_unit(n, n, idx[static_cast<size_t>(off + 2)], idx[static_cast<size_t>(off + 3)]));
    ++k;
  }
  return rep;
}

BalanceResult balanced_upper_bound(const LabeledTensor& t, double tol, int max_iter) {
  ColumnRepresentation rep = column_representation(t);
  BalanceResult r = balance_haagerup_upper(rep.left, rep.right, tol, max_iter);
  r.value *= rep.row_weight;
  r.initial_value *= rep.row_weight;
  return r;
}

}  // namespace osgap
