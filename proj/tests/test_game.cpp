#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "osgap/counterexample.hpp"
#include "osgap/game.hpp"
#include "osgap/weyl.hpp"

using namespace osgap;

namespace {

OperatorFamily constant_family(int n, int d, const std::function<Matrix(int, int)>& block) {
  OperatorFamily f;
  f.n = n;
  f.d = d;
  for (int a = 0; a < n; ++a)
    for (int x = 0; x < n; ++x) f.blocks.push_back(block(a, x));
  return f;
}

/// Blocks of a Haar unitary: a complete contraction with sum_a E_x^a = I.
OperatorFamily unitary_family(std::mt19937_64& rng, int n, int d) {
  const Matrix u = testing::random_unitary(rng, static_cast<Eigen::Index>(n) * d);
  return constant_family(n, d, [&](int a, int x) { return Matrix(u.block(a * d, x * d, d, d)); });
}

/// Direct dense evaluation of ||sum_{a+b=xy} E_x^a (x) F_y^b||^{1/2}.
double dense_value(const Strategy& s) {
  const int n = s.alice.n;
  Matrix total = Matrix::Zero(s.alice.d * s.bob.d, s.alice.d * s.bob.d);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if ((a + b) % n != (x * y) % n) continue;
          const Matrix z = kron(s.alice.at(a, x), s.bob.at(b, y));
          total += z.adjoint() * z;
        }
  return std::sqrt(testing::svd_norm(total));
}

}  // namespace

TEST_SUITE("game_bound") {
  TEST_CASE("cb norm examples") {
    const auto single = constant_family(2, 3, [](int a, int x) {
      return a == 0 && x == 0 ? Matrix(Matrix::Identity(3, 3)) : Matrix(Matrix::Zero(3, 3));
    });
    CHECK(cb_norm_to_matrices(single) == doctest::Approx(1.0));
    CHECK(cb_norm_to_matrices(constant_family(2, 2, [](int, int) { return Matrix(Matrix::Zero(2, 2)); })) == 0.0);
    std::mt19937_64 rng(1);
    const Matrix u = testing::random_unitary(rng, 2);
    const auto f = constant_family(2, 2, [&](int, int) { return Matrix(u / 2.0); });
    CHECK(std::abs(cb_norm_to_matrices(f) - testing::svd_norm(f.block_matrix())) < 1e-12);
    auto ragged = f;
    ragged.blocks[1] = Matrix::Zero(3, 3);
    CHECK_THROWS_AS(cb_norm_to_matrices(ragged), DomainError);
  }

  TEST_CASE("POVM extraction") {
    std::mt19937_64 rng(2);
    std::vector<Matrix> us;
    for (int x = 0; x < 3; ++x) us.push_back(testing::random_unitary(rng, 2));
    // one unitary per x, on outcome a = x, so the block matrix is block diagonal
    const auto proj = constant_family(3, 2, [&](int a, int x) {
      return a == x ? us[x] : Matrix(Matrix::Zero(2, 2));
    });
    const Povm p = povm_from_contraction(proj);
    for (int x = 0; x < 3; ++x) {
      CHECK((p.at(x, x) - Matrix::Identity(2, 2)).norm() < 1e-12);
      CHECK(p.at(x, (x + 1) % 3).norm() < 1e-15);
    }
    // a single outcome carrying a unitary for every x is not a contraction
    const auto row = constant_family(3, 2, [&](int a, int x) { return a == 0 ? us[x] : Matrix(Matrix::Zero(2, 2)); });
    CHECK(cb_norm_to_matrices(row) == doctest::Approx(std::sqrt(3.0)));
    CHECK_THROWS_AS(povm_from_contraction(row), DomainError);
    CHECK(std::abs(povm_completeness_gap(p)) < 1e-12);

    const Povm zero = povm_from_contraction(constant_family(2, 2, [](int, int) { return Matrix(Matrix::Zero(2, 2)); }));
    for (const auto& e : zero.elements) CHECK(e.norm() == 0.0);

    for (int s = 0; s < 100; ++s) {
      const Povm q = povm_from_contraction(sample_contraction(3, 4, derive_seed(99, s)));
      CHECK(povm_completeness_gap(q) >= -1e-12);
      CHECK(povm_min_eigenvalue(q) >= -1e-12);
    }
    const auto big = constant_family(2, 1, [](int, int) { return Matrix(Matrix::Constant(1, 1, 1.0)); });
    CHECK_THROWS_AS(povm_from_contraction(big), DomainError);
  }

  TEST_CASE("weighted POVM norms") {
    std::mt19937_64 rng(3);
    const Povm proj = povm_from_contraction(unitary_family(rng, 3, 2));
    const std::vector<Complex> ones(3, 1.0), zeros(3, 0.0);
    for (int x = 0; x < 3; ++x) {
      CHECK(std::abs(weighted_povm_norm(proj, x, ones) - 1.0) < 1e-12);
      CHECK(weighted_povm_norm(proj, x, zeros) == 0.0);
    }
    for (int s = 0; s < 50; ++s) {
      const Povm p = povm_from_contraction(sample_contraction(5, 3, derive_seed(7, s)));
      CHECK(max_fourier_weighted_norm(p) <= 1.0 + 1e-12);
    }
    const std::vector<Complex> too_big = {2.0, 0.0, 0.0};
    CHECK_THROWS_AS(weighted_povm_norm(proj, 0, too_big), DomainError);
  }

  TEST_CASE("Fourier matrices") {
    const auto f21 = fourier_matrix(2, 1);
    Matrix h(2, 2);
    h << 1, 1, 1, -1;
    CHECK((f21.matrix - h).norm() < 1e-15);
    CHECK(std::abs(f21.norm - std::sqrt(2.0)) < 1e-12);
    const auto f30 = fourier_matrix(3, 0);
    CHECK((f30.matrix - Matrix::Ones(3, 3)).norm() < 1e-15);
    CHECK(std::abs(f30.norm - 3.0) < 1e-10);
    const auto f52 = fourier_matrix(5, 2);
    CHECK(std::abs(f52.norm - std::sqrt(5.0)) < 1e-10);
    CHECK(std::abs(testing::svd_norm(f52.matrix) - std::sqrt(5.0)) < 1e-10);
    for (int n : {2, 3, 5, 7, 11, 13})
      for (int k = 1; k < n; ++k) CHECK(std::abs(fourier_matrix(n, k).norm - std::sqrt(double(n))) < 1e-10);
    CHECK_THROWS_AS(fourier_matrix(3, 3), DomainError);
    CHECK_THROWS_AS(fourier_matrix(3, -1), DomainError);
  }

  TEST_CASE("analytic bounds") {
    const auto b2 = chsh_upper_bound(2);
    CHECK(b2.sharp == doctest::Approx(1.847759).epsilon(1e-6));
    CHECK(b2.stated == doctest::Approx(2.378414).epsilon(1e-6));
    CHECK(std::abs(b2.sharp * b2.sharp - (2 + std::sqrt(2.0))) < 1e-12);
    CHECK(chsh_upper_bound(5).stated == doctest::Approx(4.728708).epsilon(1e-6));
    for (int n : {2, 3, 5, 7, 11, 13}) CHECK(chsh_upper_bound(n).sharp <= chsh_upper_bound(n).stated);
    CHECK_THROWS_AS(chsh_upper_bound(4), DomainError);
  }

  TEST_CASE("strategy evaluation") {
    const auto eta2 = build_eta(2);
    Strategy zero{constant_family(2, 2, [](int, int) { return Matrix(Matrix::Zero(2, 2)); }),
                  constant_family(2, 2, [](int, int) { return Matrix(Matrix::Zero(2, 2)); })};
    CHECK(evaluate_strategy(eta2, zero) == 0.0);

    const double r = 1 / std::sqrt(2.0);
    Strategy s{constant_family(2, 1, [&](int a, int) { return Matrix(Matrix::Constant(1, 1, a == 0 ? r : 0.0)); }),
               constant_family(2, 1, [&](int b, int) { return Matrix(Matrix::Constant(1, 1, b == 0 ? r : 0.0)); })};
    // only (x,y) with xy = 0 contribute, each with weight 1/4
    CHECK(std::abs(evaluate_strategy(eta2, s) - std::sqrt(0.75)) < 1e-12);
    CHECK(evaluate_strategy(eta2, s) <= chsh_upper_bound(2).sharp);

    std::mt19937_64 rng(4);
    for (int n : {2, 3}) {
      const auto eta = build_eta(n);
      for (int t = 0; t < 10; ++t) {
        const Strategy st = sample_strategy(n, 2, 3, derive_seed(5, t));
        CHECK(std::abs(evaluate_strategy(eta, st) - dense_value(st)) < 1e-12);
        const Strategy su{unitary_family(rng, n, 2), unitary_family(rng, n, 2)};
        CHECK(std::abs(evaluate_strategy(eta, su) - dense_value(su)) < 1e-12);
      }
    }
    CHECK_THROWS_AS(evaluate_strategy(build_p(2), s), DomainError);
    CHECK_THROWS_AS(evaluate_strategy(build_eta(3), s), DomainError);
  }

  TEST_CASE("sampled and projective strategies respect the sharp bound") {
    std::mt19937_64 rng(6);
    for (int n : {2, 3, 5}) {
      const auto eta = build_eta(n);
      const double sharp = chsh_upper_bound(n).sharp;
      double best = 0.0;
      for (int t = 0; t < 200; ++t) {
        const Strategy st = sample_strategy(n, n, n, derive_seed(8, t));
        CHECK(cb_norm_to_matrices(st.alice) <= 1.0 + 1e-12);
        best = std::max(best, evaluate_strategy(eta, st));
      }
      for (int t = 0; t < 50; ++t)
        best = std::max(best, evaluate_strategy(eta, Strategy{unitary_family(rng, n, 2), unitary_family(rng, n, 2)}));
      CHECK(best <= sharp + 1e-9);
    }
  }

  TEST_CASE("Fourier decomposition residual") {
    const Povm z2{2, 2, std::vector<Matrix>(4, Matrix::Zero(2, 2))};
    CHECK(fourier_decomposition_residual(z2, z2) == 0.0);
    std::mt19937_64 rng(7);
    const Povm p2 = povm_from_contraction(sample_contraction(2, 2, 1));
    const Povm q2 = povm_from_contraction(sample_contraction(2, 2, 2));
    CHECK(fourier_decomposition_residual(p2, q2) < 1e-12);
    CHECK(fourier_decomposition_residual(p2, q2, Composition::TensorSplit) < 1e-12);
    const Povm p5 = povm_from_contraction(sample_contraction(5, 3, 3));
    const Povm q5 = povm_from_contraction(sample_contraction(5, 3, 4));
    CHECK(fourier_decomposition_residual(p5, q5) < 1e-11);
    CHECK(fourier_decomposition_residual(p5, q5, Composition::TensorSplit) < 1e-11);
    const Povm q53 = povm_from_contraction(sample_contraction(5, 2, 4));
    CHECK_THROWS_AS(fourier_decomposition_residual(p5, q53), DomainError);
    CHECK(fourier_decomposition_residual(p5, q53, Composition::TensorSplit) < 1e-11);
    CHECK_THROWS_AS(fourier_decomposition_residual(p5, p2), DomainError);
  }

  TEST_CASE("unitary dilation") {
    const Matrix id = Matrix::Identity(2, 2);
    const Matrix u0 = unitary_dilation(Matrix::Zero(2, 2));
    Matrix expect0 = Matrix::Zero(4, 4);
    expect0.topRightCorner(2, 2) = -id;
    expect0.bottomLeftCorner(2, 2) = id;
    CHECK((u0 - expect0).norm() < 1e-14);
    CHECK((unitary_dilation(id) - Matrix::Identity(4, 4)).norm() < 1e-14);
    for (int s = 0; s < 100; ++s) {
      const Matrix t = sample_contraction(1, 3, derive_seed(12, s)).blocks[0];
      const Matrix u = unitary_dilation(t);
      CHECK(testing::svd_norm(u.adjoint() * u - Matrix::Identity(6, 6)) < 1e-10);
      CHECK((u.topLeftCorner(3, 3) - t).norm() == 0.0);
    }
    CHECK_THROWS_AS(unitary_dilation(2.0 * id), DomainError);
  }

  TEST_CASE("sampler is seed-deterministic and dumps round-trip") {
    const Strategy a = sample_strategy(3, 2, 2, 42);
    const Strategy b = sample_strategy(3, 2, 2, 42);
    const Strategy c = sample_strategy(3, 2, 2, 43);
    CHECK((a.alice.block_matrix() - b.alice.block_matrix()).norm() == 0.0);
    CHECK((a.alice.block_matrix() - c.alice.block_matrix()).norm() > 0.0);
    CHECK(derive_seed(1, 2) != derive_seed(2, 1));
    std::stringstream ss;
    write_strategy(ss, a);
    const Strategy back = read_strategy(ss);
    CHECK((back.alice.block_matrix() - a.alice.block_matrix()).norm() == 0.0);
    CHECK((back.bob.block_matrix() - a.bob.block_matrix()).norm() == 0.0);
    CHECK(evaluate_strategy(build_eta(3), back) == evaluate_strategy(build_eta(3), a));
  }
}
