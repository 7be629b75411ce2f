#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "osgap/weyl.hpp"

using namespace osgap;

TEST_SUITE("weyl_kit") {
  TEST_CASE("n = 1 is the scalar identity") {
    const WeylFamily f = make_weyl_family(1);
    CHECK(f.clock()(0, 0) == Complex(1.0));
    CHECK(f.shift()(0, 0) == Complex(1.0));
    CHECK(f.weyl(0, 0)(0, 0) == Complex(1.0));
  }

  TEST_CASE("rejects n = 0") { CHECK_THROWS_AS(make_weyl_family(0), DomainError); }

  TEST_CASE("n = 2 clock and shift") {
    const WeylFamily f(2);
    Matrix clock(2, 2), shift(2, 2);
    clock << 1, 0, 0, -1;
    shift << 0, 1, 1, 0;
    CHECK((f.clock() - clock).norm() == 0.0);
    CHECK((f.shift() - shift).norm() == 0.0);
  }

  TEST_CASE("clock multiplies e_j by w^j, shift sends e_j to e_{j+1}") {
    const int n = 5;
    const WeylFamily f(n);
    for (int j = 0; j < n; ++j) {
      Vector e = Vector::Zero(n);
      e(j) = 1.0;
      const Vector xe = f.clock() * e;
      const Vector ze = f.shift() * e;
      CHECK(std::abs(xe(j) - std::polar(1.0, 2 * M_PI * j / n)) < 1e-15);
      CHECK(std::abs(ze((j + 1) % n) - 1.0) < 1e-15);
      CHECK(ze.norm() == doctest::Approx(1.0));
    }
  }

  TEST_CASE("n = 3 commutation against explicit multiplication") {
    const WeylFamily f(3);
    const Matrix& x = f.clock();
    const Matrix& z = f.shift();
    Matrix xz = Matrix::Zero(3, 3), zx = Matrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          xz(i, j) += x(i, k) * z(k, j);
          zx(i, j) += z(i, k) * x(k, j);
        }
    CHECK((xz - f.omega() * zx).norm() < 1e-12);
  }

  TEST_CASE("unitarity, closed form and braiding up to n = 7") {
    for (int n : {2, 3, 4, 5, 7}) {
      const WeylFamily f(n);
      const Matrix id = Matrix::Identity(n, n);
      CHECK(testing::svd_norm(f.clock().adjoint() * f.clock() - id) < 1e-12);
      CHECK(testing::svd_norm(f.shift().adjoint() * f.shift() - id) < 1e-12);
      Matrix xk = id;
      for (int k = 0; k < n; ++k) {
        Matrix zl = id;
        for (int l = 0; l < n; ++l) {
          const Matrix& t = f.weyl(k, l);
          CHECK(testing::svd_norm(t.adjoint() * t - id) < 1e-12);
          CHECK((xk * zl - t).norm() < 1e-12);
          zl = zl * f.shift();
        }
        xk = xk * f.clock();
      }
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (int k2 = 0; k2 < n; ++k2)
            for (int l2 = 0; l2 < n; ++l2) {
              const Matrix& a = f.weyl(k, l);
              const Matrix& b = f.weyl(k2, l2);
              const Complex w = f.phase(static_cast<long long>(l2) * k - static_cast<long long>(l) * k2);
              CHECK((a * b - w * b * a).norm() < 1e-12);
            }
    }
  }

  TEST_CASE("indices reduce mod n and phases are exact for large exponents") {
    const WeylFamily f(5);
    CHECK((f.weyl(7, -3) - f.weyl(2, 2)).norm() == 0.0);
    CHECK(std::abs(f.phase(5LL * 1000000007LL) - 1.0) == 0.0);
    CHECK(std::abs(unit_root(4, 1) - Complex(0, 1)) == 0.0);
    CHECK(std::abs(unit_root(4, 2) - Complex(-1, 0)) == 0.0);
  }

  TEST_CASE("Bell basis at n = 2, (0,0) is phi") {
    const BellBasis b = bell_basis(WeylFamily(2));
    const double s = 1 / std::sqrt(2.0);
    Vector expect = Vector::Zero(4);
    expect(0) = s;
    expect(3) = s;
    CHECK((b.at(0, 0) - expect).norm() < 1e-15);
    CHECK((b.phi - expect).norm() < 1e-15);
  }

  TEST_CASE("Bell Gram is the identity by direct inner products") {
    for (int n : {2, 3, 5, 7, 11, 13}) {
      const WeylFamily f(n);
      const BellBasis b = bell_basis(f);
      const int n2 = n * n;
      REQUIRE(b.vectors.size() == static_cast<size_t>(n2));
      Matrix g(n2, n2);
      for (int p = 0; p < n2; ++p)
        for (int q = 0; q < n2; ++q) {
          Complex s = 0;
          for (int i = 0; i < n2; ++i) s += std::conj(b.vectors[p](i)) * b.vectors[q](i);
          g(p, q) = s;
        }
      CHECK((g - Matrix::Identity(n2, n2)).norm() < 1e-12);
      CHECK((b.gram() - Matrix::Identity(n2, n2)).norm() < 1e-12);
      // eta_kl = (T_kl (x) Id) phi
      const Matrix lift = kron(f.weyl(1, 1 % n), Matrix::Identity(n, n));
      CHECK((b.at(1, 1 % n) - lift * b.phi).norm() < 1e-13);
    }
  }

  TEST_CASE("teleportation identity") {
    const WeylFamily f2(2);
    Vector e0 = Vector::Zero(2);
    e0(0) = 1.0;
    CHECK(teleportation_residual(f2, e0) < 1e-12);
    for (int n : {2, 3, 5, 7})
      CHECK(teleportation_residual(WeylFamily(n), Vector::Zero(n)) == 0.0);

    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int s = 0; s < 100; ++s)
      worst = std::max(worst, teleportation_residual(WeylFamily(3), testing::random_unit_vector(rng, 3)));
    CHECK(worst < 1e-12);

    for (int n : {2, 3, 5, 7, 11, 13}) {
      const WeylFamily f(n);
      for (int j = 0; j < n; ++j) {
        Vector e = Vector::Zero(n);
        e(j) = 1.0;
        CHECK(teleportation_residual(f, e) < 1e-12);
      }
      for (int s = 0; s < 100; ++s) CHECK(teleportation_residual(f, testing::random_unit_vector(rng, n)) < 1e-12);
    }
    CHECK_THROWS_AS(teleportation_residual(f2, Vector::Zero(3)), DomainError);
  }

  TEST_CASE("rank-one frame identity") {
    const WeylFamily f(2);
    CHECK(rank_one_frame_residual(f, Matrix::Identity(2, 2)) < 1e-12);
    CHECK(rank_one_frame_residual(f, matrix_unit(2, 2, 0, 1)) < 1e-12);
    CHECK(rank_one_frame_residual(f, Matrix::Zero(2, 2)) == 0.0);
    CHECK_THROWS_AS(rank_one_frame_residual(f, Matrix::Zero(3, 3)), DomainError);

    std::mt19937_64 rng(5);
    for (int n : {3, 5, 7}) {
      const Matrix rho = testing::random_matrix(rng, n, n);
      CHECK(rank_one_frame_residual(WeylFamily(n), rho) < 1e-11 * rho.norm());
    }
  }

  TEST_CASE("frame identity against a dense reconstruction at n = 3") {
    const int n = 3;
    const WeylFamily f(n);
    const BellBasis b = bell_basis(f);
    std::mt19937_64 rng(9);
    const Matrix rho = testing::random_matrix(rng, n, n);
    const Matrix lhs = kron(rho, unnormalized_max_entangled(n));
    Matrix rhs = Matrix::Zero(n * n * n, n * n * n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int k2 = 0; k2 < n; ++k2)
          for (int l2 = 0; l2 < n; ++l2)
            rhs += kron(b.at(k, l) * b.at(k2, l2).adjoint(), f.weyl(k, l).adjoint() * rho * f.weyl(k2, l2));
    rhs /= static_cast<double>(n);
    CHECK((lhs - rhs).norm() < 1e-12);
    CHECK(rank_one_frame_residual(f, rho) < 1e-12);
  }
}
