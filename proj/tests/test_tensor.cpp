#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "osgap/counterexample.hpp"
#include "osgap/labeled_tensor.hpp"
#include "osgap/weyl.hpp"

using namespace osgap;

namespace {

std::vector<FactorSpec> primal_legs() {
  return {FactorSpec::make(FactorKind::ColVec, {2, 3}), FactorSpec::make(FactorKind::TraceClass, 3),
          FactorSpec::make(FactorKind::DiagL1, {2, 2}), FactorSpec::make(FactorKind::TraceClass, 2)};
}

std::vector<FactorSpec> dual_legs() {
  std::vector<FactorSpec> out;
  for (auto f : primal_legs()) {
    f.kind = dual_kind(f.kind);
    out.push_back(f);
  }
  return out;
}

LabeledTensor random_tensor(std::mt19937_64& rng, std::vector<FactorSpec> legs, int terms) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<LabeledTensor::Term> out;
  for (int t = 0; t < terms; ++t) {
    Index idx;
    for (const auto& f : legs)
      for (int c = 0; c < f.arity(); ++c) idx.push_back(std::uniform_int_distribution<int>(0, f.extent(c) - 1)(rng));
    out.push_back({idx, Complex(u(rng), u(rng))});
  }
  return LabeledTensor::from_terms(std::move(legs), std::move(out));
}

bool same(const LabeledTensor& a, const LabeledTensor& b, double eps = 0.0) {
  if (a.factors() != b.factors() || a.nnz() != b.nnz()) return false;
  for (const auto& [idx, v] : a.entries())
    if (std::abs(b.at(idx) - v) > eps) return false;
  return true;
}

}  // namespace

TEST_SUITE("tensor_space") {
  TEST_CASE("factor specs and duality") {
    CHECK(dual_kind(FactorKind::RowVec) == FactorKind::ColVec);
    CHECK(dual_kind(FactorKind::TraceClass) == FactorKind::FullOperator);
    CHECK(dual_kind(FactorKind::DiagL1) == FactorKind::DiagLinf);
    CHECK(dual_compatible(FactorSpec::make(FactorKind::TraceClass, 3), FactorSpec::make(FactorKind::FullOperator, 3)));
    CHECK_FALSE(dual_compatible(FactorSpec::make(FactorKind::TraceClass, 3), FactorSpec::make(FactorKind::FullOperator, 2)));
    CHECK_FALSE(dual_compatible(FactorSpec::make(FactorKind::TraceClass, 3), FactorSpec::make(FactorKind::TraceClass, 3)));
    CHECK(FactorSpec::make(FactorKind::ColVec, {2, 3}).dim == 6);
    for (auto k : {FactorKind::RowVec, FactorKind::ColVec, FactorKind::TraceClass, FactorKind::FullOperator,
                   FactorKind::DiagL1, FactorKind::DiagLinf})
      CHECK(factor_kind_from_string(to_string(k)) == k);
  }

  TEST_CASE("canonical form: merge, prune, bounds") {
    const std::vector<FactorSpec> legs = {FactorSpec::make(FactorKind::TraceClass, 2)};
    const auto t = LabeledTensor::from_terms(legs, {{{0, 1}, 1.0}, {{0, 1}, 2.0}, {{1, 1}, 1e-16}, {{1, 0}, 1.0},
                                                    {{1, 0}, -1.0}});
    CHECK(t.nnz() == 1);
    CHECK(t.at({0, 1}) == Complex(3.0));
    CHECK(t.at({1, 1}) == Complex(0.0));
    CHECK_THROWS_AS(LabeledTensor::from_terms(legs, {{{2, 0}, 1.0}}), DomainError);
    CHECK_THROWS_AS(LabeledTensor::from_terms(legs, {{{0}, 1.0}}), DomainError);
  }

  TEST_CASE("pair of matching units") {
    const auto t = LabeledTensor::from_terms({FactorSpec::make(FactorKind::TraceClass, 2)}, {{{0, 0}, 1.0}});
    const auto s = LabeledTensor::from_terms({FactorSpec::make(FactorKind::FullOperator, 2)}, {{{0, 0}, 1.0}});
    CHECK(pair(t, s) == Complex(1.0));
    CHECK_THROWS_AS(pair(t, t), DomainError);
  }

  TEST_CASE("pair of eta and P") {
    CHECK(std::abs(pair(build_eta(2), build_p(2)) - 2.0) < 1e-12);
    CHECK(std::abs(pair(build_eta(3), build_p(3)) - 3.0) < 1e-12);
    // independent count: (1/9) #{a+b=xy mod 3}
    int count = 0;
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) count += (a + b) % 3 == (x * y) % 3;
    CHECK(count / 9.0 == doctest::Approx(3.0));
  }

  TEST_CASE("pair is bilinear and conjugation-free") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
      const auto t1 = random_tensor(rng, primal_legs(), 15);
      const auto t2 = random_tensor(rng, primal_legs(), 15);
      const auto s = random_tensor(rng, dual_legs(), 30);
      const Complex a(0.3, -1.2), b(-0.7, 0.4);
      std::vector<LabeledTensor::Term> terms;
      for (const auto& [i, v] : t1.entries()) terms.push_back({i, a * v});
      for (const auto& [i, v] : t2.entries()) terms.push_back({i, b * v});
      const auto combo = LabeledTensor::from_terms(primal_legs(), terms);
      const Complex lhs = pair(combo, s);
      const Complex rhs = a * pair(t1, s) + b * pair(t2, s);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
      CHECK(std::abs(pair(t1.scaled(Complex(0, 1)), s) - Complex(0, 1) * pair(t1, s)) < 1e-12);
    }
  }

  TEST_CASE("swap_factors") {
    std::mt19937_64 rng(2);
    const auto t = random_tensor(rng, primal_legs(), 20);
    const std::vector<int> id = {0, 1, 2, 3};
    CHECK(same(swap_factors(t, id), t));
    const std::vector<int> tr = {0, 3, 2, 1};
    const auto once = swap_factors(t, tr);
    CHECK(once.factors()[1] == t.factors()[3]);
    CHECK(same(swap_factors(once, tr), t));
    const std::vector<int> cyc = {2, 0, 3, 1};
    CHECK(same(swap_factors(swap_factors(t, cyc), inverse_permutation(cyc)), t));
    for (int trial = 0; trial < 50; ++trial) {
      const auto a = random_tensor(rng, primal_legs(), 12);
      const auto b = random_tensor(rng, dual_legs(), 12);
      std::vector<int> perm = {0, 1, 2, 3};
      std::shuffle(perm.begin(), perm.end(), rng);
      CHECK(std::abs(pair(swap_factors(a, perm), swap_factors(b, perm)) - pair(a, b)) < 1e-12);
    }
    const std::vector<int> bad = {0, 0, 1, 2};
    CHECK_THROWS_AS(swap_factors(t, bad), DomainError);
    const std::vector<int> short_perm = {0, 1};
    CHECK_THROWS_AS(swap_factors(t, short_perm), DomainError);
  }

  TEST_CASE("transpose_tail") {
    const auto eta = build_eta(2);
    const auto tt = transpose_tail(eta);
    for (const auto& [idx, v] : eta.entries()) {
      const Index expect = {idx[0], idx[1], idx[2], idx[3], idx[6], idx[7], idx[4], idx[5]};
      CHECK(tt.at(expect) == v);
    }
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_tensor(rng, primal_legs(), 10);
      const auto b = random_tensor(rng, dual_legs(), 10);
      CHECK(same(transpose_tail(transpose_tail(a)), a));
      CHECK(std::abs(pair(transpose_tail(a), transpose_tail(b)) - pair(a, b)) < 1e-12);
    }
    CHECK_THROWS_AS(transpose_tail(LabeledTensor::from_terms({FactorSpec::make(FactorKind::ColVec, 2)}, {})),
                    DomainError);
  }

  TEST_CASE("apply_factorwise: identity and scalar maps") {
    std::mt19937_64 rng(4);
    const auto t = random_tensor(rng, primal_legs(), 20);
    const FactorSpec leg = t.factors()[1];
    FactorMap identity{leg, {leg}, [&](const Index& b) { return LabeledTensor::from_terms({leg}, {{b, 1.0}}); }};
    CHECK(same(apply_factorwise(t, 1, identity), t));
    FactorMap twice{leg, {leg}, [&](const Index& b) { return LabeledTensor::from_terms({leg}, {{b, 2.0}}); }};
    CHECK(same(apply_factorwise(t, 1, twice), t.scaled(2.0), 1e-15));
    CHECK_THROWS_AS(apply_factorwise(t, 0, identity), DomainError);
    FactorMap wrong{leg, {leg}, [&](const Index&) {
                      return LabeledTensor::from_terms({FactorSpec::make(FactorKind::ColVec, 9)}, {});
                    }};
    CHECK_THROWS_AS(apply_factorwise(t, 1, wrong), DomainError);
  }

  TEST_CASE("J on both trace-class legs of eta_2 gives 128 terms") {
    const auto beta = build_beta(2);
    CHECK(beta.nnz() == 128);
    CHECK(build_eta(2).nnz() == 8);
    CHECK(build_p(2).nnz() == 8);
    CHECK(build_q(2).nnz() == 128);
    CHECK(build_eta(3).nnz() == 27);
    CHECK(build_beta(3).nnz() == 2187);
    CHECK(build_q(3).nnz() == 2187);
  }

  TEST_CASE("no stored zeros after operations") {
    for (const auto& t : {build_beta(3), build_q(3), transpose_tail(build_eta(3))})
      for (const auto& [idx, v] : t.entries()) CHECK(std::abs(v) > tol::kPrune);
  }

  TEST_CASE("sparse dump round trip") {
    std::mt19937_64 rng(6);
    for (const auto& t : {random_tensor(rng, primal_legs(), 25), build_beta(2), build_q(2)}) {
      std::stringstream ss;
      write_sparse(ss, t);
      const auto back = read_sparse(ss);
      CHECK(same(back, t));
    }
    std::stringstream bad("not-a-dump 1\n");
    CHECK_THROWS_AS(read_sparse(bad), DomainError);
  }
}
