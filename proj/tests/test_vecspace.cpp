#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "proxverify/errors.hpp"
#include "proxverify/sampling.hpp"
#include "proxverify/vecspace.hpp"

using namespace proxverify;

namespace {

Eigen::MatrixXd to_eigen(const SymOperator& a) {
  Eigen::MatrixXd m(a.dim(), a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m(i, j) = a(i, j);
  return m;
}

Eigen::VectorXd eigen_spectrum(const SymOperator& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(a));
  return solver.eigenvalues();
}

double eigen_abs_max(const SymOperator& a) { return eigen_spectrum(a).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("inner products and norms") {
  CHECK(inner(Vector{1, 0}, Vector{0, 1}) == 0.0);
  CHECK(inner(Vector{3, 4}, Vector{3, 4}) == 25.0);
  CHECK(norm(Vector{3, 4}) == 5.0);
  CHECK(half_sq_norm(Vector{3, 4}) == 12.5);
  CHECK_THROWS_AS(inner(Vector{1, 2}, Vector{1, 2, 3}), DimensionError);
}

TEST_CASE("inner matches an elementwise-sum oracle in dim 3") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(3), b(3);
    for (auto& e : a) e = rng.next_symmetric(10.0);
    for (auto& e : b) e = rng.next_symmetric(10.0);
    const double oracle = std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    CHECK(inner(Vector(a), Vector(b)) == oracle);
    CHECK(inner(Vector(a), Vector(b)) == inner(Vector(b), Vector(a)));
  }
}

TEST_CASE("vectors reject empty and non-finite input") {
  CHECK_THROWS_AS(Vector(std::vector<double>{}), DimensionError);
  CHECK_THROWS_AS((Vector{1.0, std::nan("")}), DomainError);
  CHECK_THROWS_AS((Vector{INFINITY}), DomainError);
}

TEST_CASE("symmetric operators symmetrize and record the defect") {
  const SymOperator a(2, {1.0, 2.0, 2.0 + 1e-12, 3.0});
  CHECK(a(0, 1) == a(1, 0));
  CHECK(a.asymmetry_defect() == doctest::Approx(1e-12).epsilon(1e-3));
  CHECK_THROWS_AS(SymOperator(2, {1.0, 2.0, 2.1, 3.0}), DomainError);
  CHECK_THROWS_AS(SymOperator(2, {1.0, 2.0, 3.0}), DimensionError);
}

TEST_CASE("op_norm examples") {
  CHECK(op_norm(SymOperator::identity(2)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(op_norm(SymOperator::diagonal(Vector{2, 1})) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(op_norm(SymOperator::diagonal(Vector{0.5, -3})) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("op_norm matches a dense eigensolver oracle") {
  SplitMix64 rng(11);
  for (std::size_t d : {1u, 2u, 4u, 7u, 8u, 9u, 12u, 16u}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto a = sample_symmetric_operator(rng, d, 1.0);
      CHECK(std::abs(op_norm(a) - eigen_abs_max(a)) <= 1e-8 * std::max(1.0, eigen_abs_max(a)));
    }
  }
}

TEST_CASE("power iteration path agrees with the dense path") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = sample_psd_operator(rng, 6);
    CHECK(op_norm_power(a, 1e-12) == doctest::Approx(eigen_abs_max(a)).epsilon(1e-8));
  }
  CHECK(op_norm_power(SymOperator::zeros(3)) == 0.0);
}

TEST_CASE("op_norm is absolutely homogeneous") {
  SplitMix64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = sample_symmetric_operator(rng, 1 + trial % 10, 2.0);
    const double base = op_norm(a);
    for (double c : {-2.0, 0.5, 3.0}) CHECK(op_norm(c * a) == doctest::Approx(std::abs(c) * base).epsilon(1e-8));
  }
}

TEST_CASE("eigen_decompose matches the oracle spectrum and reconstructs") {
  SplitMix64 rng(14);
  for (std::size_t d = 1; d <= 10; ++d) {
    const auto a = sample_symmetric_operator(rng, d, 1.0);
    const auto dec = eigen_decompose(a);
    const auto oracle = eigen_spectrum(a);
    for (std::size_t k = 0; k < d; ++k) CHECK(dec.values[k] == doctest::Approx(oracle(k)).epsilon(1e-10).scale(1.0));
    for (std::size_t k = 0; k < d; ++k) {
      const Vector v(dec.vectors[k]);
      CHECK(norm(a.apply(v) - dec.values[k] * v) <= 1e-10);
    }
  }
}

TEST_CASE("sandwich_check examples") {
  CHECK(sandwich_check(SymOperator::diagonal(Vector{0.5, -0.9}), 0.0));
  CHECK_FALSE(sandwich_check(SymOperator::diagonal(Vector{1.1, 0}), 0.0));
}

TEST_CASE("sandwich_check agrees with op_norm <= 1 on random operators") {
  SplitMix64 rng(15);
  int inside = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = sample_symmetric_operator(rng, 1 + trial % 6, 0.6);
    const bool s = sandwich_check(a, 1e-12);
    CHECK(s == (op_norm(a) <= 1.0 + 1e-12));
    CHECK(s == (eigen_abs_max(a) <= 1.0 + 1e-12));
    inside += s;
  }
  // Both verdicts must actually occur for the agreement to mean anything.
  CHECK(inside > 0);
  CHECK(inside < 100);
}

TEST_CASE("psd_check examples") {
  CHECK(psd_check(SymOperator::diagonal(Vector{2, 1}), 0.0));
  CHECK_FALSE(psd_check(-1.0 * SymOperator::identity(2), 1e-12));
  SplitMix64 rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = sample_psd_operator(rng, 1 + trial % 8);
    CHECK(psd_check(a, 1e-12));
    CHECK(eigen_spectrum(a).minCoeff() >= -1e-12);
  }
}

TEST_CASE("solve_spd and inverse_spd") {
  const SymOperator a(2, {4, 1, 1, 3});
  const Vector x = solve_spd(a, Vector{1, 2});
  CHECK(norm(a.apply(x) - Vector{1, 2}) <= 1e-14);
  const auto inv = inverse_spd(a);
  const Eigen::MatrixXd oracle = to_eigen(a).inverse();
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(inv(i, j) == doctest::Approx(oracle(i, j)).epsilon(1e-14));
  CHECK_THROWS_AS(solve_spd(SymOperator::diagonal(Vector{1, 0}), Vector{1, 1}), DomainError);
}
