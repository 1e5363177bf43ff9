#include <doctest.h>

#include <cmath>

#include "proxverify/errors.hpp"
#include "proxverify/functions.hpp"
#include "proxverify/oracles.hpp"

using namespace proxverify;
using namespace proxverify::oracles;

namespace {

double q1(const Vector& x) { return half_sq_norm(x); }

}  // namespace

TEST_CASE("grid conjugate examples") {
  const GridSpec grid(5.0, 2001, 1);
  const auto a = grid_conjugate(ScalarField(q1), Vector{1.0}, grid);
  CHECK(a.value == doctest::Approx(0.5).epsilon(1e-5));
  CHECK_FALSE(a.boundary);

  const auto l1 = make_abs_l1(1);
  const auto b = grid_conjugate(l1, Vector{0.5}, grid);
  CHECK(std::abs(b.value) <= 1e-5);
  CHECK_FALSE(b.boundary);

  const auto c = grid_conjugate(l1, Vector{2.0}, grid);
  CHECK(c.boundary);
  CHECK(c.value == doctest::Approx(5.0));
  CHECK(std::isinf(grid_conjugate_value(l1.as_field(), Vector{2.0}, grid)));
}

TEST_CASE("grid conjugate reports flat maxima at an interior point") {
  // <x, 1> - |x| is 0 on all of x >= 0, including the boundary.
  const GridSpec grid(2.0, 401, 1);
  const auto r = grid_conjugate(make_abs_l1(1), Vector{1.0}, grid);
  CHECK_FALSE(r.boundary);
  CHECK(r.value == 0.0);
}

TEST_CASE("grid conjugate of a quadratic matches its closed form") {
  const auto f = make_quadratic(SymOperator::diagonal(Vector{2, 1}), Vector{0.5, 0});
  const auto conj = f.conjugate();
  const auto grid = GridSpec::budgeted(f.box_radius(), 2001, 2);
  for (const auto& u : sample_points(SampleSpec{30, 20, 1.0}, 2)) {
    const auto r = grid_conjugate(f, u, grid);
    REQUIRE_FALSE(r.boundary);
    CHECK(std::abs(r.value - conj.value(u)) <= 1e-4);
  }
}

TEST_CASE("grid argmin prox") {
  const GridSpec grid(5.0, 10001, 1);
  const auto l1 = make_abs_l1(1).as_field();
  CHECK(std::abs(grid_argmin_prox(l1, 1.0, Vector{0.5}, grid).point[0]) <= 1e-3);
  CHECK(grid_argmin_prox(l1, 1.0, Vector{3.0}, grid).point[0] == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(std::abs(grid_argmin_prox(l1, 0.5, Vector{0.3}, grid).point[0]) <= 1e-3);
  CHECK(grid_argmin_prox(ScalarField(q1), 1.0, Vector{2.0}, grid).point[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(grid_argmin_prox(l1, 1.0, Vector{9.0}, grid).boundary);
}

TEST_CASE("fd gradient examples") {
  const Vector g = fd_gradient(ScalarField(q1), Vector{3, 4}, 1e-5);
  CHECK(norm(g - Vector{3, 4}) <= 1e-6);
  CHECK(fd_gradient(make_huber(1.0, 1).as_field(), Vector{3.0})[0] == doctest::Approx(1.0).epsilon(1e-6));
  const auto f = make_quadratic(SymOperator::diagonal(Vector{2, 1}), Vector{1, 0});
  CHECK(norm(fd_gradient(f.as_field(), Vector{1, 1}) - Vector{3, 1}) <= 1e-5);
  CHECK_THROWS_AS(fd_gradient(make_box_indicator(Vector{0.0}, 1.0).as_field(), Vector{1.0}), DomainError);
}

TEST_CASE("fd Hessian examples") {
  const auto h = fd_hessian(ScalarField(q1), Vector{0.3, -0.2});
  CHECK(max_abs_entry_diff(h.hessian, SymOperator::identity(2)) <= 1e-4);
  CHECK_FALSE(h.warning.has_value());
  const auto f = make_quadratic(SymOperator::diagonal(Vector{2, 1}), Vector::zeros(2));
  CHECK(max_abs_entry_diff(fd_hessian(f.as_field(), Vector{1, 1}).hessian, f.hessian(Vector{1, 1})) <= 1e-4);
  const auto hub = make_huber(1.0, 1).as_field();
  CHECK(fd_hessian(hub, Vector{0.0}).hessian(0, 0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::abs(fd_hessian(hub, Vector{3.0}).hessian(0, 0)) <= 1e-3);
}

TEST_CASE("fd Hessian off-diagonal entries") {
  const ScalarField g = [](const Vector& x) { return x[0] * x[1] + std::sin(x[0]) * x[2]; };
  const Vector x{0.4, -0.3, 1.2};
  const auto h = fd_hessian(g, x);
  CHECK(h.hessian(0, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(h.hessian(0, 2) == doctest::Approx(std::cos(0.4)).epsilon(1e-6));
  CHECK(h.hessian(0, 0) == doctest::Approx(-std::sin(0.4) * 1.2).epsilon(1e-5));
  CHECK(std::abs(h.hessian(1, 2)) <= 1e-8);
  CHECK(h.asymmetry_defect <= 1e-6);
  CHECK_FALSE(h.warning.has_value());
}

TEST_CASE("midpoint convexity examples") {
  CHECK(midpoint_convexity_check(ScalarField(q1), SampleSpec{1, 200, 2.0}, 2).ok());
  const ScalarField neg = [](const Vector& x) { return -half_sq_norm(x); };
  const auto r = midpoint_convexity_check(neg, SampleSpec{1, 200, 2.0}, 2);
  CHECK(r.violations == 200);
  REQUIRE(r.witness.has_value());
  CHECK(r.worst_violation > 0);

  const auto hub = make_huber(1.0, 1);
  const ScalarField gap = [hub](const Vector& x) { return half_sq_norm(x) - hub.value(x); };
  const auto s = midpoint_convexity_check(gap, SampleSpec{2, 500, 3.0}, 1);
  CHECK(s.ok());
  CHECK(s.pairs_checked == 500);
}

TEST_CASE("midpoint convexity with infinite values") {
  const auto box = make_box_indicator(Vector{0.0}, 1.0);
  CHECK(midpoint_convexity_check(box.as_field(), SampleSpec{3, 200, 3.0}, 1).ok());
  // -box is -inf outside the box: a finite midpoint between two -inf endpoints violates convexity.
  const ScalarField neg = [box](const Vector& x) { return std::isinf(box.value(x)) ? -INFINITY : 0.0; };
  std::vector<PointPair> pairs = {{Vector{-2.0}, Vector{2.0}}};
  CHECK_FALSE(midpoint_convexity_check(neg, pairs).ok());
}

TEST_CASE("conjugate table agrees with direct grid conjugates") {
  const auto f = make_huber(1.0, 1);
  const GridSpec primal(4.0, 801, 1);
  const GridSpec dual(2.0, 201, 1);
  const ConjugateTable table(f.as_field(), primal, dual);
  REQUIRE(table.values().size() == dual.size());
  for (std::size_t k = 0; k < dual.size(); k += 17) {
    CHECK(table.values()[k] == grid_conjugate_value(f.as_field(), dual.point(k), primal, Execution::serial));
  }
  // Prox of the huber conjugate u^2/2 + indicator[-1,1] with gamma = 1: clamp(y/2, -1, 1).
  CHECK(table.prox(1.0, Vector{1.0}).point[0] == doctest::Approx(0.5).epsilon(2 * dual.step()));
  CHECK(table.prox(1.0, Vector{5.0}).point[0] == doctest::Approx(1.0).epsilon(2 * dual.step()));
  CHECK_THROWS_AS(ConjugateTable(primal, dual, std::vector<double>(3, 0.0)), DimensionError);
}
