#include <doctest.h>

#include <cmath>
#include <sstream>

#include "proxverify/errors.hpp"
#include "proxverify/functions.hpp"
#include "proxverify/solvers.hpp"

using namespace proxverify;
using namespace proxverify::solvers;

namespace {

// 1/2 (x - 2)^2 written as A = 1, b = -2.
CatalogFunction shifted_square() { return make_quadratic(SymOperator::identity(1), Vector{-2.0}); }

SolveOptions full(std::size_t n) {
  SolveOptions o;
  o.n_iter = n;
  o.stop_tolerance = 0.0;
  return o;
}

double soft(double x, double g) { return std::copysign(std::max(std::abs(x) - g, 0.0), x); }

}  // namespace

TEST_CASE("step schedules") {
  CHECK(StepSchedule::constant(1.0).at(7) == 1.0);
  const auto l = StepSchedule::list({0.5, 1.5});
  CHECK(l.at(0) == 0.5);
  CHECK(l.at(1) == 1.5);
  CHECK(l.at(9) == 1.5);
  CHECK_THROWS_AS(StepSchedule::constant(2.0).validate(), DomainError);
  CHECK_THROWS_AS(StepSchedule::constant(0.0).validate(), DomainError);
  CHECK_THROWS_AS(StepSchedule::list({1.0, -0.1}).validate(), DomainError);
  CHECK_NOTHROW(StepSchedule::constant(1.99).validate());
}

TEST_CASE("forward-backward examples") {
  const auto q = make_quadratic(SymOperator::identity(1), Vector{0.0});
  const auto t = forward_backward(make_zero(1), q, StepSchedule::constant(1.0), Vector{2.0}, full(3));
  REQUIRE(t.iterates.size() == 4);
  CHECK(t.iterates[1][0] == 0.0);
  CHECK(t.iterates[3][0] == 0.0);

  const auto lasso = forward_backward(make_abs_l1(1), shifted_square(), StepSchedule::constant(1.0), Vector{0.0});
  CHECK(lasso.iterates[1][0] == 1.0);
  CHECK(lasso.iterates.back()[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lasso.converged);

  CHECK_THROWS_AS(forward_backward(make_zero(1), q, StepSchedule::constant(2.0), Vector{2.0}), DomainError);
  CHECK_THROWS_AS(forward_backward(make_zero(1), make_abs_l1(1), StepSchedule::constant(1.0), Vector{2.0}),
                  CapabilityError);
}

TEST_CASE("trace shapes") {
  const auto t = forward_backward(make_abs_l1(2), make_quadratic(SymOperator::diagonal(Vector{2, 1}), Vector{-1, 1}),
                                  StepSchedule::constant(0.5), Vector{3, -3}, full(25));
  CHECK(t.iterates.size() == 26);
  CHECK(t.objective_values.size() == 26);
  CHECK(t.gamma_used.size() == 25);
  CHECK(t.gamma_effective.size() == 25);
  CHECK(t.gamma_effective[0] == doctest::Approx(0.25));
}

TEST_CASE("forward-backward matches a hand-coded proximal gradient loop") {
  // f1 = l1, f2 = 1/2 <x, diag(4, 1) x> + <b, x>, beta2 = 4.
  const Vector b{-3, 0.5};
  const auto f2 = make_quadratic(SymOperator::diagonal(Vector{4, 1}), b);
  for (double gamma : {0.5, 1.0, 1.9}) {
    const auto t = forward_backward(make_abs_l1(2), f2, StepSchedule::constant(gamma), Vector{1, 1}, full(40));
    double x0 = 1, x1 = 1;
    const double g = gamma / 4.0;
    for (std::size_t n = 1; n <= 40; ++n) {
      const double y0 = x0 - g * (4 * x0 + b[0]);
      const double y1 = x1 - g * (1 * x1 + b[1]);
      x0 = soft(y0, g);
      x1 = soft(y1, g);
      CHECK(t.iterates[n][0] == doctest::Approx(x0).epsilon(1e-14).scale(1.0));
      CHECK(t.iterates[n][1] == doctest::Approx(x1).epsilon(1e-14).scale(1.0));
    }
  }
}

TEST_CASE("with f1 = 0 and gamma = 1 the iteration is gradient descent") {
  const auto f2 = make_huber(0.5, 2);
  const auto t = forward_backward(make_zero(2), f2, StepSchedule::constant(1.0), Vector{3, -1}, full(30));
  Vector x{3, -1};
  for (std::size_t n = 1; n <= 30; ++n) {
    x = x - 0.5 * f2.gradient(x);
    CHECK(t.iterates[n] == x);
  }
}

TEST_CASE("backward-backward identity mode reproduces forward-backward") {
  const std::vector<std::pair<CatalogFunction, CatalogFunction>> problems = {
      {make_abs_l1(1), shifted_square()},
      {make_abs_l1(2), make_quadratic(SymOperator::diagonal(Vector{2, 1}), Vector{-1, 1})},
      {make_zero(2), make_huber(1.0, 2)},
      {make_box_indicator(Vector{0.0, 0.0}, 0.5), make_quadratic(SymOperator(2, {2, 1, 1, 2}), Vector{1, -1})}};
  for (const auto& [f1, f2] : problems) {
    for (double gamma : {0.5, 1.0, 1.9}) {
      const Vector x0 = Vector::constant(f1.dim(), 1.5);
      const auto fb = forward_backward(f1, f2, StepSchedule::constant(gamma), x0, full(100));
      const auto bb = backward_backward(f1, f2, StepSchedule::constant(gamma), x0, BbProxMode::identity, full(100));
      CHECK(compare_traces(fb, bb) <= 1e-12);
    }
    const auto sched = StepSchedule::list({1.9, 0.3, 1.0});
    const Vector x0 = Vector::constant(f1.dim(), -0.7);
    CHECK(compare_traces(forward_backward(f1, f2, sched, x0, full(50)),
                         backward_backward(f1, f2, sched, x0, BbProxMode::identity, full(50))) <= 1e-12);
  }
}

TEST_CASE("backward-backward identity example with f2 = q") {
  const auto q = make_quadratic(SymOperator::identity(1), Vector{0.0});
  const auto bb = backward_backward(make_zero(1), q, StepSchedule::constant(1.0), Vector{3.0}, BbProxMode::identity,
                                    full(2));
  CHECK(bb.iterates[1][0] == 0.0);
}

TEST_CASE("backward-backward independent mode") {
  for (double gamma : {0.5, 1.0, 1.9}) {
    const auto fb = forward_backward(make_abs_l1(1), shifted_square(), StepSchedule::constant(gamma), Vector{0.0},
                                     full(100));
    const auto bb = backward_backward(make_abs_l1(1), shifted_square(), StepSchedule::constant(gamma), Vector{0.0},
                                      BbProxMode::independent, full(100));
    CHECK(compare_traces(fb, bb) <= 1e-6);
  }
  const auto f2 = make_quadratic(SymOperator::diagonal(Vector{3, 1}), Vector{1, -2});
  const auto fb = forward_backward(make_abs_l1(2), f2, StepSchedule::constant(1.0), Vector{1, 1}, full(60));
  const auto bb =
      backward_backward(make_abs_l1(2), f2, StepSchedule::constant(1.0), Vector{1, 1}, BbProxMode::independent, full(60));
  CHECK(compare_traces(fb, bb) <= 1e-10);

  // Huber in dim 1 has no closed conjugate: the tabulated path is only grid-accurate.
  const auto h = make_huber(1.0, 1);
  const auto fbh = forward_backward(make_abs_l1(1), h, StepSchedule::constant(1.0), Vector{2.5}, full(20));
  const auto bbh =
      backward_backward(make_abs_l1(1), h, StepSchedule::constant(1.0), Vector{2.5}, BbProxMode::independent, full(20));
  CHECK(compare_traces(fbh, bbh) <= 1e-2);

  CHECK_THROWS_AS(backward_backward(make_zero(2), make_huber(1.0, 2), StepSchedule::constant(1.0), Vector{1, 1},
                                    BbProxMode::independent),
                  CapabilityError);
}

TEST_CASE("compare_traces") {
  const auto t = forward_backward(make_abs_l1(1), shifted_square(), StepSchedule::constant(1.0), Vector{0.0}, full(5));
  CHECK(compare_traces(t, t) == 0.0);
  const auto shorter =
      forward_backward(make_abs_l1(1), shifted_square(), StepSchedule::constant(1.0), Vector{0.0}, full(3));
  CHECK_THROWS_AS(compare_traces(t, shorter), DimensionError);
}

TEST_CASE("converged iterates are stationary") {
  const std::vector<std::pair<CatalogFunction, CatalogFunction>> problems = {
      {make_abs_l1(1), shifted_square()},
      {make_abs_l1(2), make_quadratic(SymOperator::diagonal(Vector{2, 1}), Vector{-3, 0.2})},
      {make_box_indicator(Vector{0.0, 0.0}, 0.5), make_quadratic(SymOperator(2, {2, 1, 1, 2}), Vector{1, -1})}};
  for (const auto& [f1, f2] : problems) {
    SolveOptions o;
    o.n_iter = 5000;
    const auto t = forward_backward(f1, f2, StepSchedule::constant(1.0), Vector::constant(f1.dim(), 2.0), o);
    REQUIRE(t.converged);
    CHECK(t.final_residual <= 1e-12);
    CHECK(stationarity_residual(f1, f2, t.iterates.back()) <= 1e-10);
  }
}

TEST_CASE("trace CSV layout") {
  const auto t = forward_backward(make_zero(1), make_quadratic(SymOperator::identity(1), Vector{0.0}),
                                  StepSchedule::constant(1.0), Vector{2.0}, full(2));
  std::ostringstream out;
  write_trace_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,gamma,objective,x1");
  std::getline(in, line);
  CHECK(line == "0,1,2,2");
  std::getline(in, line);
  CHECK(line == "1,1,0,0");
  std::getline(in, line);
  CHECK(line == "2,,0,0");
}
