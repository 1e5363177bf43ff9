#include <doctest.h>

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "proxverify/functions.hpp"
#include "proxverify/kernels.hpp"
#include "proxverify/oracles.hpp"
#include "proxverify/sampling.hpp"
#include "proxverify/verify.hpp"

using namespace proxverify;
using kernels::Execution;

namespace {

struct ThreadScope {
  explicit ThreadScope(int n) {
#ifdef _OPENMP
    saved = omp_get_max_threads();
    omp_set_num_threads(n);
#else
    (void)n;
#endif
  }
  ~ThreadScope() {
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif
  }
  int saved = 1;
};

}  // namespace

TEST_CASE("argmin breaks ties toward the smallest index") {
  ThreadScope threads(4);
  const std::vector<double> v = {3, 1, 2, 1, 1, 5};
  for (auto exec : {Execution::serial, Execution::parallel}) {
    const auto b = kernels::argmin(v.size(), [&](std::size_t i) { return v[i]; }, exec);
    CHECK(b.index == 1);
    CHECK(b.value == 1.0);
    const auto m = kernels::argmax(v.size(), [&](std::size_t i) { return v[i]; }, exec);
    CHECK(m.index == 5);
  }
}

TEST_CASE("NaN never wins a reduction") {
  ThreadScope threads(4);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> v = {nan, 2, nan, 2, nan};
  for (auto exec : {Execution::serial, Execution::parallel}) {
    CHECK(kernels::argmin(v.size(), [&](std::size_t i) { return v[i]; }, exec).index == 1);
    CHECK(kernels::argmax(v.size(), [&](std::size_t i) { return v[i]; }, exec).index == 1);
  }
  CHECK(kernels::argmin(0, [](std::size_t) { return 0.0; }, Execution::parallel).index == kernels::Best::npos);
}

TEST_CASE("serial and parallel reductions agree on random data with many ties") {
  ThreadScope threads(4);
  SplitMix64 rng(40);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1000 + trial * 37);
    for (auto& e : v) e = std::floor(rng.next_unit() * 10.0);
    auto fn = [&](std::size_t i) { return v[i]; };
    const auto s = kernels::argmin(v.size(), fn, Execution::serial);
    const auto p = kernels::argmin(v.size(), fn, Execution::parallel);
    CHECK(s.index == p.index);
    CHECK(s.value == p.value);
    CHECK(kernels::argmax(v.size(), fn, Execution::serial).index ==
          kernels::argmax(v.size(), fn, Execution::parallel).index);
  }
}

TEST_CASE("tabulate is order-independent") {
  ThreadScope threads(4);
  auto fn = [](std::size_t i) { return std::sin(double(i)); };
  CHECK(kernels::tabulate<double>(5000, fn, Execution::serial) ==
        kernels::tabulate<double>(5000, fn, Execution::parallel));
}

TEST_CASE("grid oracles are bit-identical across execution modes") {
  ThreadScope threads(4);
  const auto f = make_huber(0.5, 2);
  const auto grid = GridSpec::budgeted(3.0, 2001, 2);
  for (const auto& u : sample_points(SampleSpec{41, 5, 1.5}, 2)) {
    const auto s = oracles::grid_conjugate(f, u, grid, Execution::serial);
    const auto p = oracles::grid_conjugate(f, u, grid, Execution::parallel);
    CHECK(s.value == p.value);
    CHECK(s.argmax == p.argmax);
    CHECK(s.boundary == p.boundary);
    const auto ps = oracles::grid_argmin_prox(f.as_field(), 0.7, u, grid, Execution::serial);
    const auto pp = oracles::grid_argmin_prox(f.as_field(), 0.7, u, grid, Execution::parallel);
    CHECK(ps.point == pp.point);
    CHECK(ps.value == pp.value);
  }
  const ScalarField g = [](const Vector& x) { return -half_sq_norm(x); };
  const auto ms = oracles::midpoint_convexity_check(g, SampleSpec{42, 300, 1.0}, 3, 1e-10, Execution::serial);
  const auto mp = oracles::midpoint_convexity_check(g, SampleSpec{42, 300, 1.0}, 3, 1e-10, Execution::parallel);
  CHECK(ms.worst_violation == mp.worst_violation);
  CHECK(ms.violations == mp.violations);
  CHECK(ms.witness == mp.witness);
}

TEST_CASE("pair sweeps are bit-identical across execution modes") {
  ThreadScope threads(4);
  const VectorField neg = [](const Vector& x) { return -x; };
  const auto s = verify::check_cocoercive(neg, 1.0, SampleSpec{43, 200, 1.0}, 3, Execution::serial);
  const auto p = verify::check_cocoercive(neg, 1.0, SampleSpec{43, 200, 1.0}, 3, Execution::parallel);
  CHECK(s.worst_residual == p.worst_residual);
  CHECK(s.witness == p.witness);
  CHECK(s.status == p.status);
}
