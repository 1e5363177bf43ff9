#pragma once

// Brute-force references: grid conjugate, grid argmin prox, central differences
// and midpoint-convexity sampling. None of these call the closed forms they are
// used to check.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxverify/functions.hpp"
#include "proxverify/grid.hpp"
#include "proxverify/kernels.hpp"
#include "proxverify/sampling.hpp"

namespace proxverify::oracles {

using kernels::Execution;

struct GridConjugate {
  double value;
  /// Argmax sits on the grid boundary: the supremum may be unbounded or truncated.
  bool boundary;
  Vector argmax;
};

/// max over the grid of <x, u> - f(x). Ties go to the smallest grid index, except
/// that a maximum also attained (to 1e-12 relative) at an interior point is
/// reported there and not flagged.
GridConjugate grid_conjugate(const ScalarField& f, const Vector& u, const GridSpec& grid,
                             Execution exec = Execution::parallel);
GridConjugate grid_conjugate(const CatalogFunction& f, const Vector& u, const GridSpec& grid,
                             Execution exec = Execution::parallel);

/// f*(u) with unbounded/truncated suprema mapped to +inf.
double grid_conjugate_value(const ScalarField& f, const Vector& u, const GridSpec& grid,
                            Execution exec = Execution::parallel);

struct GridArgmin {
  Vector point;
  double value;
  bool boundary;
};

/// argmin over the grid of f(y) + |x - y|^2 / (2 gamma).
GridArgmin grid_argmin_prox(const ScalarField& f, double gamma, const Vector& x, const GridSpec& grid,
                            Execution exec = Execution::parallel);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
Vector fd_gradient(const ScalarField& f, const Vector& x, double h = 1e-5);

struct FdHessian {
  SymOperator hessian;
  /// max |H_ij - H_ji| before symmetrization.
  double asymmetry_defect;
  std::optional<std::string> warning;
};

/// Second-difference stencil; the off-diagonal entries are computed for (i, j) and
/// (j, i) separately and then averaged.
FdHessian fd_hessian(const ScalarField& f, const Vector& x, double h = 1e-3);

struct MidpointReport {
  std::size_t pairs_checked = 0;
  std::size_t violations = 0;
  /// max of g(m) - (g(x) + g(y))/2 over checked pairs.
  double worst_violation = -std::numeric_limits<double>::infinity();
  std::optional<PointPair> witness;
  bool ok() const { return violations == 0; }
};

/// g((x+y)/2) <= (g(x)+g(y))/2 + slack * max(1, |g(x)|, |g(y)|) on every pair.
/// Pairs with a +inf endpoint are trivially satisfied; a -inf endpoint requires a
/// -inf midpoint.
MidpointReport midpoint_convexity_check(const ScalarField& g, std::span<const PointPair> pairs,
                                        double slack = 1e-10, Execution exec = Execution::parallel);
MidpointReport midpoint_convexity_check(const ScalarField& g, const SampleSpec& samples, std::size_t dim,
                                        double slack = 1e-10, Execution exec = Execution::parallel);

/// f* tabulated on a dual grid, each entry a grid conjugate over the primal grid
/// (+inf where the argmax hits the primal boundary).
class ConjugateTable {
 public:
  ConjugateTable(const ScalarField& f, GridSpec primal, GridSpec dual, Execution exec = Execution::parallel);
  /// Precomputed f* values over the dual grid (e.g. from a closed form).
  ConjugateTable(GridSpec primal, GridSpec dual, std::vector<double> values);

  const GridSpec& primal() const noexcept { return primal_; }
  const GridSpec& dual() const noexcept { return dual_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// argmin over dual points u of values[u] + penalty(u).
  GridArgmin argmin_with(const std::function<double(const Vector&)>& penalty,
                         Execution exec = Execution::parallel) const;
  /// Prox_{gamma f*}(y) restricted to the dual grid.
  GridArgmin prox(double gamma, const Vector& y, Execution exec = Execution::parallel) const;
  /// env_gamma f*(y) = min_u f*(u) + |y - u|^2/(2 gamma) over the dual grid.
  double envelope(double gamma, const Vector& y, Execution exec = Execution::parallel) const;

 private:
  GridSpec primal_;
  GridSpec dual_;
  std::vector<double> values_;
};

}  // namespace proxverify::oracles
