#include "proxverify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "proxverify/errors.hpp"

namespace proxverify::oracles {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFlatTieTolerance = 1e-12;

void require_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) throw DimensionError(std::string(op) + ": dimension mismatch");
}

}  // namespace

GridConjugate grid_conjugate(const ScalarField& f, const Vector& u, const GridSpec& grid, Execution exec) {
  require_dim(u.dim(), grid.dim(), "grid_conjugate");
  const auto best = kernels::argmax(
      grid.size(),
      [&](std::size_t k) {
        const Vector x = grid.point(k);
        return inner(x, u) - f(x);
      },
      exec);
  if (!grid.on_boundary(best.index)) return {best.value, false, grid.point(best.index)};
  // A flat maximum reaching the boundary is not a truncation when an interior point attains it too.
  const auto interior = kernels::argmax(
      grid.size(),
      [&](std::size_t k) {
        if (grid.on_boundary(k)) return std::numeric_limits<double>::quiet_NaN();
        const Vector x = grid.point(k);
        return inner(x, u) - f(x);
      },
      exec);
  if (interior.index != kernels::Best::npos &&
      interior.value >= best.value - kFlatTieTolerance * std::max(1.0, std::abs(best.value)))
    return {interior.value, false, grid.point(interior.index)};
  return {best.value, true, grid.point(best.index)};
}

GridConjugate grid_conjugate(const CatalogFunction& f, const Vector& u, const GridSpec& grid, Execution exec) {
  require_dim(f.dim(), grid.dim(), "grid_conjugate");
  return grid_conjugate(f.as_field(), u, grid, exec);
}

double grid_conjugate_value(const ScalarField& f, const Vector& u, const GridSpec& grid, Execution exec) {
  const auto g = grid_conjugate(f, u, grid, exec);
  return g.boundary ? kInf : g.value;
}

GridArgmin grid_argmin_prox(const ScalarField& f, double gamma, const Vector& x, const GridSpec& grid,
                            Execution exec) {
  if (!(gamma > 0)) throw DomainError("grid_argmin_prox: gamma must be positive");
  require_dim(x.dim(), grid.dim(), "grid_argmin_prox");
  const auto best = kernels::argmin(
      grid.size(),
      [&](std::size_t k) {
        const Vector y = grid.point(k);
        return f(y) + inner(x - y, x - y) / (2.0 * gamma);
      },
      exec);
  return {grid.point(best.index), best.value, grid.on_boundary(best.index)};
}

Vector fd_gradient(const ScalarField& f, const Vector& x, double h) {
  if (!(h > 0)) throw DomainError("fd_gradient: h must be positive");
  std::vector<double> g(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const Vector e = h * Vector::unit(x.dim(), i);
    const double plus = f(x + e);
    const double minus = f(x - e);
    if (!std::isfinite(plus) || !std::isfinite(minus))
      throw DomainError("fd_gradient: non-finite evaluation near " + to_string(x));
    g[i] = (plus - minus) / (2.0 * h);
  }
  return Vector(std::move(g));
}

FdHessian fd_hessian(const ScalarField& f, const Vector& x, double h) {
  if (!(h > 0)) throw DomainError("fd_hessian: h must be positive");
  const std::size_t n = x.dim();
  auto eval = [&](const Vector& p) {
    const double v = f(p);
    if (!std::isfinite(v)) throw DomainError("fd_hessian: non-finite evaluation near " + to_string(x));
    return v;
  };
  const double f0 = eval(x);
  std::vector<double> raw(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector ei = h * Vector::unit(n, i);
    raw[i * n + i] = (eval(x + ei) - 2.0 * f0 + eval(x - ei)) / (h * h);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vector ej = h * Vector::unit(n, j);
      // Stencil anchored on axis i first, then j: the two orders round differently.
      const double pp = eval((x + ei) + ej);
      const double pm = eval((x + ei) - ej);
      const double mp = eval((x - ei) + ej);
      const double mm = eval((x - ei) - ej);
      raw[i * n + j] = ((pp - pm) - (mp - mm)) / (4.0 * h * h);
    }
  }
  double defect = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      defect = std::max(defect, std::abs(raw[i * n + j] - raw[j * n + i]));
      raw[i * n + j] = raw[j * n + i] = 0.5 * (raw[i * n + j] + raw[j * n + i]);
    }
  }
  FdHessian out{SymOperator(n, std::move(raw)), defect, std::nullopt};
  if (defect > 1e-6) out.warning = "fd_hessian: asymmetry defect " + std::to_string(defect) + " before symmetrization";
  return out;
}

MidpointReport midpoint_convexity_check(const ScalarField& g, std::span<const PointPair> pairs, double slack,
                                        Execution exec) {
  // Per-pair violation; NaN marks pairs that are trivially satisfied.
  auto violation = [&](std::size_t k) {
    const auto& [x, y] = pairs[k];
    const double gx = g(x);
    const double gy = g(y);
    if (gx == kInf || gy == kInf) return std::numeric_limits<double>::quiet_NaN();
    const double gm = g(0.5 * (x + y));
    // An endpoint at -inf forces the midpoint to -inf as well.
    if (gx == -kInf || gy == -kInf) return gm == -kInf ? -kInf : kInf;
    const double rhs = 0.5 * (gx + gy);
    if (std::isinf(gm)) return kInf;
    const double excess = gm - rhs;
    const double allowed = slack * std::max({1.0, std::abs(gx), std::abs(gy)});
    // Violations are shifted so positive means "fails"; passes keep their (negative) margin.
    return excess > allowed ? excess : excess - allowed;
  };
  const auto values = kernels::tabulate<double>(pairs.size(), violation, exec);
  MidpointReport r;
  std::size_t worst = kernels::Best::npos;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (std::isnan(values[k])) continue;
    ++r.pairs_checked;
    if (values[k] > 0) ++r.violations;
    if (worst == kernels::Best::npos || values[k] > r.worst_violation) {
      r.worst_violation = values[k];
      worst = k;
    }
  }
  if (r.violations > 0) r.witness = pairs[worst];
  return r;
}

MidpointReport midpoint_convexity_check(const ScalarField& g, const SampleSpec& samples, std::size_t dim,
                                        double slack, Execution exec) {
  const auto pairs = sample_pairs(samples, dim);
  return midpoint_convexity_check(g, pairs, slack, exec);
}

ConjugateTable::ConjugateTable(const ScalarField& f, GridSpec primal, GridSpec dual, Execution exec)
    : primal_(primal), dual_(dual) {
  require_dim(primal_.dim(), dual_.dim(), "ConjugateTable");
  // Outer loop over dual points in parallel; each inner scan runs serially.
  values_ = kernels::tabulate<double>(
      dual_.size(),
      [&](std::size_t j) { return grid_conjugate_value(f, dual_.point(j), primal_, Execution::serial); },
      exec);
}

ConjugateTable::ConjugateTable(GridSpec primal, GridSpec dual, std::vector<double> values)
    : primal_(primal), dual_(dual), values_(std::move(values)) {
  require_dim(primal_.dim(), dual_.dim(), "ConjugateTable");
  if (values_.size() != dual_.size()) throw DimensionError("ConjugateTable: one value per dual grid point");
}

GridArgmin ConjugateTable::argmin_with(const std::function<double(const Vector&)>& penalty,
                                       Execution exec) const {
  const auto best = kernels::argmin(
      dual_.size(),
      [&](std::size_t j) {
        if (std::isinf(values_[j])) return kInf;
        return values_[j] + penalty(dual_.point(j));
      },
      exec);
  return {dual_.point(best.index), best.value, dual_.on_boundary(best.index)};
}

GridArgmin ConjugateTable::prox(double gamma, const Vector& y, Execution exec) const {
  if (!(gamma > 0)) throw DomainError("ConjugateTable::prox: gamma must be positive");
  return argmin_with([&](const Vector& u) { return inner(y - u, y - u) / (2.0 * gamma); }, exec);
}

double ConjugateTable::envelope(double gamma, const Vector& y, Execution exec) const {
  return prox(gamma, y, exec).value;
}

}  // namespace proxverify::oracles
