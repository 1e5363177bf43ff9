#include "proxverify/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>

#include "proxverify/errors.hpp"
#include "proxverify/kernels.hpp"
#include "proxverify/moreau.hpp"
#include "proxverify/oracles.hpp"

namespace proxverify::solvers {

namespace {

using VectorMap = std::function<Vector(const Vector&)>;

double require_beta2(const CatalogFunction& f2) {
  if (!f2.has(Capability::smooth_everywhere))
    throw CapabilityError("solver: f2 = " + f2.name() + " must be differentiable everywhere");
  const auto b = f2.lipschitz_beta();
  if (!b || !(*b > 0)) throw CapabilityError("solver: f2 = " + f2.name() + " needs a positive gradient Lipschitz constant");
  return *b;
}

void require_shapes(const CatalogFunction& f1, const CatalogFunction& f2, const Vector& x0) {
  if (f1.dim() != f2.dim() || x0.dim() != f1.dim()) throw DimensionError("solver: f1, f2 and x0 must share a dimension");
}

// Shared recurrence; `step(x, gamma)` produces x_{n+1}.
SolveTrace iterate(const CatalogFunction& f1, const CatalogFunction& f2, const StepSchedule& schedule, double beta2,
                   const Vector& x0, const SolveOptions& options,
                   const std::function<Vector(const Vector&, double)>& step) {
  SolveTrace t;
  Vector x = x0;
  t.iterates.push_back(x);
  t.objective_values.push_back(f1.value(x) + f2.value(x));
  for (std::size_t n = 0; n < options.n_iter; ++n) {
    const double gamma = schedule.at(n);
    Vector next = step(x, gamma);
    t.final_residual = distance(next, x);
    t.gamma_used.push_back(gamma);
    t.gamma_effective.push_back(gamma / beta2);
    x = std::move(next);
    t.iterates.push_back(x);
    t.objective_values.push_back(f1.value(x) + f2.value(x));
    if (options.stop_tolerance > 0 && t.final_residual <= options.stop_tolerance) {
      t.converged = true;
      break;
    }
  }
  return t;
}

Vector prox_f1(const CatalogFunction& f1, double g, const Vector& y, std::size_t grid_points) {
  return moreau::prox(moreau::ProxRequest{f1, g, y, moreau::default_method(f1), grid_points});
}

// Prox_{h2*} with h2 = (f2/beta2)* - q for f2(x) = <x, A x>/2 + <b, x> + c, A invertible.
// (f2/beta2)* has matrix beta2 A^-1 and linear term -A^-1 b, so h2 has M = beta2 A^-1 - Id
// and, with c = A^-1 b, Prox_{h2*}(x) = w - c where w = sum_k mu_k/(1 + mu_k) <x + c, e_k> e_k.
VectorMap quadratic_prox_hstar(const CatalogFunction& f2, double beta2) {
  const CatalogFunction conj = f2.conjugate();
  const auto form = conj.quadratic_form();
  if (!form) throw CapabilityError("backward_backward INDEPENDENT: conjugate of " + f2.name() + " is not quadratic");
  const std::size_t d = f2.dim();
  const SymOperator m = beta2 * form->a - SymOperator::identity(d);
  const Vector c = -1.0 * form->b;
  const auto eig = eigen_decompose(m);
  double scale = 1.0;
  for (double mu : eig.values) scale = std::max(scale, std::abs(mu));
  const double zero_band = 1e-12 * scale;
  return [eig, c, d, zero_band](const Vector& x) {
    const Vector z = x + c;
    std::vector<double> w(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      const double mu = eig.values[k];
      if (mu <= zero_band) continue;
      double coef = 0.0;
      for (std::size_t i = 0; i < d; ++i) coef += z[i] * eig.vectors[k][i];
      coef *= mu / (1.0 + mu);
      for (std::size_t i = 0; i < d; ++i) w[i] += coef * eig.vectors[k][i];
    }
    return Vector(std::move(w)) - c;
  };
}

// Dim-1 tabulation: F(u) = (f2/beta2)*(u) on a dual grid, H = F - u^2/2, h2*(x_i) = max_j x_i u_j - H_j,
// and Prox_{h2*}(x) = argmin_i h2*(x_i) + (x - x_i)^2/2 over the primal grid.
VectorMap grid_prox_hstar(const CatalogFunction& f2, double beta2, double radius, std::size_t points) {
  const GridSpec primal(radius, points, 1);
  const GridSpec dual(std::max(1.0, f2.dual_box_radius() / beta2), points, 1);
  const auto field = f2.as_field();
  const ScalarField scaled = [field, beta2](const Vector& x) { return field(x) / beta2; };
  const oracles::ConjugateTable table(scaled, primal, dual);
  std::vector<double> h(dual.size());
  for (std::size_t j = 0; j < dual.size(); ++j) {
    const double u = dual.coordinate(j);
    h[j] = table.values()[j] - 0.5 * u * u;
  }
  auto hstar = std::make_shared<std::vector<double>>(kernels::tabulate<double>(
      primal.size(),
      [&](std::size_t i) {
        const double xi = primal.coordinate(i);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < dual.size(); ++j)
          if (std::isfinite(h[j])) best = std::max(best, xi * dual.coordinate(j) - h[j]);
        return best;
      },
      kernels::Execution::parallel));
  return [primal, hstar](const Vector& x) {
    const auto best = kernels::argmin(
        primal.size(),
        [&](std::size_t i) {
          const double d = x[0] - primal.coordinate(i);
          return (*hstar)[i] + 0.5 * d * d;
        },
        kernels::Execution::serial);
    return primal.point(best.index);
  };
}

}  // namespace

StepSchedule StepSchedule::constant(double gamma) { return StepSchedule(Kind::constant, {gamma}); }

StepSchedule StepSchedule::list(std::vector<double> values) {
  if (values.empty()) throw DomainError("StepSchedule: empty list");
  return StepSchedule(Kind::list, std::move(values));
}

double StepSchedule::at(std::size_t n) const { return values_[std::min(n, values_.size() - 1)]; }

void StepSchedule::validate() const {
  for (double g : values_) {
    if (!(g > 0.0 && g < 2.0))
      throw DomainError("StepSchedule: step " + std::to_string(g) + " outside the open interval (0, 2)");
  }
}

const char* to_string(BbProxMode m) { return m == BbProxMode::identity ? "IDENTITY" : "INDEPENDENT"; }

SolveTrace forward_backward(const CatalogFunction& f1, const CatalogFunction& f2, const StepSchedule& schedule,
                            const Vector& x0, const SolveOptions& options) {
  schedule.validate();
  require_shapes(f1, f2, x0);
  const double beta2 = require_beta2(f2);
  return iterate(f1, f2, schedule, beta2, x0, options, [&](const Vector& x, double gamma) {
    const double g = gamma / beta2;
    return prox_f1(f1, g, x - g * f2.gradient(x), options.grid_points);
  });
}

SolveTrace backward_backward(const CatalogFunction& f1, const CatalogFunction& f2, const StepSchedule& schedule,
                             const Vector& x0, BbProxMode mode, const SolveOptions& options) {
  schedule.validate();
  require_shapes(f1, f2, x0);
  const double beta2 = require_beta2(f2);
  VectorMap prox_hstar;
  if (mode == BbProxMode::identity) {
    prox_hstar = [&f2, beta2](const Vector& x) { return x - f2.gradient(x) / beta2; };
  } else if (f2.has(Capability::conj_closed) && f2.conjugate().quadratic_form()) {
    prox_hstar = quadratic_prox_hstar(f2, beta2);
  } else if (f2.dim() == 1) {
    prox_hstar = grid_prox_hstar(f2, beta2, std::max(f2.box_radius(), 2.0 * norm_inf(x0)), options.grid_points);
  } else {
    throw CapabilityError("backward_backward INDEPENDENT: " + f2.name() +
                          " has no closed-form quadratic conjugate and the tabulated path is limited to dim 1");
  }
  return iterate(f1, f2, schedule, beta2, x0, options, [&](const Vector& x, double gamma) {
    return prox_f1(f1, gamma / beta2, (1.0 - gamma) * x + gamma * prox_hstar(x), options.grid_points);
  });
}

double compare_traces(const SolveTrace& a, const SolveTrace& b) {
  if (a.iterates.size() != b.iterates.size())
    throw DimensionError("compare_traces: traces have " + std::to_string(a.iterates.size()) + " and " +
                         std::to_string(b.iterates.size()) + " iterates");
  double worst = 0.0;
  for (std::size_t n = 0; n < a.iterates.size(); ++n) worst = std::max(worst, distance(a.iterates[n], b.iterates[n]));
  return worst;
}

double stationarity_residual(const CatalogFunction& f1, const CatalogFunction& f2, const Vector& x) {
  const double beta2 = require_beta2(f2);
  const double g = 1.0 / beta2;
  return distance(x, prox_f1(f1, g, x - g * f2.gradient(x), GridSpec::kDefaultPointsPerAxis));
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
  const std::size_t d = trace.iterates.empty() ? 0 : trace.iterates.front().dim();
  out << "n,gamma,objective";
  for (std::size_t i = 1; i <= d; ++i) out << ",x" << i;
  out << '\n';
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  for (std::size_t n = 0; n < trace.iterates.size(); ++n) {
    out << n << ',';
    if (n < trace.gamma_used.size()) out << num(trace.gamma_used[n]);
    out << ',' << num(trace.objective_values[n]);
    for (double v : trace.iterates[n].entries()) out << ',' << num(v);
    out << '\n';
  }
}

}  // namespace proxverify::solvers
