#include "proxverify/moreau.hpp"

#include <cmath>
#include <string>

#include "proxverify/errors.hpp"

namespace proxverify::moreau {

const char* to_string(ProxMethod m) {
  switch (m) {
    case ProxMethod::closed: return "CLOSED";
    case ProxMethod::inner_descent: return "INNER_DESCENT";
    case ProxMethod::grid: return "GRID";
  }
  return "?";
}

ProxMethod default_method(const CatalogFunction& f) {
  if (f.has(Capability::prox_closed)) return ProxMethod::closed;
  if (f.has(Capability::grad) && f.lipschitz_beta()) return ProxMethod::inner_descent;
  return ProxMethod::grid;
}

namespace {

Vector inner_descent(const CatalogFunction& f, double gamma, const Vector& x) {
  if (!f.has(Capability::grad))
    throw CapabilityError("prox INNER_DESCENT: " + f.name() + " does not provide GRAD");
  if (!f.lipschitz_beta())
    throw CapabilityError("prox INNER_DESCENT: " + f.name() + " has no known gradient Lipschitz constant");
  // The inner objective is (1/gamma)-strongly convex with (beta + 1/gamma)-Lipschitz gradient.
  const double step = gamma / (1.0 + gamma * *f.lipschitz_beta());
  Vector y = x;
  double residual = 0.0;
  for (int it = 0; it < kInnerDescentMaxSteps; ++it) {
    const Vector g = f.gradient(y) + (y - x) / gamma;
    residual = norm(g);
    if (residual <= kInnerDescentTolerance) return y;
    y = y - step * g;
  }
  throw ConvergenceError("prox INNER_DESCENT: no convergence after " + std::to_string(kInnerDescentMaxSteps) +
                             " steps",
                         y.data(), residual);
}

Vector grid_prox(const CatalogFunction& f, double gamma, const Vector& x, std::size_t points) {
  if (f.dim() > GridSpec::kMaxDim) throw CapabilityError("prox GRID: requires dim <= 3");
  double radius = f.box_radius();
  oracles::GridArgmin found{x, 0.0, true};
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto grid = GridSpec::budgeted(radius, points, f.dim());
    found = oracles::grid_argmin_prox(f.as_field(), gamma, x, grid);
    if (!found.boundary) return found.point;
    radius *= 2.0;
  }
  throw ConvergenceError("prox GRID: argmin stays on the grid boundary after doubling the radius",
                         found.point.data(), found.value);
}

}  // namespace

Vector prox(const ProxRequest& req) {
  if (!(req.gamma > 0) || !std::isfinite(req.gamma)) throw DomainError("prox: gamma must be positive");
  if (req.x.dim() != req.f.dim()) throw DimensionError("prox: dimension mismatch");
  switch (req.method) {
    case ProxMethod::closed: return req.f.prox_closed(req.gamma, req.x);
    case ProxMethod::inner_descent: return inner_descent(req.f, req.gamma, req.x);
    case ProxMethod::grid: return grid_prox(req.f, req.gamma, req.x, req.grid_points);
  }
  throw DomainError("prox: unknown method");
}

Vector prox(const CatalogFunction& f, double gamma, const Vector& x) {
  return prox(ProxRequest{f, gamma, x, default_method(f)});
}

double moreau_env(const CatalogFunction& f, double gamma, const Vector& x, ProxMethod method) {
  const Vector p = prox(ProxRequest{f, gamma, x, method});
  return f.value(p) + inner(x - p, x - p) / (2.0 * gamma);
}

double moreau_env(const CatalogFunction& f, double gamma, const Vector& x) {
  return moreau_env(f, gamma, x, default_method(f));
}

ConjugateAccess ConjugateAccess::closed(const CatalogFunction& f) {
  ConjugateAccess a;
  a.path_ = ConjugatePath::closed;
  a.conj_ = f.conjugate();
  if (!a.conj_->has(Capability::prox_closed))
    throw CapabilityError("ConjugateAccess: conjugate of " + f.name() + " has no closed-form prox");
  return a;
}

ConjugateAccess ConjugateAccess::grid(const CatalogFunction& f, std::size_t grid_points) {
  if (f.dim() != 1)
    throw CapabilityError("ConjugateAccess: tabulated grid conjugate is limited to dim 1 (got " +
                          std::to_string(f.dim()) + ")");
  ConjugateAccess a;
  a.path_ = ConjugatePath::grid;
  a.base_field_ = f.as_field();
  a.table_.emplace(f.as_field(), GridSpec(f.box_radius(), grid_points, 1),
                   GridSpec(f.dual_box_radius(), grid_points, 1));
  return a;
}

ConjugateAccess ConjugateAccess::best(const CatalogFunction& f, std::size_t grid_points) {
  return f.has(Capability::conj_closed) ? closed(f) : grid(f, grid_points);
}

double ConjugateAccess::value(const Vector& u) const {
  if (conj_) return conj_->value(u);
  return oracles::grid_conjugate_value(base_field_, u, table_->primal());
}

Vector ConjugateAccess::prox(double gamma, const Vector& y) const {
  if (conj_) return conj_->prox_closed(gamma, y);
  return table_->prox(gamma, y).point;
}

double ConjugateAccess::envelope(double gamma, const Vector& y) const {
  if (conj_) return moreau_env(*conj_, gamma, y, ProxMethod::closed);
  return table_->envelope(gamma, y);
}

double ConjugateAccess::prox_tolerance() const {
  if (conj_) return Tolerances::closed_form;
  return Tolerances::grid_steps * table_->dual().step();
}

double ConjugateAccess::value_tolerance() const {
  return conj_ ? Tolerances::closed_form : Tolerances::grid_value;
}

double moreau_decomposition_residual(const CatalogFunction& f, double gamma, const Vector& x,
                                     const ConjugateAccess& conj) {
  if (!(gamma > 0)) throw DomainError("moreau_decomposition_residual: gamma must be positive");
  const double env_f = moreau_env(f, 1.0 / gamma, x);
  const double env_conj = conj.envelope(gamma, gamma * x);
  return std::abs(env_f + env_conj - gamma * half_sq_norm(x));
}

double moreau_decomposition_residual(const CatalogFunction& f, double gamma, const Vector& x) {
  return moreau_decomposition_residual(f, gamma, x, ConjugateAccess::best(f));
}

EnvGradientResidual env_gradient_residual(const CatalogFunction& f, double gamma, const Vector& x,
                                          const ConjugateAccess& conj) {
  if (!(gamma > 0)) throw DomainError("env_gradient_residual: gamma must be positive");
  // Prox_{f/gamma} = prox of f with index 1/gamma.
  const Vector p = prox(f, 1.0 / gamma, x);
  const Vector via_prox = gamma * (x - p);
  const Vector fd = oracles::fd_gradient([&](const Vector& z) { return moreau_env(f, 1.0 / gamma, z); }, x);
  const Vector via_conj = conj.prox(gamma, gamma * x);
  return {norm(fd - via_prox), norm(via_conj - via_prox), norm(via_prox)};
}

EnvGradientResidual env_gradient_residual(const CatalogFunction& f, double gamma, const Vector& x) {
  return env_gradient_residual(f, gamma, x, ConjugateAccess::best(f));
}

}  // namespace proxverify::moreau
