#pragma once

// Proximity operators, Moreau envelopes, and residuals for the decomposition and
// envelope-gradient identities.
//
// Index conventions: env_gamma f = f [] (q/gamma), i.e.
//   env_gamma f(x) = min_y f(y) + |x - y|^2 / (2 gamma),
// and the residuals below use the 1/gamma and gamma indices exactly as
//   env_{1/gamma} f + env_gamma f* o (gamma Id) = gamma q
//   grad env_{1/gamma} f = Prox_{gamma f*} o (gamma Id) = gamma (Id - Prox_{f/gamma}).

#include <optional>
#include <utility>

#include "proxverify/functions.hpp"
#include "proxverify/grid.hpp"
#include "proxverify/kernels.hpp"
#include "proxverify/oracles.hpp"

namespace proxverify::moreau {

enum class ProxMethod { closed, inner_descent, grid };

const char* to_string(ProxMethod m);

struct ProxRequest {
  CatalogFunction f;
  double gamma;
  Vector x;
  ProxMethod method;
  std::size_t grid_points = GridSpec::kDefaultPointsPerAxis;
};

/// Inner descent stops when the inner gradient norm is <= this.
inline constexpr double kInnerDescentTolerance = 1e-10;
inline constexpr int kInnerDescentMaxSteps = 10000;

/// Closed form when available, else inner descent when f is smooth, else grid.
ProxMethod default_method(const CatalogFunction& f);

/// argmin_y f(y) + |x - y|^2 / (2 gamma) by the requested method.
Vector prox(const ProxRequest& req);
Vector prox(const CatalogFunction& f, double gamma, const Vector& x);

/// f(p) + |x - p|^2 / (2 gamma) with p = prox(f, gamma, x).
double moreau_env(const CatalogFunction& f, double gamma, const Vector& x);
double moreau_env(const CatalogFunction& f, double gamma, const Vector& x, ProxMethod method);

/// Documented tolerance tiers.
struct Tolerances {
  static constexpr double closed_form = 1e-8;
  static constexpr double fd_absolute = 1e-5;
  static constexpr double fd_relative = 1e-4;
  /// Grid comparisons allow this many grid steps.
  static constexpr double grid_steps = 2.0;
  /// Value identities evaluated through grid conjugates.
  static constexpr double grid_value = 1e-4;
};

/// f* realized through its closed form or a tabulated grid (dim 1 only for the grid).
class ConjugateAccess {
 public:
  static ConjugateAccess closed(const CatalogFunction& f);
  /// Tabulates f* on a dual grid of radius f.dual_box_radius(); primal grid of radius f.box_radius().
  static ConjugateAccess grid(const CatalogFunction& f, std::size_t grid_points = GridSpec::kDefaultPointsPerAxis);
  /// Closed when CONJ_CLOSED, grid otherwise.
  static ConjugateAccess best(const CatalogFunction& f, std::size_t grid_points = GridSpec::kDefaultPointsPerAxis);

  ConjugatePath path() const noexcept { return path_; }
  double value(const Vector& u) const;
  /// Prox_{gamma f*}(y)
  Vector prox(double gamma, const Vector& y) const;
  /// env_gamma f*(y)
  double envelope(double gamma, const Vector& y) const;
  /// Tolerance for prox comparisons on this path.
  double prox_tolerance() const;
  double value_tolerance() const;
  const oracles::ConjugateTable* table() const { return table_ ? &*table_ : nullptr; }

 private:
  ConjugatePath path_ = ConjugatePath::closed;
  std::optional<CatalogFunction> conj_;
  std::optional<oracles::ConjugateTable> table_;
  ScalarField base_field_;
};

/// |env_{1/gamma} f(x) + env_gamma f*(gamma x) - gamma q(x)|
double moreau_decomposition_residual(const CatalogFunction& f, double gamma, const Vector& x,
                                     const ConjugateAccess& conj);
double moreau_decomposition_residual(const CatalogFunction& f, double gamma, const Vector& x);

struct EnvGradientResidual {
  /// |fd grad env_{1/gamma} f(x) - gamma (x - Prox_{f/gamma} x)|
  double fd_vs_prox;
  /// |Prox_{gamma f*}(gamma x) - gamma (x - Prox_{f/gamma} x)|
  double conjugate_vs_prox;
  /// Reference scale |gamma (x - Prox_{f/gamma} x)| for the relative fd tier.
  double gradient_norm;
};

EnvGradientResidual env_gradient_residual(const CatalogFunction& f, double gamma, const Vector& x,
                                          const ConjugateAccess& conj);
EnvGradientResidual env_gradient_residual(const CatalogFunction& f, double gamma, const Vector& x);

}  // namespace proxverify::moreau
