#pragma once

// Catalog of convex test functions. Each member bundles value, derivatives, a
// closed-form prox and a closed-form conjugate where they exist, and says which
// of those it has through capability flags.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "proxverify/grid.hpp"
#include "proxverify/vecspace.hpp"

namespace proxverify {

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;

enum class Capability : std::uint32_t {
  value = 1u << 0,
  grad = 1u << 1,
  hessian = 1u << 2,
  prox_closed = 1u << 3,
  conj_closed = 1u << 4,
  smooth_everywhere = 1u << 5,
};

class Capabilities {
 public:
  constexpr Capabilities() = default;
  constexpr Capabilities(std::initializer_list<Capability> caps) {
    for (Capability c : caps) bits_ |= static_cast<std::uint32_t>(c);
  }
  constexpr bool has(Capability c) const { return (bits_ & static_cast<std::uint32_t>(c)) != 0; }
  constexpr Capabilities with(Capability c) const {
    Capabilities out = *this;
    out.bits_ |= static_cast<std::uint32_t>(c);
    return out;
  }
  constexpr std::uint32_t bits() const { return bits_; }
  std::string to_string() const;

 private:
  std::uint32_t bits_ = 0;
};

/// x -> <x, A x>/2 + <b, x> + c. A may be indefinite; used for quadratic members
/// and for shifted conjugates of quadratics.
struct QuadraticForm {
  SymOperator a;
  Vector b;
  double c = 0.0;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
};

namespace detail {
class Model;
}

/// Immutable handle to a catalog member.
class CatalogFunction {
 public:
  const std::string& name() const;
  /// Canonical spec string, parseable by the CLI (e.g. "huber:delta=1,d=1").
  std::string describe() const;
  std::size_t dim() const;
  Capabilities caps() const;
  bool has(Capability c) const { return caps().has(c); }
  /// Known Lipschitz constant of the gradient. May be 0 for affine members.
  std::optional<double> lipschitz_beta() const;
  /// Recommended primal sampling/oracle box [-R, R]^dim.
  double box_radius() const;
  /// Recommended box for sampling and tabulating the conjugate.
  double dual_box_radius() const;

  /// May be +inf for indicator members.
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  SymOperator hessian(const Vector& x) const;
  /// argmin_y f(y) + |x - y|^2 / (2 gamma), closed form.
  Vector prox_closed(double gamma, const Vector& x) const;
  /// Closed-form conjugate as another catalog member.
  CatalogFunction conjugate() const;
  /// Non-empty for the quadratic family (including zero).
  std::optional<QuadraticForm> quadratic_form() const;

  CatalogFunction with_box_radius(double radius) const;

  ScalarField as_field() const;
  VectorField gradient_field() const;

  explicit CatalogFunction(std::shared_ptr<const detail::Model> model);

 private:
  std::shared_ptr<const detail::Model> model_;
};

/// x -> <x, A x>/2 + <b, x> (+ c). A must be PSD.
CatalogFunction make_quadratic(const SymOperator& a, const Vector& b, double c = 0.0);
CatalogFunction make_zero(std::size_t dim);
/// x -> sum |x_i|
CatalogFunction make_abs_l1(std::size_t dim);
/// x -> weight * sum |x_i|
CatalogFunction make_weighted_l1(std::size_t dim, double weight);
/// Componentwise Huber: x^2/(2 delta) for |x| <= delta, |x| - delta/2 otherwise.
CatalogFunction make_huber(double delta, std::size_t dim);
/// Indicator of the box {u : |u_i - center_i| <= radius} plus a constant offset.
CatalogFunction make_box_indicator(const Vector& center, double radius, double offset = 0.0);

/// How the conjugate of a catalog member is realized.
enum class ConjugatePath { closed, grid };

/// h = f* - q/beta, kept symbolic. h is convex exactly when f* is (1/beta)-strongly
/// convex; nothing here assumes it.
class ShiftedConjugate {
 public:
  /// Closed path when f has a closed-form conjugate, otherwise the grid path (dim <= 2).
  ShiftedConjugate(CatalogFunction f, double beta, std::size_t grid_points = GridSpec::kDefaultPointsPerAxis);
  ShiftedConjugate(CatalogFunction f, double beta, ConjugatePath path,
                   std::size_t grid_points = GridSpec::kDefaultPointsPerAxis);

  const CatalogFunction& base() const noexcept { return base_; }
  double beta() const noexcept { return beta_; }
  ConjugatePath path() const noexcept { return path_; }
  /// Grid used to evaluate f* on the grid path.
  const GridSpec& primal_grid() const { return *grid_; }

  /// f*(u) - |u|^2/(2 beta); +inf outside dom f* (grid path: argmax on the grid boundary).
  double value(const Vector& u) const;
  /// f*(u) alone.
  double conjugate_value(const Vector& u) const;
  /// Present when f* is a quadratic form, i.e. f is quadratic with invertible A.
  const std::optional<QuadraticForm>& quadratic_form() const noexcept { return form_; }

  ScalarField as_field() const;

 private:
  CatalogFunction base_;
  double beta_;
  ConjugatePath path_;
  std::optional<GridSpec> grid_;
  std::optional<CatalogFunction> conj_;
  std::optional<QuadraticForm> form_;
};

ShiftedConjugate make_shifted_conjugate(const CatalogFunction& f, double beta);

}  // namespace proxverify
