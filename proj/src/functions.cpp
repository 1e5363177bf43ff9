#include "proxverify/functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "proxverify/errors.hpp"
#include "proxverify/oracles.hpp"

namespace proxverify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string join(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += fmt_number(values[i]);
  }
  return out;
}

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return e == 0.0; });
}

void require_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) throw DimensionError(std::string(op) + ": dimension mismatch");
}

void require_gamma(double gamma) {
  if (!(gamma > 0) || !std::isfinite(gamma)) throw DomainError("prox: gamma must be positive");
}

}  // namespace

std::string Capabilities::to_string() const {
  static constexpr std::pair<Capability, const char*> kNames[] = {
      {Capability::value, "VALUE"},
      {Capability::grad, "GRAD"},
      {Capability::hessian, "HESSIAN"},
      {Capability::prox_closed, "PROX_CLOSED"},
      {Capability::conj_closed, "CONJ_CLOSED"},
      {Capability::smooth_everywhere, "SMOOTH_EVERYWHERE"},
  };
  std::string out;
  for (const auto& [cap, label] : kNames) {
    if (!has(cap)) continue;
    if (!out.empty()) out += '|';
    out += label;
  }
  return out;
}

double QuadraticForm::value(const Vector& x) const { return 0.5 * inner(x, a.apply(x)) + inner(b, x) + c; }

Vector QuadraticForm::gradient(const Vector& x) const { return a.apply(x) + b; }

namespace detail {

struct Meta {
  std::string name;
  std::size_t dim = 1;
  Capabilities caps;
  std::optional<double> lipschitz_beta;
  double box_radius = 1.0;
  double dual_box_radius = 1.0;
};

class Model {
 public:
  explicit Model(Meta meta) : meta_(std::move(meta)) {
    if (meta_.dim == 0) throw DimensionError("catalog function: dim must be >= 1");
    if (!(meta_.box_radius > 0)) throw DomainError("catalog function: box_radius must be positive");
    if (meta_.caps.has(Capability::smooth_everywhere) && !meta_.caps.has(Capability::grad))
      throw DomainError("catalog function: SMOOTH_EVERYWHERE requires GRAD");
    if (meta_.lipschitz_beta && !meta_.caps.has(Capability::smooth_everywhere))
      throw DomainError("catalog function: lipschitz_beta requires SMOOTH_EVERYWHERE");
  }
  virtual ~Model() = default;

  const Meta& meta() const { return meta_; }

  virtual std::string describe() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector&) const { throw missing("GRAD"); }
  virtual SymOperator hessian(const Vector&) const { throw missing("HESSIAN"); }
  virtual Vector prox(double, const Vector&) const { throw missing("PROX_CLOSED"); }
  virtual CatalogFunction conjugate() const { throw missing("CONJ_CLOSED"); }
  virtual std::optional<QuadraticForm> quadratic_form() const { return std::nullopt; }

 protected:
  CapabilityError missing(const char* cap) const {
    return CapabilityError(meta_.name + " does not provide " + cap);
  }

 private:
  Meta meta_;
};

namespace {

class QuadraticModel final : public Model {
 public:
  QuadraticModel(Meta meta, QuadraticForm form) : Model(std::move(meta)), form_(std::move(form)) {}

  std::string describe() const override {
    const auto d = std::to_string(meta().dim);
    if (meta().name == "zero") return "zero:d=" + d;
    std::string s = "quadratic:d=" + d + ",a=" + join(form_.a.row_major()) + ",b=" + join(form_.b.entries());
    if (form_.c != 0.0) s += ",c=" + fmt_number(form_.c);
    return s;
  }
  double value(const Vector& x) const override {
    require_dim(x.dim(), meta().dim, "quadratic value");
    return form_.value(x);
  }
  Vector gradient(const Vector& x) const override { return form_.gradient(x); }
  SymOperator hessian(const Vector& x) const override {
    require_dim(x.dim(), meta().dim, "quadratic hessian");
    return form_.a;
  }
  Vector prox(double gamma, const Vector& x) const override {
    require_gamma(gamma);
    // (Id + gamma A)^{-1} (x - gamma b)
    const auto lhs = SymOperator::identity(meta().dim) + gamma * form_.a;
    return solve_spd(lhs, x - gamma * form_.b);
  }
  CatalogFunction conjugate() const override {
    if (all_zero(form_.a.row_major())) {
      // (<b, .> + c)* is the indicator of {b}, shifted by -c.
      return make_box_indicator(form_.b, 0.0, -form_.c);
    }
    if (!meta().caps.has(Capability::conj_closed)) throw missing("CONJ_CLOSED");
    const auto inv = inverse_spd(form_.a);
    const Vector inv_b = inv.apply(form_.b);
    return make_quadratic(inv, -inv_b, 0.5 * inner(form_.b, inv_b) - form_.c);
  }
  std::optional<QuadraticForm> quadratic_form() const override { return form_; }

 private:
  QuadraticForm form_;
};

class WeightedL1Model final : public Model {
 public:
  WeightedL1Model(Meta meta, double weight) : Model(std::move(meta)), weight_(weight) {}

  std::string describe() const override {
    std::string s = "l1:d=" + std::to_string(meta().dim);
    if (weight_ != 1.0) s += ",w=" + fmt_number(weight_);
    return s;
  }
  double value(const Vector& x) const override {
    require_dim(x.dim(), meta().dim, "l1 value");
    double s = 0.0;
    for (double e : x.entries()) s += std::abs(e);
    return weight_ * s;
  }
  Vector prox(double gamma, const Vector& x) const override {
    require_gamma(gamma);
    require_dim(x.dim(), meta().dim, "l1 prox");
    const double t = gamma * weight_;
    std::vector<double> out(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) {
      const double mag = std::max(std::abs(x[i]) - t, 0.0);
      out[i] = std::copysign(mag, x[i]);
      if (mag == 0.0) out[i] = 0.0;
    }
    return Vector(std::move(out));
  }
  CatalogFunction conjugate() const override { return make_box_indicator(Vector::zeros(meta().dim), weight_); }

 private:
  double weight_;
};

class BoxIndicatorModel final : public Model {
 public:
  BoxIndicatorModel(Meta meta, Vector center, double radius, double offset)
      : Model(std::move(meta)), center_(std::move(center)), radius_(radius), offset_(offset) {}

  std::string describe() const override {
    std::string s = "box:d=" + std::to_string(meta().dim) + ",r=" + fmt_number(radius_) + ",center=" +
                    join(center_.entries());
    if (offset_ != 0.0) s += ",c=" + fmt_number(offset_);
    return s;
  }
  double value(const Vector& x) const override {
    require_dim(x.dim(), meta().dim, "box value");
    for (std::size_t i = 0; i < x.dim(); ++i) {
      if (std::abs(x[i] - center_[i]) > radius_) return kInf;
    }
    return offset_;
  }
  Vector prox(double gamma, const Vector& x) const override {
    require_gamma(gamma);
    require_dim(x.dim(), meta().dim, "box prox");
    std::vector<double> out(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i)
      out[i] = std::clamp(x[i], center_[i] - radius_, center_[i] + radius_);
    return Vector(std::move(out));
  }

 private:
  Vector center_;
  double radius_;
  double offset_;
};

class HuberModel final : public Model {
 public:
  HuberModel(Meta meta, double delta) : Model(std::move(meta)), delta_(delta) {}

  std::string describe() const override {
    return "huber:delta=" + fmt_number(delta_) + ",d=" + std::to_string(meta().dim);
  }
  double value(const Vector& x) const override {
    require_dim(x.dim(), meta().dim, "huber value");
    double s = 0.0;
    for (double e : x.entries()) {
      const double a = std::abs(e);
      s += a <= delta_ ? 0.5 * e * e / delta_ : a - 0.5 * delta_;
    }
    return s;
  }
  Vector gradient(const Vector& x) const override {
    require_dim(x.dim(), meta().dim, "huber gradient");
    std::vector<double> g(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) g[i] = std::clamp(x[i] / delta_, -1.0, 1.0);
    return Vector(std::move(g));
  }

 private:
  double delta_;
};

}  // namespace
}  // namespace detail

CatalogFunction::CatalogFunction(std::shared_ptr<const detail::Model> model) : model_(std::move(model)) {}

const std::string& CatalogFunction::name() const { return model_->meta().name; }
std::string CatalogFunction::describe() const { return model_->describe(); }
std::size_t CatalogFunction::dim() const { return model_->meta().dim; }
Capabilities CatalogFunction::caps() const { return model_->meta().caps; }
std::optional<double> CatalogFunction::lipschitz_beta() const { return model_->meta().lipschitz_beta; }
double CatalogFunction::box_radius() const { return model_->meta().box_radius; }
double CatalogFunction::dual_box_radius() const { return model_->meta().dual_box_radius; }

double CatalogFunction::value(const Vector& x) const { return model_->value(x); }

Vector CatalogFunction::gradient(const Vector& x) const {
  if (!has(Capability::grad)) throw CapabilityError(name() + " does not provide GRAD");
  require_dim(x.dim(), dim(), "gradient");
  return model_->gradient(x);
}

SymOperator CatalogFunction::hessian(const Vector& x) const {
  if (!has(Capability::hessian)) throw CapabilityError(name() + " does not provide HESSIAN");
  return model_->hessian(x);
}

Vector CatalogFunction::prox_closed(double gamma, const Vector& x) const {
  if (!has(Capability::prox_closed)) throw CapabilityError(name() + " does not provide PROX_CLOSED");
  require_dim(x.dim(), dim(), "prox_closed");
  return model_->prox(gamma, x);
}

CatalogFunction CatalogFunction::conjugate() const {
  if (!has(Capability::conj_closed)) throw CapabilityError(name() + " does not provide CONJ_CLOSED");
  return model_->conjugate();
}

std::optional<QuadraticForm> CatalogFunction::quadratic_form() const { return model_->quadratic_form(); }

namespace {

// Shares the behaviour of another model but reports a different sampling box.
class ReboxedModel final : public detail::Model {
 public:
  ReboxedModel(std::shared_ptr<const detail::Model> inner, double radius)
      : Model([&] {
          detail::Meta m = inner->meta();
          m.box_radius = radius;
          return m;
        }()),
        inner_(std::move(inner)) {}

  std::string describe() const override {
    std::ostringstream os;
    os.precision(17);
    os << inner_->describe() << ",box=" << meta().box_radius;
    return os.str();
  }
  double value(const Vector& x) const override { return inner_->value(x); }
  Vector gradient(const Vector& x) const override { return inner_->gradient(x); }
  SymOperator hessian(const Vector& x) const override { return inner_->hessian(x); }
  Vector prox(double gamma, const Vector& x) const override { return inner_->prox(gamma, x); }
  CatalogFunction conjugate() const override { return inner_->conjugate(); }
  std::optional<QuadraticForm> quadratic_form() const override { return inner_->quadratic_form(); }

 private:
  std::shared_ptr<const detail::Model> inner_;
};

}  // namespace

CatalogFunction CatalogFunction::with_box_radius(double radius) const {
  if (!(radius > 0)) throw DomainError("with_box_radius: radius must be positive");
  return CatalogFunction(std::make_shared<ReboxedModel>(model_, radius));
}

ScalarField CatalogFunction::as_field() const {
  auto model = model_;
  return [model](const Vector& x) { return model->value(x); };
}

VectorField CatalogFunction::gradient_field() const {
  if (!has(Capability::grad)) throw CapabilityError(name() + " does not provide GRAD");
  auto model = model_;
  return [model](const Vector& x) { return model->gradient(x); };
}

CatalogFunction make_quadratic(const SymOperator& a, const Vector& b, double c) {
  require_dim(a.dim(), b.dim(), "make_quadratic");
  if (!std::isfinite(c)) throw DomainError("make_quadratic: constant must be finite");
  const auto ev = eigenvalues(a);
  const double scale = std::max({1.0, std::abs(ev.front()), std::abs(ev.back())});
  if (ev.front() < -1e-12 * scale)
    throw DomainError("make_quadratic: A is not positive semidefinite (min eigenvalue " +
                      fmt_number(ev.front()) + "); f would not be convex");
  detail::Meta meta;
  meta.name = "quadratic";
  meta.dim = a.dim();
  meta.caps = {Capability::value, Capability::grad, Capability::hessian, Capability::prox_closed,
               Capability::smooth_everywhere};
  const bool invertible = ev.front() > 1e-12 * scale;
  if (invertible || all_zero(a.row_major())) meta.caps = meta.caps.with(Capability::conj_closed);
  const double lip = op_norm(a);
  meta.lipschitz_beta = lip;
  meta.box_radius = 2.0;
  meta.dual_box_radius = std::max(1.0, meta.box_radius * lip + norm_inf(b));
  return CatalogFunction(std::make_shared<detail::QuadraticModel>(std::move(meta), QuadraticForm{a, b, c}));
}

CatalogFunction make_zero(std::size_t dim) {
  if (dim == 0) throw DimensionError("make_zero: dim must be >= 1");
  detail::Meta meta;
  meta.name = "zero";
  meta.dim = dim;
  meta.caps = {Capability::value, Capability::grad,        Capability::hessian,
               Capability::prox_closed, Capability::conj_closed, Capability::smooth_everywhere};
  meta.lipschitz_beta = 0.0;
  meta.box_radius = 2.0;
  meta.dual_box_radius = 1.0;
  return CatalogFunction(std::make_shared<detail::QuadraticModel>(
      std::move(meta), QuadraticForm{SymOperator::zeros(dim), Vector::zeros(dim), 0.0}));
}

CatalogFunction make_abs_l1(std::size_t dim) { return make_weighted_l1(dim, 1.0); }

CatalogFunction make_weighted_l1(std::size_t dim, double weight) {
  if (dim == 0) throw DimensionError("make_abs_l1: dim must be >= 1");
  if (!(weight > 0) || !std::isfinite(weight)) throw DomainError("make_weighted_l1: weight must be positive");
  detail::Meta meta;
  meta.name = "l1";
  meta.dim = dim;
  meta.caps = {Capability::value, Capability::prox_closed, Capability::conj_closed};
  meta.box_radius = 5.0;
  meta.dual_box_radius = 2.0 * weight;
  return CatalogFunction(std::make_shared<detail::WeightedL1Model>(std::move(meta), weight));
}

CatalogFunction make_huber(double delta, std::size_t dim) {
  if (!(delta > 0) || !std::isfinite(delta)) throw DomainError("make_huber: delta must be positive");
  if (dim == 0) throw DimensionError("make_huber: dim must be >= 1");
  detail::Meta meta;
  meta.name = "huber";
  meta.dim = dim;
  meta.caps = {Capability::value, Capability::grad, Capability::smooth_everywhere};
  meta.lipschitz_beta = 1.0 / delta;
  meta.box_radius = 2.0 * delta;
  meta.dual_box_radius = 2.0;
  return CatalogFunction(std::make_shared<detail::HuberModel>(std::move(meta), delta));
}

CatalogFunction make_box_indicator(const Vector& center, double radius, double offset) {
  if (!(radius >= 0) || !std::isfinite(radius)) throw DomainError("make_box_indicator: radius must be >= 0");
  detail::Meta meta;
  meta.name = "box";
  meta.dim = center.dim();
  meta.caps = {Capability::value, Capability::prox_closed};
  meta.box_radius = norm_inf(center) + radius + 1.0;
  // The conjugate (a support function) is finite everywhere; the box covers
  // envelope gradients gamma (x - P x) for gamma up to 2.
  meta.dual_box_radius = 2.0 * meta.box_radius;
  return CatalogFunction(std::make_shared<detail::BoxIndicatorModel>(std::move(meta), center, radius, offset));
}

ShiftedConjugate::ShiftedConjugate(CatalogFunction f, double beta, std::size_t grid_points)
    : ShiftedConjugate(f, beta, f.has(Capability::conj_closed) ? ConjugatePath::closed : ConjugatePath::grid,
                       grid_points) {}

ShiftedConjugate::ShiftedConjugate(CatalogFunction f, double beta, ConjugatePath path, std::size_t grid_points)
    : base_(std::move(f)), beta_(beta), path_(path) {
  if (!(beta > 0) || !std::isfinite(beta)) throw DomainError("make_shifted_conjugate: beta must be positive");
  if (path_ == ConjugatePath::closed) {
    conj_ = base_.conjugate();
    if (auto form = conj_->quadratic_form()) {
      form_ = QuadraticForm{form->a - (1.0 / beta_) * SymOperator::identity(base_.dim()), form->b, form->c};
    }
  } else {
    if (base_.dim() > 2)
      throw CapabilityError("make_shifted_conjugate: " + base_.name() +
                            " has no closed-form conjugate and the grid fallback is limited to dim <= 2");
    grid_ = GridSpec::budgeted(base_.box_radius(), grid_points, base_.dim());
  }
}

double ShiftedConjugate::conjugate_value(const Vector& u) const {
  if (conj_) return conj_->value(u);
  return oracles::grid_conjugate_value(base_.as_field(), u, *grid_);
}

double ShiftedConjugate::value(const Vector& u) const {
  const double fs = conjugate_value(u);
  if (std::isinf(fs)) return fs;
  return fs - half_sq_norm(u) / beta_;
}

ScalarField ShiftedConjugate::as_field() const {
  auto self = *this;
  return [self](const Vector& u) { return self.value(u); };
}

ShiftedConjugate make_shifted_conjugate(const CatalogFunction& f, double beta) { return ShiftedConjugate(f, beta); }

}  // namespace proxverify
