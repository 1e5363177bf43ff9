#include "proxverify/vecspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "proxverify/errors.hpp"

namespace proxverify {

namespace {

void require_finite(const std::vector<double>& v, const char* what) {
  for (double e : v) {
    if (!std::isfinite(e)) throw DomainError(std::string(what) + ": non-finite entry");
  }
}

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

}  // namespace

Vector::Vector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw DimensionError("Vector: dimension must be positive");
  require_finite(entries_, "Vector");
}

Vector::Vector(std::initializer_list<double> entries) : Vector(std::vector<double>(entries)) {}

Vector Vector::zeros(std::size_t dim) { return Vector(std::vector<double>(dim, 0.0)); }

Vector Vector::constant(std::size_t dim, double value) {
  return Vector(std::vector<double>(dim, value));
}

Vector Vector::unit(std::size_t dim, std::size_t axis) {
  std::vector<double> e(dim, 0.0);
  e.at(axis) = 1.0;
  return Vector(std::move(e));
}

Vector operator+(const Vector& x, const Vector& y) {
  require_same_dim(x.dim(), y.dim(), "operator+");
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return Vector(std::move(out));
}

Vector operator-(const Vector& x, const Vector& y) {
  require_same_dim(x.dim(), y.dim(), "operator-");
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
  return Vector(std::move(out));
}

Vector operator-(const Vector& x) { return -1.0 * x; }

Vector operator*(double c, const Vector& x) {
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * x[i];
  return Vector(std::move(out));
}

Vector operator/(const Vector& x, double c) {
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] / c;
  return Vector(std::move(out));
}

double inner(const Vector& x, const Vector& y) {
  require_same_dim(x.dim(), y.dim(), "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) s += x[i] * y[i];
  return s;
}

double norm(const Vector& x) { return std::sqrt(inner(x, x)); }

double norm_inf(const Vector& x) {
  double m = 0.0;
  for (double e : x.entries()) m = std::max(m, std::abs(e));
  return m;
}

double half_sq_norm(const Vector& x) { return 0.5 * inner(x, x); }

double distance(const Vector& x, const Vector& y) { return norm(x - y); }

std::string to_string(const Vector& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.dim(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

SymOperator::SymOperator(std::size_t dim, std::vector<double> row_major)
    : dim_(dim), data_(std::move(row_major)) {
  if (dim_ == 0) throw DimensionError("SymOperator: dimension must be positive");
  if (data_.size() != dim_ * dim_) {
    throw DimensionError("SymOperator: expected " + std::to_string(dim_ * dim_) + " entries, got " +
                         std::to_string(data_.size()));
  }
  require_finite(data_, "SymOperator");
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i + 1; j < dim_; ++j) {
      double& upper = data_[i * dim_ + j];
      double& lower = data_[j * dim_ + i];
      defect_ = std::max(defect_, std::abs(upper - lower));
      const double mean = 0.5 * (upper + lower);
      upper = mean;
      lower = mean;
    }
  }
  if (defect_ > kMaxAsymmetry) {
    throw DomainError("SymOperator: asymmetry defect " + std::to_string(defect_) + " exceeds 1e-9");
  }
}

SymOperator::SymOperator(const std::vector<std::vector<double>>& rows)
    : SymOperator(rows.size(), [&rows] {
        std::vector<double> flat;
        flat.reserve(rows.size() * rows.size());
        for (const auto& r : rows) {
          if (r.size() != rows.size()) throw DimensionError("SymOperator: rows must be square");
          flat.insert(flat.end(), r.begin(), r.end());
        }
        return flat;
      }()) {}

SymOperator SymOperator::identity(std::size_t dim) { return scaled_identity(dim, 1.0); }

SymOperator SymOperator::zeros(std::size_t dim) { return scaled_identity(dim, 0.0); }

SymOperator SymOperator::scaled_identity(std::size_t dim, double c) {
  std::vector<double> m(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) m[i * dim + i] = c;
  return SymOperator(dim, std::move(m));
}

SymOperator SymOperator::diagonal(const Vector& diag) {
  const std::size_t d = diag.dim();
  std::vector<double> m(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) m[i * d + i] = diag[i];
  return SymOperator(d, std::move(m));
}

Vector SymOperator::apply(const Vector& x) const {
  require_same_dim(dim_, x.dim(), "SymOperator::apply");
  std::vector<double> out(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += data_[i * dim_ + j] * x[j];
    out[i] = s;
  }
  return Vector(std::move(out));
}

SymOperator operator+(const SymOperator& a, const SymOperator& b) {
  require_same_dim(a.dim(), b.dim(), "SymOperator operator+");
  std::vector<double> m(a.row_major().begin(), a.row_major().end());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] += b.row_major()[k];
  return SymOperator(a.dim(), std::move(m));
}

SymOperator operator-(const SymOperator& a, const SymOperator& b) { return a + (-1.0) * b; }

SymOperator operator*(double c, const SymOperator& a) {
  std::vector<double> m(a.row_major().begin(), a.row_major().end());
  for (double& e : m) e *= c;
  return SymOperator(a.dim(), std::move(m));
}

double max_abs_entry_diff(const SymOperator& a, const SymOperator& b) {
  require_same_dim(a.dim(), b.dim(), "max_abs_entry_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.row_major().size(); ++k) {
    m = std::max(m, std::abs(a.row_major()[k] - b.row_major()[k]));
  }
  return m;
}

EigenDecomposition eigen_decompose(const SymOperator& a) {
  const std::size_t n = a.dim();
  std::vector<double> m(a.row_major().begin(), a.row_major().end());
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off_diagonal = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += m[i * n + j] * m[i * n + j];
    return s;
  };
  double scale = 0.0;
  for (double e : m) scale += e * e;

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal() <= 1e-32 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m[p * n + q];
        if (apq == 0.0) continue;
        const double app = m[p * n + p];
        const double aqq = m[q * n + q];
        // Rotation angle that annihilates m[p][q].
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m[k * n + p];
          const double mkq = m[k * n + q];
          m[k * n + p] = c * mkp - s * mkq;
          m[k * n + q] = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m[p * n + k];
          const double mqk = m[q * n + k];
          m[p * n + k] = c * mpk - s * mqk;
          m[q * n + k] = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return m[i * n + i] < m[j * n + j]; });
  EigenDecomposition out;
  for (std::size_t k : order) {
    out.values.push_back(m[k * n + k]);
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v[i * n + k];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

std::vector<double> eigenvalues(const SymOperator& a) { return eigen_decompose(a).values; }

double op_norm(const SymOperator& a, double tol) {
  OpNormOptions options;
  options.tol = tol;
  return op_norm(a, options);
}

double op_norm(const SymOperator& a, const OpNormOptions& options) {
  if (!(options.tol > 0)) throw DomainError("op_norm: tol must be positive");
  if (a.dim() <= options.dense_threshold) {
    const auto ev = eigenvalues(a);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
  }
  return op_norm_power(a, options.tol, options.max_iterations);
}

double op_norm_power(const SymOperator& a, double tol, int max_iterations) {
  if (!(tol > 0)) throw DomainError("op_norm_power: tol must be positive");
  const std::size_t n = a.dim();
  // Deterministic start with no zero entries, so it is not orthogonal to a coordinate eigenvector.
  std::vector<double> start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = 1.0 + 0.1 * static_cast<double>(i % 7);
  Vector v = Vector(std::move(start));
  v = v / norm(v);

  double lambda = 0.0;
  double residual = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector w = a.apply(a.apply(v));
    lambda = inner(v, w);
    const double wn = norm(w);
    if (wn == 0.0) return 0.0;
    residual = norm(w - lambda * v);
    if (residual <= tol * lambda) return std::sqrt(lambda);
    v = w / wn;
  }
  throw ConvergenceError("op_norm_power: no convergence after " + std::to_string(max_iterations) +
                             " iterations",
                         v.data(), residual);
}

bool sandwich_check(const SymOperator& a, double tol) {
  const auto ev = eigenvalues(a);
  return ev.front() >= -1.0 - tol && ev.back() <= 1.0 + tol;
}

bool psd_check(const SymOperator& a, double tol) { return eigenvalues(a).front() >= -tol; }

namespace {

// Lower-triangular Cholesky factor, row-major.
std::vector<double> cholesky(const SymOperator& a) {
  const std::size_t n = a.dim();
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0)) throw DomainError("solve_spd: operator is not positive definite");
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }
  return l;
}

std::vector<double> cholesky_solve(const std::vector<double>& l, std::size_t n, std::vector<double> b) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l[i * n + k] * b[k];
    b[i] /= l[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= l[k * n + i] * b[k];
    b[i] /= l[i * n + i];
  }
  return b;
}

}  // namespace

Vector solve_spd(const SymOperator& a, const Vector& b) {
  require_same_dim(a.dim(), b.dim(), "solve_spd");
  return Vector(cholesky_solve(cholesky(a), a.dim(), b.data()));
}

SymOperator inverse_spd(const SymOperator& a) {
  const std::size_t n = a.dim();
  const auto l = cholesky(a);
  std::vector<double> inv(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const auto col = cholesky_solve(l, n, std::move(e));
    for (std::size_t i = 0; i < n; ++i) inv[i * n + j] = col[i];
  }
  // Roundoff makes the computed inverse slightly asymmetric; SymOperator symmetrizes it.
  return SymOperator(n, std::move(inv));
}

}  // namespace proxverify
