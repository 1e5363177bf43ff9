#pragma once

// Dense vectors and symmetric operators for desk-scale dimensions (<= 16).

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace proxverify {

/// A point of R^d. Entries are finite and d >= 1.
class Vector {
 public:
  explicit Vector(std::vector<double> entries);
  Vector(std::initializer_list<double> entries);

  static Vector zeros(std::size_t dim);
  static Vector constant(std::size_t dim, double value);
  static Vector unit(std::size_t dim, std::size_t axis);

  std::size_t dim() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  std::span<const double> entries() const noexcept { return entries_; }
  const std::vector<double>& data() const noexcept { return entries_; }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> entries_;
};

Vector operator+(const Vector& x, const Vector& y);
Vector operator-(const Vector& x, const Vector& y);
Vector operator-(const Vector& x);
Vector operator*(double c, const Vector& x);
Vector operator/(const Vector& x, double c);

double inner(const Vector& x, const Vector& y);
double norm(const Vector& x);
double norm_inf(const Vector& x);
/// q(x) = <x, x> / 2
double half_sq_norm(const Vector& x);
double distance(const Vector& x, const Vector& y);

std::string to_string(const Vector& x);

/// Self-adjoint operator stored as a dense row-major d x d matrix.
///
/// The constructor symmetrizes its input as (A + A^T)/2 and keeps the largest
/// |A[i][j] - A[j][i]| as `asymmetry_defect()`; a defect above 1e-9 is rejected.
class SymOperator {
 public:
  static constexpr double kMaxAsymmetry = 1e-9;

  SymOperator(std::size_t dim, std::vector<double> row_major);
  explicit SymOperator(const std::vector<std::vector<double>>& rows);

  static SymOperator identity(std::size_t dim);
  static SymOperator zeros(std::size_t dim);
  static SymOperator diagonal(const Vector& diag);
  static SymOperator scaled_identity(std::size_t dim, double c);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  double asymmetry_defect() const noexcept { return defect_; }
  std::span<const double> row_major() const noexcept { return data_; }

  Vector apply(const Vector& x) const;

 private:
  std::size_t dim_;
  std::vector<double> data_;
  double defect_ = 0.0;
};

SymOperator operator+(const SymOperator& a, const SymOperator& b);
SymOperator operator-(const SymOperator& a, const SymOperator& b);
SymOperator operator*(double c, const SymOperator& a);
/// max_ij |a_ij - b_ij|
double max_abs_entry_diff(const SymOperator& a, const SymOperator& b);

struct EigenDecomposition {
  std::vector<double> values;                // ascending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k], unit length
};

/// Cyclic Jacobi rotations.
EigenDecomposition eigen_decompose(const SymOperator& a);
std::vector<double> eigenvalues(const SymOperator& a);

struct OpNormOptions {
  double tol = 1e-10;
  int max_iterations = 10000;
  /// Dimensions up to this use the full eigendecomposition.
  std::size_t dense_threshold = 8;
};

/// Largest |eigenvalue|. Throws ConvergenceError when power iteration hits its cap.
double op_norm(const SymOperator& a, double tol = 1e-10);
double op_norm(const SymOperator& a, const OpNormOptions& options);
/// Power iteration on A*A regardless of dimension.
double op_norm_power(const SymOperator& a, double tol = 1e-10, int max_iterations = 10000);

/// -(1 + tol) Id <= A <= (1 + tol) Id.
bool sandwich_check(const SymOperator& a, double tol);
/// smallest eigenvalue >= -tol
bool psd_check(const SymOperator& a, double tol);

/// Solves A x = b for symmetric positive definite A (Cholesky). Throws DomainError otherwise.
Vector solve_spd(const SymOperator& a, const Vector& b);
SymOperator inverse_spd(const SymOperator& a);

}  // namespace proxverify
