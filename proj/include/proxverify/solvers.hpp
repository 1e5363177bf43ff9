#pragma once

// Forward-backward splitting and its backward-backward rewriting.
//
// Steps are given in normalized units: the nominal gamma_n lies in (0, 2) and the
// iteration uses gamma_n / beta2, with beta2 the Lipschitz constant of grad f2.
//
//   FB: x+ = Prox_{g f1}(x - g grad f2(x))
//   BB: x+ = Prox_{g f1}((1 - gamma) x + gamma Prox_{h2*} x),   h2 = (f2/beta2)* - q
// with g = gamma / beta2.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "proxverify/functions.hpp"
#include "proxverify/grid.hpp"

namespace proxverify::solvers {

class StepSchedule {
 public:
  enum class Kind { constant, list };

  static StepSchedule constant(double gamma);
  /// gamma_n = values[n]; the last entry repeats once the list runs out.
  static StepSchedule list(std::vector<double> values);

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double at(std::size_t n) const;

  /// Throws DomainError unless every entry lies in the open interval (0, 2).
  void validate() const;

 private:
  StepSchedule(Kind kind, std::vector<double> values) : kind_(kind), values_(std::move(values)) {}
  Kind kind_;
  std::vector<double> values_;
};

struct SolveTrace {
  std::vector<Vector> iterates;
  std::vector<double> objective_values;
  /// Nominal step gamma_n used to go from iterate n to n + 1.
  std::vector<double> gamma_used;
  /// gamma_n / beta2
  std::vector<double> gamma_effective;
  bool converged = false;
  /// |x_{n+1} - x_n| of the last step.
  double final_residual = 0.0;
};

struct SolveOptions {
  std::size_t n_iter = 100;
  /// Stop once |x_{n+1} - x_n| <= this. Zero or negative runs all n_iter steps.
  double stop_tolerance = 1e-12;
  std::size_t grid_points = GridSpec::kDefaultPointsPerAxis;
};

enum class BbProxMode { identity, independent };
const char* to_string(BbProxMode m);

SolveTrace forward_backward(const CatalogFunction& f1, const CatalogFunction& f2, const StepSchedule& schedule,
                            const Vector& x0, const SolveOptions& options = {});

/// IDENTITY realizes Prox_{h2*} as Id - grad f2 / beta2. INDEPENDENT never calls
/// grad f2: it uses the conjugate of a quadratic f2 with invertible A, or a
/// tabulated h2* in dim 1. Throws CapabilityError when neither is available.
SolveTrace backward_backward(const CatalogFunction& f1, const CatalogFunction& f2, const StepSchedule& schedule,
                             const Vector& x0, BbProxMode mode, const SolveOptions& options = {});

/// max_n |a.iterates[n] - b.iterates[n]|
double compare_traces(const SolveTrace& a, const SolveTrace& b);

/// |x - Prox_{f1/beta2}(x - grad f2(x)/beta2)|: zero exactly at minimizers of f1 + f2.
double stationarity_residual(const CatalogFunction& f1, const CatalogFunction& f2, const Vector& x);

/// Columns n, gamma, objective, x1..xd. The last row has an empty gamma field.
void write_trace_csv(std::ostream& out, const SolveTrace& trace);

}  // namespace proxverify::solvers
