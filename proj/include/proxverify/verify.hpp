#pragma once

// Sampled verification of the cocoercivity / Lipschitz equivalences.
//
// A sampled check can only report "no violation found" or exhibit a violating
// witness; every result therefore carries the sample count, and the report the
// seed, so that passes are auditable and failures reproducible.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "proxverify/functions.hpp"
#include "proxverify/kernels.hpp"
#include "proxverify/sampling.hpp"

namespace proxverify::verify {

using kernels::Execution;

enum class Status { pass, fail, skipped };
const char* to_string(Status s);

/// Conditions may fail legitimately (sub-critical beta). Consistency checks never should.
enum class CheckKind { condition, consistency };

struct CheckResult {
  std::string check_id;
  Status status = Status::skipped;
  /// Largest signed margin over the sample; > 0 means a violation beyond the slack.
  double worst_residual = 0.0;
  std::optional<PointPair> witness;
  double tolerance_used = 0.0;
  std::string reason;
  std::size_t samples = 0;
  /// Empirical constant, where the check produces one.
  std::optional<double> estimate;
  CheckKind kind = CheckKind::condition;

  static CheckResult skipped(std::string id, std::string reason, CheckKind kind = CheckKind::condition);
};

/// FAIL carries a witness, SKIPPED carries a reason. Throws DomainError otherwise.
void validate(const CheckResult& r);

struct VerificationReport {
  std::string function_name;
  double beta = 0.0;
  std::vector<CheckResult> results;
  std::string config_digest;
  std::uint64_t seed = 0;

  const CheckResult& find(const std::string& id) const;
};

struct SuiteConfig {
  std::uint64_t seed = 42;
  std::size_t sample_count = 200;
  std::size_t grid_points = GridSpec::kDefaultPointsPerAxis;
  Execution exec = Execution::parallel;
  std::string config_digest;
};

/// Relative slack of the pairwise inequalities.
inline constexpr double kPairSlack = 1e-9;
/// Midpoint-convexity slack on closed-form paths.
inline constexpr double kMidpointSlack = 1e-10;

namespace ids {
inline constexpr const char* lipschitz = "i_gradient_lipschitz";
inline constexpr const char* beta_q_minus_f = "ii_beta_q_minus_f_convex";
inline constexpr const char* conjugate_strong = "iii_conjugate_strongly_convex";
inline constexpr const char* envelope_identity = "iv_envelope_identity";
inline constexpr const char* prox_identity = "v_gradient_prox_identity";
inline constexpr const char* cocoercive = "vi_gradient_cocoercive";
inline constexpr const char* coherence = "equivalence_coherence";
inline constexpr const char* bregman_upper = "bregman_upper";
inline constexpr const char* bregman_lower = "bregman_conjugate_lower";
inline constexpr const char* hessian_psd = "a_hessian_psd";
inline constexpr const char* norm_bound = "b_scaled_hessian_norm_le_one";
inline constexpr const char* sandwich = "c_scaled_hessian_sandwich";
inline constexpr const char* reflection = "d_reflected_hessian_norm_le_one";
inline constexpr const char* chain = "chain_consistency";
inline constexpr const char* first_order = "first_order_agreement";
inline constexpr const char* psd_cocoercivity = "psd_operator_cocoercivity";
}  // namespace ids

/// |T x - T y| <= beta |x - y| (1 + 1e-9). Coincident pairs are skipped. The
/// estimate is the empirical sup |Tx - Ty| / |x - y|.
CheckResult check_lipschitz(const VectorField& t, double beta, std::span<const PointPair> pairs,
                            Execution exec = Execution::parallel);
CheckResult check_lipschitz(const VectorField& t, double beta, const SampleSpec& samples, std::size_t dim,
                            Execution exec = Execution::parallel);

/// beta <x - y, Tx - Ty> >= |Tx - Ty|^2 - 1e-9 max(1, both sides).
CheckResult check_cocoercive(const VectorField& t, double beta, std::span<const PointPair> pairs,
                             Execution exec = Execution::parallel);
CheckResult check_cocoercive(const VectorField& t, double beta, const SampleSpec& samples, std::size_t dim,
                             Execution exec = Execution::parallel);

/// One result per condition (i)..(vi), in that order.
VerificationReport equivalence_suite(const CatalogFunction& f, double beta, const SuiteConfig& config);

/// Whether the six verdicts are consistent with the equivalence at this beta: the
/// four first-order conditions agree; beta >= declared beta means all six pass;
/// beta < declared (1 - margin) means the first-order four all fail. A member
/// without a declared constant (nonsmooth) has no beta that works.
CheckResult assess_equivalence_coherence(const VerificationReport& report, std::optional<double> declared_beta,
                                         double margin = 0.1);

/// D_f(x, y) = f(x) - f(y) - <x - y, grad f(y)>
double bregman(const CatalogFunction& f, const Vector& x, const Vector& y);

struct BregmanBounds {
  CheckResult upper;
  CheckResult lower;
};

/// D_f(x, y) <= beta q(x - y) on primal pairs and beta D_{f*}(u, v) >= q(u - v) on
/// dual pairs u = grad f(x), v = grad f(y).
BregmanBounds check_bregman_bounds(const CatalogFunction& f, double beta, const SampleSpec& samples,
                                   std::size_t grid_points = GridSpec::kDefaultPointsPerAxis,
                                   Execution exec = Execution::parallel);

/// Pointwise chain on H(x) = Hess f(x) / beta:
/// (a) H >= 0, (b) |H| <= 1, (c) 0 <= H <= Id, (d) |2H - Id| <= 1,
/// plus (b) <=> (c) <=> (d) at every point and agreement with check_cocoercive.
VerificationReport second_order_suite(const CatalogFunction& f, double beta, const SampleSpec& samples,
                                      Execution exec = Execution::parallel);

/// |A| <x, A x> >= |A x|^2 for PSD A. Throws DomainError when A is not PSD.
CheckResult check_psd_cocoercivity(const SymOperator& a, const SampleSpec& samples,
                                   Execution exec = Execution::parallel);

struct ConstantEstimates {
  /// sup |Tx - Ty| / |x - y|
  double lipschitz = 0.0;
  /// sup |Tx - Ty|^2 / <x - y, Tx - Ty> over pairs with a positive denominator.
  double cocoercivity = 0.0;
  std::size_t pairs = 0;
  /// Pairs with <x - y, Tx - Ty> <= 0 and Tx != Ty: no finite cocoercivity constant.
  std::size_t cocoercivity_violations = 0;
  std::optional<PointPair> violation_witness;
};

ConstantEstimates estimate_constants(const VectorField& t, std::span<const PointPair> pairs,
                                     Execution exec = Execution::parallel);

/// {0.75, 1, 1.5} times the declared constant (or times 1 when it is absent or 0).
std::vector<double> beta_sweep(const CatalogFunction& f);

}  // namespace proxverify::verify
