#pragma once

// Serialized forms of verification reports, constant estimates and solver traces.
// Everything except header.timestamp is a function of the run configuration, so
// two runs with the same configuration differ only in that field.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "proxverify/solvers.hpp"
#include "proxverify/verify.hpp"

namespace proxverify::report {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// FNV-1a 64, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

/// UTC, ISO 8601 to the second.
std::string utc_timestamp();

nlohmann::json header(std::uint64_t seed, const std::string& config_digest);

/// Non-finite values become the strings "inf", "-inf" and "nan".
nlohmann::json number(double v);
nlohmann::json vector(const Vector& v);

/// A result as it appears in a report. `label` is the displayed status
/// (PASS, FAIL, EXPECTED_FAIL, SKIPPED).
struct LabeledResult {
  std::string suite;
  verify::CheckResult result;
  std::string label;
};

struct SweepEntry {
  double beta;
  std::vector<LabeledResult> checks;
};

struct VerifyDocument {
  std::string function;
  std::optional<double> declared_beta;
  std::size_t sample_count;
  std::size_t grid_points;
  std::uint64_t seed;
  std::string config_digest;
  std::vector<SweepEntry> sweep;
};

nlohmann::json to_json(const LabeledResult& r);
nlohmann::json to_json(const VerifyDocument& doc);
/// One row per check: beta,suite,check_id,status,worst_residual,tolerance_used,samples,estimate,witness_x,witness_y,reason
std::string to_csv(const VerifyDocument& doc);

nlohmann::json to_json(const solvers::SolveTrace& trace);

/// Field for a CSV cell: quoted when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);
/// %.17g, with inf/-inf/nan spelled out.
std::string format_number(double v);

}  // namespace proxverify::report
