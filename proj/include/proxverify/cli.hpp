#pragma once

// Command implementations behind the `proxverify` executable, kept in the library
// so tests drive them without spawning processes.
//
// Function-spec grammar:
//   spec   := name [':' param (',' param)*]
//   param  := key '=' value | number      (a bare number extends the previous key's list)
//   value  := number (';' number)*

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proxverify/functions.hpp"
#include "proxverify/solvers.hpp"

namespace proxverify::cli {

enum ExitCode : int { kOk = 0, kUnexpectedFail = 1, kUsage = 2, kIo = 3 };

struct SpecParam {
  std::string key;
  std::vector<double> values;
  std::size_t position;
};

struct ParsedSpec {
  std::string name;
  std::vector<SpecParam> params;
};

/// Syntax only. Throws ParseError with the offending column.
ParsedSpec parse_spec(std::string_view text);

/// Builds a catalog member. Throws ParseError for unknown names, unknown or
/// duplicate keys and malformed values; DomainError for invalid parameters.
CatalogFunction parse_function(std::string_view text);

/// Vector field for `estimate`: the gradient of a smooth catalog member, or the
/// diagnostic map T = -Id for "negid[:d=N]".
struct EstimateTarget {
  std::string name;
  std::size_t dim;
  double radius;
  VectorField map;
};
EstimateTarget parse_estimate_target(std::string_view text);

enum class Command { verify, solve, estimate };
enum class Format { json, csv };
enum class Algorithm { fb, bb, both };

struct RunConfig {
  Command command = Command::verify;
  std::string function_spec;
  std::optional<double> beta;
  std::uint64_t seed = 42;
  std::size_t sample_count = 200;
  std::size_t grid_points = GridSpec::kDefaultPointsPerAxis;
  /// Unset means JSON for verify/estimate and CSV for solve.
  std::optional<Format> output_format;
  std::optional<std::string> output_path;

  // solve
  std::string f1_spec = "zero:d=1";
  std::string f2_spec;
  std::vector<double> gammas = {1.0};
  std::optional<std::vector<double>> x0;
  std::size_t iterations = 100;
  Algorithm algorithm = Algorithm::fb;
  solvers::BbProxMode bb_mode = solvers::BbProxMode::identity;
  /// The CLI runs the full iteration cap unless a threshold is given.
  double stop_tolerance = 0.0;
};

/// Applies PROXVERIFY_SEED when set. Throws ParseError when it is not an unsigned integer.
void apply_environment(RunConfig& config);

/// Canonical text of everything that determines a report; hashed into config_digest.
std::string canonical_config(const RunConfig& config);

/// Each command writes its document to config.output_path (or `out`) and
/// diagnostics to `err`, and returns an ExitCode.
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_estimate(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Dispatches on config.command and maps library errors to exit codes.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace proxverify::cli
