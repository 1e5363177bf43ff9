// proxverify: verify, solve and estimate from the command line.

#include <iostream>

#include <CLI11.hpp>

#include "proxverify/cli.hpp"
#include "proxverify/errors.hpp"

namespace pc = proxverify::cli;

namespace {

void add_common(CLI::App* sub, pc::RunConfig& c, std::string& format, std::string& output) {
  sub->add_option("--seed", c.seed, "Sampling seed (PROXVERIFY_SEED overrides)");
  sub->add_option("--samples", c.sample_count, "Number of sampled points or pairs")->check(CLI::PositiveNumber);
  sub->add_option("--grid-points", c.grid_points, "Grid points per axis (odd, >= 3)")->check(CLI::Range(3, 100001));
  sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("-o,--output", output, "Write the document here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of cocoercivity, Moreau envelope and splitting identities"};
  app.require_subcommand(1);
  pc::RunConfig config;
  std::string format;
  std::string output;

  auto* verify = app.add_subcommand("verify", "Run the equivalence, Bregman and second-order suites");
  verify->add_option("function", config.function_spec, "Function spec, e.g. quadratic:d=2,diag=2;1")->required();
  verify->add_option("--beta", config.beta, "Test a single beta instead of the default sweep")
      ->check(CLI::PositiveNumber);
  add_common(verify, config, format, output);

  std::string algo = "fb";
  std::string mode = "identity";
  std::vector<double> x0;
  auto* solve = app.add_subcommand("solve", "Run forward-backward and/or backward-backward splitting");
  solve->add_option("--f1", config.f1_spec, "Prox term (default zero:d=1)");
  solve->add_option("--f2", config.f2_spec, "Smooth term")->required();
  solve->add_option("--gamma", config.gammas, "Normalized step(s) in (0, 2); a list repeats its last entry");
  solve->add_option("--x0", x0, "Starting point (one value broadcasts)");
  solve->add_option("--iters", config.iterations, "Iteration cap");
  solve->add_option("--algo", algo, "fb, bb or both")->check(CLI::IsMember({"fb", "bb", "both"}));
  solve->add_option("--bb-mode", mode, "identity or independent")->check(CLI::IsMember({"identity", "independent"}));
  solve->add_option("--stop-tol", config.stop_tolerance, "Stop once |x_{n+1} - x_n| <= this (default 0: run every iteration)");
  add_common(solve, config, format, output);

  auto* estimate = app.add_subcommand("estimate", "Empirical Lipschitz and cocoercivity constants of a gradient");
  estimate->add_option("function", config.function_spec, "Smooth function spec, or negid[:d=N]")->required();
  add_common(estimate, config, format, output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? pc::kOk : pc::kUsage;
  }

  if (verify->parsed()) config.command = pc::Command::verify;
  if (solve->parsed()) config.command = pc::Command::solve;
  if (estimate->parsed()) config.command = pc::Command::estimate;
  if (!format.empty()) config.output_format = format == "csv" ? pc::Format::csv : pc::Format::json;
  if (!output.empty()) config.output_path = output;
  if (!x0.empty()) config.x0 = x0;
  config.algorithm = algo == "both" ? pc::Algorithm::both : algo == "bb" ? pc::Algorithm::bb : pc::Algorithm::fb;
  config.bb_mode = mode == "independent" ? proxverify::solvers::BbProxMode::independent
                                         : proxverify::solvers::BbProxMode::identity;
  if (config.grid_points % 2 == 0) {
    std::cerr << "error: --grid-points must be odd\n";
    return pc::kUsage;
  }
  try {
    pc::apply_environment(config);
  } catch (const proxverify::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return pc::kUsage;
  }
  return pc::run(config, std::cout, std::cerr);
}
