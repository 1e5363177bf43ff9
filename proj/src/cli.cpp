#include "proxverify/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "proxverify/errors.hpp"
#include "proxverify/report.hpp"
#include "proxverify/verify.hpp"

namespace proxverify::cli {

namespace {

constexpr std::size_t kMaxDim = 16;

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

// Keyed view over a parsed spec that rejects keys the family does not know.
class Params {
 public:
  Params(const ParsedSpec& spec, std::string_view text, std::set<std::string> allowed) : text_(text) {
    for (const auto& p : spec.params) {
      if (!allowed.count(p.key))
        throw ParseError("unknown key '" + p.key + "' for " + spec.name, std::string(text), p.position);
      if (!by_key_.emplace(p.key, &p).second)
        throw ParseError("duplicate key '" + p.key + "'", std::string(text), p.position);
    }
  }

  bool has(const std::string& key) const { return by_key_.count(key) > 0; }
  const SpecParam& at(const std::string& key) const { return *by_key_.at(key); }

  std::optional<double> scalar(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const auto& p = at(key);
    if (p.values.size() != 1) throw ParseError("'" + key + "' takes a single number", std::string(text_), p.position);
    return p.values.front();
  }

  std::optional<std::size_t> dim() const {
    const auto v = scalar("d");
    if (!v) return std::nullopt;
    if (*v != std::floor(*v) || *v < 1 || *v > static_cast<double>(kMaxDim))
      throw ParseError("d must be an integer in 1.." + std::to_string(kMaxDim), std::string(text_), at("d").position);
    return static_cast<std::size_t>(*v);
  }

  double positive(const std::string& key, double fallback) const {
    const auto v = scalar(key);
    if (!v) return fallback;
    if (!(*v > 0)) throw ParseError("'" + key + "' must be positive", std::string(text_), at(key).position);
    return *v;
  }

  // A list of length 1 (broadcast) or exactly d.
  Vector vector_of(const std::string& key, std::size_t d, double fallback) const {
    if (!has(key)) return Vector::constant(d, fallback);
    const auto& p = at(key);
    if (p.values.size() == 1) return Vector::constant(d, p.values.front());
    if (p.values.size() != d)
      throw ParseError("'" + key + "' needs 1 or " + std::to_string(d) + " entries, got " +
                           std::to_string(p.values.size()),
                       std::string(text_), p.position);
    return Vector(p.values);
  }

  ParseError error(const std::string& key, const std::string& what) const {
    return ParseError(what, std::string(text_), has(key) ? at(key).position : 0);
  }

 private:
  std::string_view text_;
  std::map<std::string, const SpecParam*> by_key_;
};

CatalogFunction rebox(const CatalogFunction& f, const Params& p) {
  return p.has("box") ? f.with_box_radius(p.positive("box", 1.0)) : f;
}

CatalogFunction build_quadratic(const Params& p) {
  if (p.has("a") && p.has("diag")) throw p.error("diag", "give either 'a' or 'diag', not both");
  std::size_t d = 1;
  if (auto given = p.dim()) {
    d = *given;
  } else if (p.has("diag")) {
    d = p.at("diag").values.size();
  } else if (p.has("a")) {
    const std::size_t n = p.at("a").values.size();
    d = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
    if (d * d != n) throw p.error("a", "'a' needs 1 or d*d entries");
  } else if (p.has("b")) {
    d = p.at("b").values.size();
  }
  if (d > kMaxDim) throw p.error("d", "dimension above " + std::to_string(kMaxDim));
  SymOperator a = SymOperator::identity(d);
  if (p.has("diag")) {
    a = SymOperator::diagonal(p.vector_of("diag", d, 1.0));
  } else if (p.has("a")) {
    const auto& v = p.at("a").values;
    if (v.size() == 1) a = SymOperator::scaled_identity(d, v.front());
    else if (v.size() == d * d) a = SymOperator(d, v);
    else if (v.size() == d) a = SymOperator::diagonal(Vector(v));
    else
      throw p.error("a", "'a' needs 1, " + std::to_string(d) + " (diagonal) or " + std::to_string(d * d) +
                             " entries");
  }
  const Vector b = p.vector_of("b", d, 0.0);
  const double c = p.scalar("c").value_or(0.0);
  return rebox(make_quadratic(a, b, c), p);
}

CatalogFunction build(const ParsedSpec& spec, std::string_view text) {
  const std::string& n = spec.name;
  if (n == "quadratic") return build_quadratic(Params(spec, text, {"d", "a", "diag", "b", "c", "box"}));
  if (n == "zero") {
    const Params p(spec, text, {"d", "box"});
    return rebox(make_zero(p.dim().value_or(1)), p);
  }
  if (n == "l1") {
    const Params p(spec, text, {"d", "w", "box"});
    return rebox(make_weighted_l1(p.dim().value_or(1), p.positive("w", 1.0)), p);
  }
  if (n == "huber") {
    const Params p(spec, text, {"delta", "d", "box"});
    if (!p.has("delta")) throw ParseError("huber needs delta", std::string(text), 0);
    return rebox(make_huber(p.positive("delta", 1.0), p.dim().value_or(1)), p);
  }
  if (n == "box") {
    const Params p(spec, text, {"d", "r", "center", "c", "box"});
    std::size_t d = p.dim().value_or(p.has("center") ? p.at("center").values.size() : 1);
    return rebox(make_box_indicator(p.vector_of("center", d, 0.0), p.positive("r", 1.0), p.scalar("c").value_or(0.0)),
                 p);
  }
  if (n == "negid")
    throw ParseError("negid is a diagnostic map, available only to the estimate command", std::string(text), 0);
  throw ParseError("unknown function '" + n + "' (known: quadratic, zero, l1, huber, box)", std::string(text), 0);
}

int emit(const RunConfig& config, const std::string& text, std::ostream& out, std::ostream& err) {
  if (!config.output_path) {
    out << text;
    out.flush();
    return out ? kOk : kIo;
  }
  std::ofstream file(*config.output_path, std::ios::binary);
  if (!file) {
    err << "error: cannot open " << *config.output_path << " for writing\n";
    return kIo;
  }
  file << text;
  file.close();
  if (!file) {
    err << "error: failed writing " << *config.output_path << '\n';
    return kIo;
  }
  return kOk;
}

Format format_for(const RunConfig& c) {
  if (c.output_format) return *c.output_format;
  return c.command == Command::solve ? Format::csv : Format::json;
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += report::format_number(v[i]);
  }
  return out;
}

const char* command_name(Command c) {
  switch (c) {
    case Command::verify: return "verify";
    case Command::solve: return "solve";
    case Command::estimate: return "estimate";
  }
  return "?";
}

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::fb: return "fb";
    case Algorithm::bb: return "bb";
    case Algorithm::both: return "both";
  }
  return "?";
}

}  // namespace

ParsedSpec parse_spec(std::string_view text) {
  const std::string input(text);
  ParsedSpec spec;
  const std::size_t colon = text.find(':');
  spec.name = std::string(text.substr(0, colon));
  if (!is_identifier(spec.name)) throw ParseError("expected a function name", input, 0);
  if (colon == std::string_view::npos) return spec;
  std::size_t pos = colon + 1;
  if (pos == text.size()) throw ParseError("expected parameters after ':'", input, pos);
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view token = text.substr(pos, end - pos);
    if (token.empty()) throw ParseError("empty parameter", input, pos);
    const std::size_t eq = token.find('=');
    std::vector<double> values;
    std::size_t value_pos = pos;
    std::string_view value = token;
    if (eq != std::string_view::npos) {
      const std::string_view key = token.substr(0, eq);
      if (!is_identifier(key)) throw ParseError("expected key=value", input, pos);
      spec.params.push_back(SpecParam{std::string(key), {}, pos});
      value_pos = pos + eq + 1;
      value = token.substr(eq + 1);
      if (value.empty()) throw ParseError("missing value for '" + std::string(key) + "'", input, value_pos);
    } else if (spec.params.empty()) {
      throw ParseError("expected key=value", input, pos);
    }
    std::size_t item = 0;
    while (item <= value.size()) {
      std::size_t stop = value.find(';', item);
      if (stop == std::string_view::npos) stop = value.size();
      double v = 0.0;
      if (!parse_double(value.substr(item, stop - item), v))
        throw ParseError("expected a finite number", input, value_pos + item);
      spec.params.back().values.push_back(v);
      item = stop + 1;
    }
    pos = end + 1;
  }
  return spec;
}

CatalogFunction parse_function(std::string_view text) { return build(parse_spec(text), text); }

EstimateTarget parse_estimate_target(std::string_view text) {
  const auto spec = parse_spec(text);
  if (spec.name == "negid") {
    const Params p(spec, text, {"d"});
    const std::size_t d = p.dim().value_or(1);
    return {"negid:d=" + std::to_string(d), d, 1.0, [](const Vector& x) { return -x; }};
  }
  const CatalogFunction f = build(spec, text);
  if (!f.has(Capability::smooth_everywhere))
    throw CapabilityError("estimate: " + f.describe() + " is not differentiable everywhere");
  return {f.describe(), f.dim(), f.box_radius(), f.gradient_field()};
}

void apply_environment(RunConfig& config) {
  const char* raw = std::getenv("PROXVERIFY_SEED");
  if (!raw) return;
  const std::string_view s(raw);
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError("PROXVERIFY_SEED must be an unsigned 64-bit integer", std::string(s), 0);
  config.seed = seed;
}

std::string canonical_config(const RunConfig& c) {
  std::ostringstream os;
  os << "command=" << command_name(c.command) << ";seed=" << c.seed << ";samples=" << c.sample_count
     << ";grid=" << c.grid_points << ";format=" << (format_for(c) == Format::json ? "json" : "csv");
  if (c.command == Command::solve) {
    os << ";f1=" << c.f1_spec << ";f2=" << c.f2_spec << ";gammas=" << list_text(c.gammas)
       << ";x0=" << (c.x0 ? list_text(*c.x0) : "zeros") << ";iters=" << c.iterations
       << ";algo=" << algorithm_name(c.algorithm) << ";bb_mode=" << solvers::to_string(c.bb_mode)
       << ";stop=" << report::format_number(c.stop_tolerance);
  } else {
    os << ";function=" << c.function_spec << ";beta=" << (c.beta ? report::format_number(*c.beta) : "sweep");
  }
  return os.str();
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const CatalogFunction f = parse_function(config.function_spec);
  const std::string digest = report::fnv1a_hex(canonical_config(config));
  const auto declared = f.lipschitz_beta();
  const std::vector<double> betas = config.beta ? std::vector<double>{*config.beta} : verify::beta_sweep(f);

  verify::SuiteConfig suite{config.seed, config.sample_count, config.grid_points, verify::Execution::parallel, digest};
  const SampleSpec samples{config.seed, config.sample_count, f.box_radius()};

  report::VerifyDocument doc{f.describe(), declared, config.sample_count, config.grid_points, config.seed, digest, {}};
  std::size_t unexpected = 0;
  for (double beta : betas) {
    report::SweepEntry entry{beta, {}};
    const bool sub_critical = !declared || beta < *declared * (1.0 - 1e-12);
    auto add = [&](const char* suite_name, const verify::CheckResult& r) {
      std::string label = verify::to_string(r.status);
      if (r.status == verify::Status::fail) {
        if (r.kind == verify::CheckKind::condition && sub_critical) label = "EXPECTED_FAIL";
        else ++unexpected;
      }
      entry.checks.push_back({suite_name, r, label});
    };
    const auto eq = verify::equivalence_suite(f, beta, suite);
    for (const auto& r : eq.results) add("equivalence", r);
    add("equivalence", verify::assess_equivalence_coherence(eq, declared));
    const auto breg = verify::check_bregman_bounds(f, beta, samples, config.grid_points);
    add("bregman", breg.upper);
    add("bregman", breg.lower);
    for (const auto& r : verify::second_order_suite(f, beta, samples).results) add("second_order", r);
    doc.sweep.push_back(std::move(entry));
  }

  const std::string text =
      format_for(config) == Format::json ? report::to_json(doc).dump(2) + "\n" : report::to_csv(doc);
  const int io = emit(config, text, out, err);
  if (io != kOk) return io;
  if (unexpected > 0) {
    err << "verify: " << unexpected << " unexpected FAIL result(s)\n";
    return kUnexpectedFail;
  }
  return kOk;
}

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.f2_spec.empty()) throw ParseError("solve needs --f2", "", 0);
  const CatalogFunction f1 = parse_function(config.f1_spec);
  const CatalogFunction f2 = parse_function(config.f2_spec);
  if (config.gammas.empty()) throw DomainError("solve: empty step schedule");
  const auto schedule = config.gammas.size() == 1 ? solvers::StepSchedule::constant(config.gammas.front())
                                                  : solvers::StepSchedule::list(config.gammas);
  schedule.validate();
  Vector x0 = Vector::zeros(f1.dim());
  if (config.x0) {
    if (config.x0->size() == 1) x0 = Vector::constant(f1.dim(), config.x0->front());
    else x0 = Vector(*config.x0);
  }
  solvers::SolveOptions options{config.iterations, config.stop_tolerance, config.grid_points};
  // Comparing traces needs them iterate-for-iterate.
  if (config.algorithm == Algorithm::both) options.stop_tolerance = 0.0;

  std::optional<solvers::SolveTrace> fb, bb;
  if (config.algorithm != Algorithm::bb) fb = solvers::forward_backward(f1, f2, schedule, x0, options);
  if (config.algorithm != Algorithm::fb) bb = solvers::backward_backward(f1, f2, schedule, x0, config.bb_mode, options);
  std::optional<double> deviation;
  if (fb && bb) deviation = solvers::compare_traces(*fb, *bb);

  std::string text;
  if (format_for(config) == Format::json) {
    nlohmann::json traces = nlohmann::json::object();
    if (fb) traces["fb"] = report::to_json(*fb);
    if (bb) traces["bb"] = report::to_json(*bb);
    nlohmann::json body{{"f1", f1.describe()},
                        {"f2", f2.describe()},
                        {"beta2", report::number(*f2.lipschitz_beta())},
                        {"algorithm", algorithm_name(config.algorithm)},
                        {"bb_prox_mode", solvers::to_string(config.bb_mode)},
                        {"schedule",
                         {{"kind", schedule.kind() == solvers::StepSchedule::Kind::constant ? "CONSTANT" : "LIST"},
                          {"values", config.gammas}}},
                        {"x0", report::vector(x0)},
                        {"traces", std::move(traces)}};
    body["max_iterate_deviation"] = deviation ? report::number(*deviation) : nlohmann::json(nullptr);
    const nlohmann::json doc{{"header", report::header(config.seed, report::fnv1a_hex(canonical_config(config)))},
                             {"body", std::move(body)}};
    text = doc.dump(2) + "\n";
  } else if (fb && bb) {
    // Both traces in one table, distinguished by a leading algo column.
    std::ostringstream a, b;
    solvers::write_trace_csv(a, *fb);
    solvers::write_trace_csv(b, *bb);
    std::istringstream ia(a.str()), ib(b.str());
    std::string line;
    std::getline(ia, line);
    text = "algo," + line + "\n";
    std::getline(ib, line);
    while (std::getline(ia, line)) text += "fb," + line + "\n";
    while (std::getline(ib, line)) text += "bb," + line + "\n";
  } else {
    std::ostringstream os;
    solvers::write_trace_csv(os, fb ? *fb : *bb);
    text = os.str();
  }
  const int io = emit(config, text, out, err);
  if (deviation) err << "max_iterate_deviation=" << report::format_number(*deviation) << '\n';
  return io;
}

int cmd_estimate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto target = parse_estimate_target(config.function_spec);
  const auto pairs = sample_pairs(SampleSpec{config.seed, config.sample_count, target.radius}, target.dim);
  const auto est = verify::estimate_constants(target.map, pairs);
  const double gap = std::abs(est.lipschitz - est.cocoercivity) / std::max({est.lipschitz, est.cocoercivity, 1e-300});
  std::string text;
  if (format_for(config) == Format::json) {
    nlohmann::json body{{"target", target.name},
                        {"sample_count", config.sample_count},
                        {"pairs", est.pairs},
                        {"lipschitz_estimate", report::number(est.lipschitz)},
                        {"cocoercivity_estimate", report::number(est.cocoercivity)},
                        {"relative_gap", report::number(gap)},
                        {"cocoercivity_violations", est.cocoercivity_violations}};
    body["violation_witness"] =
        est.violation_witness
            ? nlohmann::json::array(
                  {report::vector(est.violation_witness->first), report::vector(est.violation_witness->second)})
            : nlohmann::json(nullptr);
    const nlohmann::json doc{{"header", report::header(config.seed, report::fnv1a_hex(canonical_config(config)))},
                             {"body", std::move(body)}};
    text = doc.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "target,pairs,lipschitz_estimate,cocoercivity_estimate,relative_gap,cocoercivity_violations\n"
       << report::csv_field(target.name) << ',' << est.pairs << ',' << report::format_number(est.lipschitz) << ','
       << report::format_number(est.cocoercivity) << ',' << report::format_number(gap) << ','
       << est.cocoercivity_violations << '\n';
    text = os.str();
  }
  return emit(config, text, out, err);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.command) {
      case Command::verify: return cmd_verify(config, out, err);
      case Command::solve: return cmd_solve(config, out, err);
      case Command::estimate: return cmd_estimate(config, out, err);
    }
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: " << (e.input().empty() ? std::string(e.what()) : e.annotated()) << '\n';
    return kUsage;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (residual " << report::format_number(e.residual()) << ")\n";
    return kUnexpectedFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kUnexpectedFail;
  }
}

}  // namespace proxverify::cli
