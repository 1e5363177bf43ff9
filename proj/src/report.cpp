#include "proxverify/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

namespace proxverify::report {

using nlohmann::json;

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json header(std::uint64_t seed, const std::string& config_digest) {
  return json{{"tool_version", kToolVersion},
              {"schema_version", kSchemaVersion},
              {"timestamp", utc_timestamp()},
              {"seed", seed},
              {"config_digest", config_digest}};
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

json vector(const Vector& v) {
  json out = json::array();
  for (double e : v.entries()) out.push_back(number(e));
  return out;
}

json to_json(const LabeledResult& lr) {
  const auto& r = lr.result;
  json j{{"suite", lr.suite},
         {"check_id", r.check_id},
         {"status", lr.label},
         {"kind", r.kind == verify::CheckKind::condition ? "CONDITION" : "CONSISTENCY"},
         {"worst_residual", number(r.worst_residual)},
         {"tolerance_used", number(r.tolerance_used)},
         {"samples", r.samples}};
  j["witness"] = r.witness ? json::array({vector(r.witness->first), vector(r.witness->second)}) : json(nullptr);
  j["estimate"] = r.estimate ? number(*r.estimate) : json(nullptr);
  j["reason"] = r.reason;
  return j;
}

json to_json(const VerifyDocument& doc) {
  json sweep = json::array();
  std::size_t pass = 0, fail = 0, expected = 0, skipped = 0;
  for (const auto& entry : doc.sweep) {
    json checks = json::array();
    for (const auto& c : entry.checks) {
      checks.push_back(to_json(c));
      if (c.label == "PASS") ++pass;
      else if (c.label == "FAIL") ++fail;
      else if (c.label == "EXPECTED_FAIL") ++expected;
      else ++skipped;
    }
    sweep.push_back(json{{"beta", number(entry.beta)}, {"checks", std::move(checks)}});
  }
  json body{{"function", doc.function},
            {"declared_lipschitz_beta", doc.declared_beta ? number(*doc.declared_beta) : json(nullptr)},
            {"sample_count", doc.sample_count},
            {"grid_points", doc.grid_points},
            {"beta_sweep", std::move(sweep)},
            {"summary", {{"pass", pass}, {"fail", fail}, {"expected_fail", expected}, {"skipped", skipped}}}};
  return json{{"header", header(doc.seed, doc.config_digest)}, {"body", std::move(body)}};
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

namespace {

std::string joined(const Vector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.dim(); ++i) {
    if (i) out += ';';
    out += format_number(v[i]);
  }
  return out;
}

}  // namespace

std::string to_csv(const VerifyDocument& doc) {
  std::ostringstream os;
  os << "beta,suite,check_id,status,worst_residual,tolerance_used,samples,estimate,witness_x,witness_y,reason\n";
  for (const auto& entry : doc.sweep) {
    for (const auto& c : entry.checks) {
      const auto& r = c.result;
      os << format_number(entry.beta) << ',' << c.suite << ',' << r.check_id << ',' << c.label << ','
         << format_number(r.worst_residual) << ',' << format_number(r.tolerance_used) << ',' << r.samples << ','
         << (r.estimate ? format_number(*r.estimate) : "") << ',' << (r.witness ? joined(r.witness->first) : "")
         << ',' << (r.witness ? joined(r.witness->second) : "") << ',' << csv_field(r.reason) << '\n';
    }
  }
  return os.str();
}

json to_json(const solvers::SolveTrace& trace) {
  json rows = json::array();
  for (std::size_t n = 0; n < trace.iterates.size(); ++n) {
    json row{{"n", n}, {"objective", number(trace.objective_values[n])}, {"x", vector(trace.iterates[n])}};
    if (n < trace.gamma_used.size()) {
      row["gamma"] = number(trace.gamma_used[n]);
      row["gamma_effective"] = number(trace.gamma_effective[n]);
    }
    rows.push_back(std::move(row));
  }
  return json{{"iterations", trace.gamma_used.size()},
              {"converged", trace.converged},
              {"final_residual", number(trace.final_residual)},
              {"trace", std::move(rows)}};
}

}  // namespace proxverify::report
