// Acceptance run: one PASS/FAIL line per criterion, each with its runtime limit.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "proxverify/cli.hpp"
#include "proxverify/functions.hpp"
#include "proxverify/moreau.hpp"
#include "proxverify/oracles.hpp"
#include "proxverify/solvers.hpp"
#include "proxverify/verify.hpp"

using namespace proxverify;
namespace v = proxverify::verify;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

CatalogFunction quad(const Vector& diag, const Vector& b) { return make_quadratic(SymOperator::diagonal(diag), b); }

std::vector<CatalogFunction> smooth_members() {
  return {quad(Vector{1.0}, Vector{0.0}),
          quad(Vector{1.0}, Vector{-2.0}),
          quad(Vector{2, 1}, Vector{0, 0}),
          make_quadratic(SymOperator(3, {2, 1, 0, 1, 2, 1, 0, 1, 2}), Vector{0.5, -1, 0}),
          make_huber(1.0, 1),
          make_huber(0.5, 2)};
}

std::vector<CatalogFunction> nonsmooth_members() {
  return {make_abs_l1(1), make_abs_l1(2), make_box_indicator(Vector{0.0}, 1.0)};
}

std::vector<CatalogFunction> all_members() {
  auto out = smooth_members();
  for (auto& f : nonsmooth_members()) out.push_back(f);
  out.push_back(make_zero(2));
  return out;
}

std::string at(const CatalogFunction& f, double beta) {
  std::ostringstream os;
  os << f.describe() << " beta=" << beta;
  return os.str();
}

// 1. -Id is nonexpansive but not cocoercive.
Outcome counterexample() {
  Outcome o;
  const VectorField neg = [](const Vector& x) { return -x; };
  const SampleSpec spec{42, 200, 1.0};
  const auto lip = v::check_lipschitz(neg, 1.0, spec, 2);
  const auto coco = v::check_cocoercive(neg, 1.0, spec, 2);
  o.require(lip.status == v::Status::pass, "check_lipschitz(-Id, 1) did not pass");
  o.require(coco.status == v::Status::fail && coco.witness.has_value(), "check_cocoercive(-Id, 1) did not fail");
  return o;
}

// 2. Gradients of smooth members are 1/beta*-cocoercive.
Outcome forward_direction() {
  Outcome o;
  for (const auto& f : smooth_members()) {
    const double beta = *f.lipschitz_beta();
    const auto r = v::check_cocoercive(f.gradient_field(), beta, SampleSpec{42, 500, f.box_radius()}, f.dim());
    o.require(r.status == v::Status::pass, at(f, beta) + ": cocoercivity " + v::to_string(r.status));
  }
  return o;
}

bool first_order_agree(const v::VerificationReport& r, v::Status& verdict) {
  bool seen = false;
  for (const char* id : {v::ids::lipschitz, v::ids::beta_q_minus_f, v::ids::conjugate_strong, v::ids::cocoercive}) {
    const auto& c = r.find(id);
    if (c.status == v::Status::skipped) continue;
    if (!seen) verdict = c.status;
    if (c.status != verdict) return false;
    if (c.status == v::Status::fail && !c.witness) return false;
    seen = true;
  }
  return seen;
}

// 3. (i), (ii), (iii), (vi) agree; below beta* they all fail.
Outcome coherence() {
  Outcome o;
  v::SuiteConfig cfg;
  for (const auto& f : smooth_members()) {
    for (double beta : v::beta_sweep(f)) {
      const auto r = v::equivalence_suite(f, beta, cfg);
      v::Status verdict = v::Status::skipped;
      o.require(first_order_agree(r, verdict), at(f, beta) + ": first-order verdicts disagree");
      const auto expected = beta < *f.lipschitz_beta() ? v::Status::fail : v::Status::pass;
      o.require(verdict == expected, at(f, beta) + ": unexpected verdict " + v::to_string(verdict));
      for (const char* id : {v::ids::lipschitz, v::ids::cocoercive})
        o.require(r.find(id).status != v::Status::skipped, at(f, beta) + ": " + id + " skipped");
      o.require(v::assess_equivalence_coherence(r, f.lipschitz_beta()).status == v::Status::pass,
                at(f, beta) + ": coherence check failed");
    }
  }
  for (const auto& f : nonsmooth_members()) {
    for (double beta : v::beta_sweep(f)) {
      const auto r = v::equivalence_suite(f, beta, cfg);
      v::Status verdict = v::Status::skipped;
      o.require(first_order_agree(r, verdict) && verdict == v::Status::fail, at(f, beta) + ": expected FAIL");
    }
  }
  return o;
}

// 4. Moreau decomposition, envelope gradient and firm nonexpansiveness.
Outcome moreau_identities() {
  Outcome o;
  for (const auto& f : all_members()) {
    const bool reachable = f.has(Capability::conj_closed) || f.dim() == 1;
    std::optional<moreau::ConjugateAccess> conj;
    if (reachable) conj = moreau::ConjugateAccess::best(f);
    for (double g : {0.5, 1.0, 2.0}) {
      if (conj) {
        const double tol = conj->path() == ConjugatePath::closed ? moreau::Tolerances::closed_form
                                                                  : moreau::Tolerances::grid_value;
        for (const auto& x : sample_points(SampleSpec{42, 50, f.box_radius()}, f.dim())) {
          o.require(moreau::moreau_decomposition_residual(f, g, x, *conj) <= tol, at(f, g) + ": decomposition");
          const auto r = moreau::env_gradient_residual(f, g, x, *conj);
          o.require(r.fd_vs_prox <= std::max(moreau::Tolerances::fd_absolute,
                                             moreau::Tolerances::fd_relative * r.gradient_norm),
                    at(f, g) + ": fd envelope gradient");
          o.require(r.conjugate_vs_prox <= conj->prox_tolerance(), at(f, g) + ": conjugate prox gradient");
        }
      }
      for (const auto& [x, y] : sample_pairs(SampleSpec{42, 200, f.box_radius()}, f.dim())) {
        const Vector d = moreau::prox(f, g, x) - moreau::prox(f, g, y);
        o.require(inner(x - y, d) >= inner(d, d) - 1e-9, at(f, g) + ": prox not firmly nonexpansive");
      }
    }
  }
  return o;
}

// 5. Forward-backward and backward-backward produce the same iterates.
Outcome splitting() {
  Outcome o;
  solvers::SolveOptions opt;
  opt.n_iter = 100;
  opt.stop_tolerance = 0.0;
  const std::vector<std::pair<CatalogFunction, CatalogFunction>> problems = {
      {make_abs_l1(1), quad(Vector{1.0}, Vector{-2.0})}, {make_abs_l1(2), quad(Vector{2, 1}, Vector{-1, 1})}};
  for (const auto& [f1, f2] : problems) {
    for (double g : {0.5, 1.0, 1.9}) {
      const auto s = solvers::StepSchedule::constant(g);
      const Vector x0 = Vector::constant(f1.dim(), 0.5);
      const auto fb = solvers::forward_backward(f1, f2, s, x0, opt);
      const auto bb = solvers::backward_backward(f1, f2, s, x0, solvers::BbProxMode::identity, opt);
      o.require(solvers::compare_traces(fb, bb) <= 1e-12, at(f2, g) + ": FB vs BB identity");
      if (f1.dim() == 1) {
        const auto ind = solvers::backward_backward(f1, f2, s, x0, solvers::BbProxMode::independent, opt);
        o.require(solvers::compare_traces(fb, ind) <= 1e-6, at(f2, g) + ": FB vs BB independent");
      }
    }
  }
  return o;
}

// 6. Bregman bounds.
Outcome bregman_bounds() {
  Outcome o;
  for (const auto& f : smooth_members()) {
    const double beta = *f.lipschitz_beta();
    const auto b = v::check_bregman_bounds(f, beta, SampleSpec{42, 200, f.box_radius()});
    o.require(b.upper.status == v::Status::pass, at(f, beta) + ": upper bound");
    if (f.has(Capability::conj_closed))
      o.require(b.lower.status == v::Status::pass, at(f, beta) + ": lower bound");
    if (f.name() == "huber")
      o.require(b.lower.status == v::Status::skipped && b.lower.reason.find("not differentiable") != std::string::npos,
                at(f, beta) + ": huber lower bound should be SKIPPED");
  }
  return o;
}

// 7. Second-order chain, including the forced-failure regime.
Outcome second_order() {
  Outcome o;
  for (const auto& f : smooth_members()) {
    for (double beta : v::beta_sweep(f)) {
      const auto r = v::second_order_suite(f, beta, SampleSpec{42, 100, f.box_radius()});
      o.require(r.find(v::ids::chain).status == v::Status::pass, at(f, beta) + ": chain inconsistent");
      o.require(r.find(v::ids::first_order).status == v::Status::pass, at(f, beta) + ": disagrees with first order");
      o.require(r.find(v::ids::hessian_psd).status == v::Status::pass, at(f, beta) + ": Hessian not PSD");
      const auto expected = beta < *f.lipschitz_beta() ? v::Status::fail : v::Status::pass;
      o.require(r.find(v::ids::norm_bound).status == expected, at(f, beta) + ": unexpected (b) verdict");
    }
  }
  return o;
}

// 8. |A| <x, Ax> >= |Ax|^2 for random PSD A.
Outcome psd_inequality() {
  Outcome o;
  SplitMix64 rng(42);
  for (int k = 0; k < 20; ++k) {
    const std::size_t d = 1 + static_cast<std::size_t>(k) % 8;
    const auto a = sample_psd_operator(rng, d);
    const auto r = v::check_psd_cocoercivity(a, SampleSpec{42 + static_cast<std::uint64_t>(k), 500, 1.0});
    o.require(r.status == v::Status::pass, "matrix " + std::to_string(k) + " (dim " + std::to_string(d) + ")");
  }
  return o;
}

// 9. Closed forms against brute-force oracles.
Outcome oracle_equivalence() {
  Outcome o;
  for (const auto& f : all_members()) {
    if (f.dim() > 2) continue;
    const auto grid = GridSpec::budgeted(f.box_radius(), GridSpec::kDefaultPointsPerAxis, f.dim());
    if (f.has(Capability::prox_closed)) {
      for (const auto& x : sample_points(SampleSpec{42, 10, 0.5 * f.box_radius()}, f.dim())) {
        const auto ref = oracles::grid_argmin_prox(f.as_field(), 1.0, x, grid);
        o.require(norm_inf(ref.point - f.prox_closed(1.0, x)) <= 2.0 * grid.step(), f.describe() + ": prox");
      }
    }
    if (f.has(Capability::conj_closed)) {
      const auto conj = f.conjugate();
      for (const auto& u : sample_points(SampleSpec{43, 10, 0.5 * f.dual_box_radius()}, f.dim())) {
        const auto ref = oracles::grid_conjugate(f, u, grid);
        if (ref.boundary) continue;
        o.require(std::abs(ref.value - conj.value(u)) <= 1e-4, f.describe() + ": conjugate");
      }
    }
  }
  for (const auto& f : smooth_members()) {
    const auto field = f.as_field();
    for (const auto& x : sample_points(SampleSpec{44, 100, f.box_radius()}, f.dim())) {
      const Vector g = f.gradient(x);
      o.require(norm(oracles::fd_gradient(field, x) - g) <= std::max(1e-5, 1e-4 * norm(g)), f.describe() + ": fd grad");
      if (f.has(Capability::hessian))
        o.require(max_abs_entry_diff(oracles::fd_hessian(field, x).hessian, f.hessian(x)) <= 1e-3,
                  f.describe() + ": fd Hessian");
    }
  }
  return o;
}

// 10. Same seed, same report (the timestamp aside).
Outcome determinism() {
  Outcome o;
  static const std::regex ts("\"timestamp\": \"[^\"]*\"");
  for (const char* spec : {"quadratic:d=2,diag=2;1", "l1:d=2"}) {
    cli::RunConfig c;
    c.command = cli::Command::verify;
    c.function_spec = spec;
    std::ostringstream a, b, err;
    o.require(cli::run(c, a, err) == cli::kOk && cli::run(c, b, err) == cli::kOk, std::string(spec) + ": exit code");
    o.require(std::regex_replace(a.str(), ts, "") == std::regex_replace(b.str(), ts, ""),
              std::string(spec) + ": reports differ");
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "counterexample fidelity", 1.0, counterexample},
      {2, "cocoercivity at beta*", 5.0, forward_direction},
      {3, "equivalence coherence", 30.0, coherence},
      {4, "Moreau identities", 30.0, moreau_identities},
      {5, "FB/BB equivalence", 5.0, splitting},
      {6, "Bregman bounds", 10.0, bregman_bounds},
      {7, "second-order chain", 20.0, second_order},
      {8, "PSD inequality", 5.0, psd_inequality},
      {9, "oracle equivalence", 60.0, oracle_equivalence},
      {10, "determinism", 5.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.ok && secs >= c.limit_seconds) {
      o.ok = false;
      o.detail = "over the time limit";
    }
    failures += !o.ok;
    std::printf("criterion %2d %-4s %-26s %7.2fs (limit %4.0fs)%s%s\n", c.id, o.ok ? "PASS" : "FAIL", c.name, secs,
                c.limit_seconds, o.detail.empty() ? "" : "  ", o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
