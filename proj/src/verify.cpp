#include "proxverify/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "proxverify/errors.hpp"
#include "proxverify/moreau.hpp"
#include "proxverify/oracles.hpp"

namespace proxverify::verify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Stream offset for dual samples so they do not replay the primal draws.
constexpr std::uint64_t kDualStream = 0xD1B54A32D192ED03ULL;

void require_beta(double beta, const char* op) {
  if (!(beta > 0) || !std::isfinite(beta)) throw DomainError(std::string(op) + ": beta must be positive and finite");
}

double scale_of(double a, double b) { return std::max({1.0, std::abs(a), std::abs(b)}); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Reduction of per-sample margins. NaN marks a sample that was not checked.
struct Sweep {
  double worst = -kInf;
  std::size_t worst_index = kernels::Best::npos;
  std::size_t checked = 0;
  std::size_t violations = 0;
};

Sweep reduce(const std::vector<double>& margins) {
  Sweep s;
  for (std::size_t k = 0; k < margins.size(); ++k) {
    const double m = margins[k];
    if (std::isnan(m)) continue;
    ++s.checked;
    if (m > 0) ++s.violations;
    if (s.worst_index == kernels::Best::npos || m > s.worst) {
      s.worst = m;
      s.worst_index = k;
    }
  }
  return s;
}

CheckResult from_sweep(std::string id, const Sweep& s, const std::vector<PointPair>& witnesses, double tolerance,
                       CheckKind kind = CheckKind::condition) {
  if (s.checked == 0) return CheckResult::skipped(std::move(id), "no checkable samples", kind);
  CheckResult r;
  r.check_id = std::move(id);
  r.kind = kind;
  r.samples = s.checked;
  r.tolerance_used = tolerance;
  r.worst_residual = s.worst;
  if (s.violations > 0) {
    r.status = Status::fail;
    r.witness = witnesses[s.worst_index];
    r.reason = std::to_string(s.violations) + " of " + std::to_string(s.checked) + " samples violate";
  } else {
    r.status = Status::pass;
  }
  return r;
}

CheckResult from_midpoint(std::string id, const oracles::MidpointReport& m, double slack) {
  if (m.pairs_checked == 0) return CheckResult::skipped(std::move(id), "every sampled pair has an infinite endpoint");
  CheckResult r;
  r.check_id = std::move(id);
  r.samples = m.pairs_checked;
  r.tolerance_used = slack;
  r.worst_residual = m.worst_violation;
  if (m.ok()) {
    r.status = Status::pass;
  } else {
    r.status = Status::fail;
    r.witness = m.witness;
    r.reason = std::to_string(m.violations) + " of " + std::to_string(m.pairs_checked) +
               " pairs violate midpoint convexity";
  }
  return r;
}

std::vector<Vector> first_points(const std::vector<PointPair>& pairs) {
  std::vector<Vector> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.first);
  return out;
}

// Runs one check, turning library errors into a SKIPPED result that names them.
template <class Fn>
CheckResult guarded(const std::string& id, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return CheckResult::skipped(id, std::string("check could not run: ") + e.what());
  }
}

// Pair k scaled toward the origin by 4^-(k mod 4), so that kinks near the
// origin are probed at short range as well as across the whole box.
std::vector<PointPair> multiscale_pairs(const SampleSpec& spec, std::size_t dim) {
  auto pairs = sample_pairs(spec, dim);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double s = std::ldexp(1.0, -2 * static_cast<int>(k % 4));
    pairs[k] = {s * pairs[k].first, s * pairs[k].second};
  }
  return pairs;
}

// Dual points of the sample: gradients when f is smooth, envelope gradients
// (x - Prox_{R f} x)/R when only the prox is closed, else uniform in the dual box.
std::vector<PointPair> dual_pairs(const CatalogFunction& f, const std::vector<PointPair>& primal,
                                  const SuiteConfig& cfg) {
  std::vector<PointPair> out;
  out.reserve(primal.size());
  if (f.has(Capability::smooth_everywhere)) {
    for (const auto& [x, y] : primal) out.emplace_back(f.gradient(x), f.gradient(y));
    return out;
  }
  if (f.has(Capability::prox_closed)) {
    const double g = f.box_radius();
    auto env_grad = [&](const Vector& x) { return (x - f.prox_closed(g, x)) / g; };
    for (const auto& [x, y] : primal) out.emplace_back(env_grad(x), env_grad(y));
    return out;
  }
  return sample_pairs(SampleSpec{cfg.seed ^ kDualStream, primal.size(), f.dual_box_radius()}, f.dim());
}

struct SixResults {
  CheckResult iv;
  CheckResult v;
};

SixResults failed_preconditions(const CheckResult& iii) {
  SixResults out;
  for (auto* r : {&out.iv, &out.v}) {
    r->status = Status::fail;
    r->witness = iii.witness;
    r->worst_residual = iii.worst_residual;
    r->tolerance_used = iii.tolerance_used;
    r->samples = iii.samples;
    r->reason = "h = f* - q/beta is not convex on the sample, so h is not in Gamma_0 and the identity has no meaning";
  }
  out.iv.check_id = ids::envelope_identity;
  out.v.check_id = ids::prox_identity;
  return out;
}

// Conditions (iv) and (v) when f* is a quadratic form: h(u) = <u, M u>/2 + <b_h, u> + c_h.
SixResults closed_iv_v(const CatalogFunction& f, double beta, const QuadraticForm& h,
                       const std::vector<Vector>& points, Execution exec) {
  const std::size_t d = f.dim();
  const SymOperator shifted = SymOperator::identity(d) + beta * h.a;
  const auto eig = eigen_decompose(h.a);
  double mu_scale = 1.0;
  for (double mu : eig.values) mu_scale = std::max(mu_scale, std::abs(mu));
  const double zero_band = 1e-12 * mu_scale;

  SixResults out;
  out.iv.check_id = ids::envelope_identity;
  out.v.check_id = ids::prox_identity;
  if (eig.values.front() < -1e-9 * mu_scale) {
    const Vector e(eig.vectors.front());
    for (auto* r : {&out.iv, &out.v}) {
      r->status = Status::fail;
      r->witness = PointPair{Vector::zeros(d), e};
      r->worst_residual = -eig.values.front();
      r->tolerance_used = 1e-9 * mu_scale;
      r->samples = 1;
      r->reason = "h has negative curvature " + fmt(eig.values.front()) + " along the witness direction";
    }
    return out;
  }

  const Vector c = -1.0 * h.b;
  // Prox_{h*/beta}(x) in the eigenbasis of M: w_i = z_i beta mu_i / (1 + beta mu_i), w = y + c, z = x + c.
  auto prox_hstar = [&](const Vector& x) {
    const Vector z = x + c;
    std::vector<double> w(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      const double mu = eig.values[k];
      if (mu <= zero_band) continue;
      const Vector e(eig.vectors[k]);
      const double coef = inner(z, e) * beta * mu / (1.0 + beta * mu);
      for (std::size_t i = 0; i < d; ++i) w[i] += coef * e[i];
    }
    return Vector(std::move(w)) - c;
  };

  struct Row {
    double iv, v;
  };
  const auto rows = kernels::tabulate<Row>(
      points.size(),
      [&](std::size_t k) {
        const Vector& x = points[k];
        const Vector bx = beta * x;
        const Vector p = solve_spd(shifted, bx - beta * h.b);
        const double env = h.value(p) + inner(bx - p, bx - p) / (2.0 * beta);
        const double fx = f.value(x);
        const double bq = beta * half_sq_norm(x);
        const double iv = std::abs(fx - (bq - env)) - moreau::Tolerances::closed_form * std::max({1.0, std::abs(fx), bq});
        const Vector g = f.gradient(x);
        const double ra = norm(g - p);
        const double rb = norm(g - beta * (x - prox_hstar(x)));
        const double v = std::max(ra, rb) - moreau::Tolerances::closed_form * std::max(1.0, norm(g));
        return Row{iv, v};
      },
      exec);
  std::vector<double> m_iv, m_v;
  for (const auto& r : rows) {
    m_iv.push_back(r.iv);
    m_v.push_back(r.v);
  }
  std::vector<PointPair> witnesses;
  for (const auto& x : points) witnesses.emplace_back(x, f.gradient(x));
  out.iv = from_sweep(ids::envelope_identity, reduce(m_iv), witnesses, moreau::Tolerances::closed_form);
  out.v = from_sweep(ids::prox_identity, reduce(m_v), witnesses, moreau::Tolerances::closed_form);
  return out;
}

// Conditions (iv) and (v) in dim 1 through tabulated f* and h*.
SixResults grid_iv_v(const CatalogFunction& f, double beta, const std::vector<Vector>& points,
                     const SuiteConfig& cfg) {
  const GridSpec primal(f.box_radius(), cfg.grid_points, 1);
  const GridSpec dual(f.dual_box_radius(), cfg.grid_points, 1);
  std::vector<double> fstar;
  if (f.has(Capability::conj_closed)) {
    const CatalogFunction conj = f.conjugate();
    fstar = kernels::tabulate<double>(
        dual.size(), [&](std::size_t j) { return conj.value(dual.point(j)); }, cfg.exec);
  } else {
    fstar = oracles::ConjugateTable(f.as_field(), primal, dual, cfg.exec).values();
  }
  // H_j = h(u_j) = f*(u_j) - u_j^2 / (2 beta)
  std::vector<double> hvals(dual.size());
  for (std::size_t j = 0; j < dual.size(); ++j) {
    const double u = dual.coordinate(j);
    hvals[j] = std::isinf(fstar[j]) ? kInf : fstar[j] - u * u / (2.0 * beta);
  }
  const oracles::ConjugateTable h_table(primal, dual, hvals);
  // h*(x_i) = max_j x_i u_j - H_j over the finite entries.
  const auto hstar = kernels::tabulate<double>(
      primal.size(),
      [&](std::size_t i) {
        const double xi = primal.coordinate(i);
        double best = -kInf;
        for (std::size_t j = 0; j < dual.size(); ++j) {
          if (std::isinf(hvals[j])) continue;
          best = std::max(best, xi * dual.coordinate(j) - hvals[j]);
        }
        return best;
      },
      cfg.exec);

  const bool smooth = f.has(Capability::smooth_everywhere);
  const double tol_value = moreau::Tolerances::grid_value;
  const double tol_a = moreau::Tolerances::grid_steps * dual.step();
  const double tol_b = moreau::Tolerances::grid_steps * (dual.step() + beta * primal.step());

  std::vector<double> m_iv, m_v;
  std::vector<PointPair> witnesses;
  for (const auto& x : points) {
    const Vector bx = beta * x;
    const auto p = h_table.argmin_with(
        [&](const Vector& u) { return inner(bx - u, bx - u) / (2.0 * beta); }, Execution::serial);
    const double fx = f.value(x);
    const double bq = beta * half_sq_norm(x);
    m_iv.push_back(std::abs(fx - (bq - p.value)) - tol_value * std::max(1.0, std::abs(fx)));
    if (smooth) {
      const Vector g = f.gradient(x);
      const double ra = norm(g - p.point) - tol_a;
      const auto y = kernels::argmin(
          primal.size(),
          [&](std::size_t i) {
            const double d = x[0] - primal.coordinate(i);
            return hstar[i] / beta + 0.5 * d * d;
          },
          Execution::serial);
      const double rb = norm(g - beta * (x - primal.point(y.index))) - tol_b;
      m_v.push_back(std::max(ra, rb));
      witnesses.emplace_back(x, g);
    } else {
      m_v.push_back(kNaN);
      witnesses.emplace_back(x, p.point);
    }
  }
  SixResults out;
  out.iv = from_sweep(ids::envelope_identity, reduce(m_iv), witnesses, tol_value);
  if (smooth) {
    out.v = from_sweep(ids::prox_identity, reduce(m_v), witnesses, std::max(tol_a, tol_b));
  } else {
    out.v = CheckResult::skipped(ids::prox_identity, "f is not differentiable everywhere; no gradient to compare");
  }
  return out;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::skipped: return "SKIPPED";
  }
  return "?";
}

CheckResult CheckResult::skipped(std::string id, std::string reason, CheckKind kind) {
  CheckResult r;
  r.check_id = std::move(id);
  r.status = Status::skipped;
  r.reason = std::move(reason);
  r.kind = kind;
  return r;
}

void validate(const CheckResult& r) {
  if (r.status == Status::fail && !r.witness) throw DomainError("CheckResult " + r.check_id + ": FAIL without witness");
  if (r.status == Status::skipped && r.reason.empty())
    throw DomainError("CheckResult " + r.check_id + ": SKIPPED without reason");
}

const CheckResult& VerificationReport::find(const std::string& id) const {
  for (const auto& r : results)
    if (r.check_id == id) return r;
  throw DomainError("VerificationReport: no check " + id);
}

CheckResult check_lipschitz(const VectorField& t, double beta, std::span<const PointPair> pairs, Execution exec) {
  require_beta(beta, "check_lipschitz");
  struct Row {
    double margin, ratio;
  };
  const auto rows = kernels::tabulate<Row>(
      pairs.size(),
      [&](std::size_t k) {
        const auto& [x, y] = pairs[k];
        const double nd = distance(x, y);
        if (nd == 0.0) return Row{kNaN, kNaN};
        const double nt = distance(t(x), t(y));
        return Row{nt - beta * nd * (1.0 + kPairSlack), nt / nd};
      },
      exec);
  std::vector<double> margins;
  double sup = 0.0;
  for (const auto& r : rows) {
    margins.push_back(r.margin);
    if (!std::isnan(r.ratio)) sup = std::max(sup, r.ratio);
  }
  const std::vector<PointPair> witnesses(pairs.begin(), pairs.end());
  auto r = from_sweep(ids::lipschitz, reduce(margins), witnesses, kPairSlack);
  if (r.status != Status::skipped) r.estimate = sup;
  validate(r);
  return r;
}

CheckResult check_lipschitz(const VectorField& t, double beta, const SampleSpec& samples, std::size_t dim,
                            Execution exec) {
  const auto pairs = sample_pairs(samples, dim);
  return check_lipschitz(t, beta, pairs, exec);
}

CheckResult check_cocoercive(const VectorField& t, double beta, std::span<const PointPair> pairs, Execution exec) {
  require_beta(beta, "check_cocoercive");
  struct Row {
    double margin, ratio;
  };
  const auto rows = kernels::tabulate<Row>(
      pairs.size(),
      [&](std::size_t k) {
        const auto& [x, y] = pairs[k];
        const Vector d = x - y;
        const Vector td = t(x) - t(y);
        const double lhs = inner(td, td);
        const double ip = inner(d, td);
        const double rhs = beta * ip;
        return Row{lhs - rhs - kPairSlack * scale_of(lhs, rhs), ip > 0 ? lhs / ip : kNaN};
      },
      exec);
  std::vector<double> margins;
  double sup = 0.0;
  for (const auto& r : rows) {
    margins.push_back(r.margin);
    if (!std::isnan(r.ratio)) sup = std::max(sup, r.ratio);
  }
  const std::vector<PointPair> witnesses(pairs.begin(), pairs.end());
  auto r = from_sweep(ids::cocoercive, reduce(margins), witnesses, kPairSlack);
  if (r.status != Status::skipped) r.estimate = sup;
  validate(r);
  return r;
}

CheckResult check_cocoercive(const VectorField& t, double beta, const SampleSpec& samples, std::size_t dim,
                             Execution exec) {
  const auto pairs = sample_pairs(samples, dim);
  return check_cocoercive(t, beta, pairs, exec);
}

VerificationReport equivalence_suite(const CatalogFunction& f, double beta, const SuiteConfig& cfg) {
  require_beta(beta, "equivalence_suite");
  VerificationReport report{f.describe(), beta, {}, cfg.config_digest, cfg.seed};
  const std::size_t d = f.dim();
  const bool smooth = f.has(Capability::smooth_everywhere);
  const auto pairs = multiscale_pairs(SampleSpec{cfg.seed, cfg.sample_count, f.box_radius()}, d);
  const auto points = first_points(pairs);
  const std::string not_smooth = "f is not differentiable everywhere; the condition is stated for a gradient";

  // (i)
  report.results.push_back(guarded(ids::lipschitz, [&] {
    if (!smooth) return CheckResult::skipped(ids::lipschitz, not_smooth);
    auto r = check_lipschitz(f.gradient_field(), beta, pairs, cfg.exec);
    r.check_id = ids::lipschitz;
    return r;
  }));

  // (ii)
  report.results.push_back(guarded(ids::beta_q_minus_f, [&] {
    const auto g = [&f, beta](const Vector& x) { return beta * half_sq_norm(x) - f.value(x); };
    auto r = from_midpoint(ids::beta_q_minus_f, oracles::midpoint_convexity_check(g, pairs, kMidpointSlack, cfg.exec),
                           kMidpointSlack);
    if (f.has(Capability::hessian) && r.status != Status::skipped) {
      const double tol = 1e-9 * std::max(1.0, beta);
      for (const auto& x : points) {
        const SymOperator gap = beta * SymOperator::identity(d) - f.hessian(x);
        const auto eig = eigen_decompose(gap);
        r.worst_residual = std::max(r.worst_residual, -eig.values.front() - tol);
        if (eig.values.front() < -tol && r.status == Status::pass) {
          r.status = Status::fail;
          r.witness = PointPair{x, Vector(eig.vectors.front())};
          r.reason = "beta Id - Hess f(x) has eigenvalue " + fmt(eig.values.front());
        }
      }
    }
    return r;
  }));

  // (iii)
  std::optional<ShiftedConjugate> h;
  std::string no_conjugate;
  try {
    h.emplace(f, beta, cfg.grid_points);
  } catch (const CapabilityError& e) {
    no_conjugate = std::string("no conjugate path: ") + e.what();
  }
  std::vector<PointPair> duals;
  CheckResult iii;
  if (!h) {
    iii = CheckResult::skipped(ids::conjugate_strong, no_conjugate);
  } else {
    iii = guarded(ids::conjugate_strong, [&] {
      duals = dual_pairs(f, pairs, cfg);
      const double slack = h->path() == ConjugatePath::closed ? kMidpointSlack : moreau::Tolerances::grid_value;
      return from_midpoint(ids::conjugate_strong,
                           oracles::midpoint_convexity_check(h->as_field(), duals, slack, cfg.exec), slack);
    });
  }
  report.results.push_back(iii);

  // (iv), (v)
  SixResults iv_v;
  if (iii.status == Status::skipped) {
    const std::string why = "depends on h = f* - q/beta, which was not checked: " + iii.reason;
    iv_v.iv = CheckResult::skipped(ids::envelope_identity, why);
    iv_v.v = CheckResult::skipped(ids::prox_identity, why);
  } else if (iii.status == Status::fail) {
    iv_v = failed_preconditions(iii);
  } else if (h->quadratic_form()) {
    try {
      iv_v = closed_iv_v(f, beta, *h->quadratic_form(), points, Execution::serial);
    } catch (const Error& e) {
      iv_v.iv = CheckResult::skipped(ids::envelope_identity, std::string("check could not run: ") + e.what());
      iv_v.v = CheckResult::skipped(ids::prox_identity, iv_v.iv.reason);
    }
  } else if (d == 1) {
    iv_v = grid_iv_v(f, beta, points, cfg);
  } else {
    const std::string why = "h has no closed-form prox and tabulating h and h* is limited to dim 1 (dim " +
                            std::to_string(d) + ")";
    iv_v.iv = CheckResult::skipped(ids::envelope_identity, why);
    iv_v.v = CheckResult::skipped(ids::prox_identity, why);
  }
  report.results.push_back(iv_v.iv);
  report.results.push_back(iv_v.v);

  // (vi)
  report.results.push_back(guarded(ids::cocoercive, [&] {
    if (!smooth) return CheckResult::skipped(ids::cocoercive, not_smooth);
    return check_cocoercive(f.gradient_field(), beta, pairs, cfg.exec);
  }));

  for (const auto& r : report.results) validate(r);
  return report;
}

CheckResult assess_equivalence_coherence(const VerificationReport& report, std::optional<double> declared_beta,
                                         double margin) {
  const char* first_order[] = {ids::lipschitz, ids::beta_q_minus_f, ids::conjugate_strong, ids::cocoercive};
  const char* all_six[] = {ids::lipschitz,         ids::beta_q_minus_f, ids::conjugate_strong,
                           ids::envelope_identity, ids::prox_identity,  ids::cocoercive};
  CheckResult r;
  r.check_id = ids::coherence;
  r.kind = CheckKind::consistency;
  r.tolerance_used = margin;
  r.samples = 0;

  std::optional<PointPair> any_witness;
  std::vector<const CheckResult*> checked;
  for (const char* id : first_order) {
    const auto& c = report.find(id);
    if (c.status == Status::skipped) continue;
    checked.push_back(&c);
    if (c.witness && !any_witness) any_witness = c.witness;
  }
  auto fail = [&](std::string why) {
    r.status = Status::fail;
    r.reason = std::move(why);
    r.worst_residual = 1.0;
    // A disagreement need not come with a violating pair; fall back to the origin.
    const std::size_t d = report.results.empty() || !any_witness ? 1 : any_witness->first.dim();
    r.witness = any_witness ? *any_witness : PointPair{Vector::zeros(d), Vector::zeros(d)};
    return r;
  };
  r.samples = checked.size();
  if (checked.empty()) {
    return CheckResult::skipped(ids::coherence, "none of (i), (ii), (iii), (vi) could be checked",
                                CheckKind::consistency);
  }
  for (const auto* c : checked) {
    if (c->status != checked.front()->status)
      return fail(std::string("verdicts disagree: ") + checked.front()->check_id + " is " +
                  to_string(checked.front()->status) + " but " + c->check_id + " is " + to_string(c->status));
  }
  const double beta = report.beta;
  if (declared_beta && beta >= *declared_beta * (1.0 - 1e-12)) {
    for (const char* id : all_six) {
      const auto& c = report.find(id);
      if (c.status == Status::fail)
        return fail(std::string(id) + " fails although beta >= declared Lipschitz constant " + fmt(*declared_beta));
    }
  } else if (!declared_beta || beta < *declared_beta * (1.0 - margin)) {
    for (const auto* c : checked) {
      if (c->status != Status::fail)
        return fail(c->check_id + " passes although beta is below the smallest valid constant");
    }
  }
  r.status = Status::pass;
  r.worst_residual = 0.0;
  return r;
}

double bregman(const CatalogFunction& f, const Vector& x, const Vector& y) {
  if (!f.has(Capability::grad)) throw CapabilityError("bregman: " + f.name() + " does not provide GRAD");
  return f.value(x) - f.value(y) - inner(x - y, f.gradient(y));
}

BregmanBounds check_bregman_bounds(const CatalogFunction& f, double beta, const SampleSpec& samples,
                                   std::size_t grid_points, Execution exec) {
  require_beta(beta, "check_bregman_bounds");
  BregmanBounds out;
  if (!f.has(Capability::smooth_everywhere)) {
    const std::string why = "f is not differentiable everywhere; the Bregman distance needs a gradient";
    out.upper = CheckResult::skipped(ids::bregman_upper, why);
    out.lower = CheckResult::skipped(ids::bregman_lower, why);
    return out;
  }
  const std::size_t d = f.dim();
  const auto pairs = sample_pairs(samples, d);

  {
    const auto margins = kernels::tabulate<double>(
        pairs.size(),
        [&](std::size_t k) {
          const auto& [x, y] = pairs[k];
          const double lhs = bregman(f, x, y);
          const double rhs = beta * half_sq_norm(x - y);
          return lhs - rhs - kPairSlack * scale_of(lhs, rhs);
        },
        exec);
    out.upper = from_sweep(ids::bregman_upper, reduce(margins), pairs, kPairSlack);
  }

  std::vector<PointPair> duals;
  for (const auto& [x, y] : pairs) duals.emplace_back(f.gradient(x), f.gradient(y));

  std::optional<CatalogFunction> conj;
  if (f.has(Capability::conj_closed)) conj = f.conjugate();
  if (conj && conj->has(Capability::grad)) {
    const auto margins = kernels::tabulate<double>(
        duals.size(),
        [&](std::size_t k) {
          const auto& [u, v] = duals[k];
          const double lhs = beta * bregman(*conj, u, v);
          const double rhs = half_sq_norm(u - v);
          return rhs - lhs - kPairSlack * scale_of(lhs, rhs);
        },
        exec);
    out.lower = from_sweep(ids::bregman_lower, reduce(margins), duals, kPairSlack);
  } else if (d <= 2) {
    // Grid conjugate; its argmax is the gradient of f* wherever f* is differentiable.
    const auto grid = GridSpec::budgeted(f.box_radius(), grid_points, d);
    const auto field = f.as_field();
    constexpr double probe = 1e-5;
    std::vector<double> margins;
    for (const auto& [u, v] : duals) {
      for (const Vector* w : {&u, &v}) {
        for (std::size_t i = 0; i <= 2 * d; ++i) {
          const Vector at = i == 0 ? *w
                                   : *w + ((i % 2 == 1) ? probe : -probe) * Vector::unit(d, (i - 1) / 2);
          if (oracles::grid_conjugate(field, at, grid, exec).boundary) {
            out.lower = CheckResult::skipped(
                ids::bregman_lower, "f* is not differentiable at sampled dual point " + to_string(*w) +
                                        ": it is +inf arbitrarily close by (boundary of dom f*)");
            return out;
          }
        }
      }
      const auto gu = oracles::grid_conjugate(field, u, grid, exec);
      const auto gv = oracles::grid_conjugate(field, v, grid, exec);
      const double lhs = beta * (gu.value - gv.value - inner(u - v, gv.argmax));
      const double rhs = half_sq_norm(u - v);
      margins.push_back(rhs - lhs - moreau::Tolerances::grid_value * scale_of(lhs, rhs));
    }
    out.lower = from_sweep(ids::bregman_lower, reduce(margins), duals, moreau::Tolerances::grid_value);
  } else {
    out.lower = CheckResult::skipped(ids::bregman_lower,
                                     "f* has no closed-form gradient and grid conjugates are limited to dim <= 2");
  }
  validate(out.upper);
  validate(out.lower);
  return out;
}

VerificationReport second_order_suite(const CatalogFunction& f, double beta, const SampleSpec& samples,
                                      Execution exec) {
  require_beta(beta, "second_order_suite");
  VerificationReport report{f.describe(), beta, {}, {}, samples.seed};
  const char* chain_ids[] = {ids::hessian_psd, ids::norm_bound, ids::sandwich, ids::reflection};
  if (!f.has(Capability::smooth_everywhere)) {
    const std::string why = "f is not twice differentiable everywhere";
    for (const char* id : chain_ids) report.results.push_back(CheckResult::skipped(id, why));
    report.results.push_back(CheckResult::skipped(ids::chain, why, CheckKind::consistency));
    report.results.push_back(CheckResult::skipped(ids::first_order, why, CheckKind::consistency));
    return report;
  }
  const std::size_t d = f.dim();
  const bool analytic = f.has(Capability::hessian);
  const double tol = analytic ? 1e-9 : 1e-6;
  const auto points = sample_points(samples, d);
  const auto field = f.as_field();
  const SymOperator id = SymOperator::identity(d);

  struct Row {
    double a, b, c, dd;     // margins, > 0 means violated
    bool pa, pb, pc, pd;    // pointwise verdicts
    std::vector<double> worst_direction;
    std::string warning;
  };
  const auto rows = kernels::tabulate<Row>(
      points.size(),
      [&](std::size_t k) {
        Row r;
        SymOperator hess = SymOperator::identity(d);
        if (analytic) {
          hess = f.hessian(points[k]);
        } else {
          auto fd = oracles::fd_hessian(field, points[k]);
          hess = fd.hessian;
          if (fd.warning) r.warning = *fd.warning;
        }
        const SymOperator h = (1.0 / beta) * hess;
        const auto eig = eigen_decompose(h);
        const double lo = eig.values.front();
        const double hi = eig.values.back();
        r.a = -lo - tol;
        r.b = op_norm(h) - 1.0 - tol;
        r.c = std::max(-lo - tol, hi - 1.0 - tol);
        r.dd = op_norm(2.0 * h - id) - 1.0 - 2.0 * tol;
        r.pa = r.a <= 0;
        r.pb = r.b <= 0;
        r.pc = r.c <= 0;
        r.pd = r.dd <= 0;
        r.worst_direction = -lo > hi - 1.0 ? eig.vectors.front() : eig.vectors.back();
        return r;
      },
      exec);

  std::vector<PointPair> witnesses;
  std::vector<double> ma, mb, mc, md, mchain;
  std::string warnings;
  bool all_b = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Row& r = rows[k];
    witnesses.emplace_back(points[k], Vector(r.worst_direction));
    ma.push_back(r.a);
    mb.push_back(r.b);
    mc.push_back(r.c);
    md.push_back(r.dd);
    all_b = all_b && r.pb;
    const bool consistent = !r.pa || (r.pb == r.pc && r.pc == r.pd);
    mchain.push_back(consistent ? -1.0 : 1.0);
    if (!r.warning.empty() && warnings.empty()) warnings = r.warning;
  }
  const char* source = analytic ? "" : "finite-difference Hessian";
  auto note = [&](CheckResult r) {
    if (!analytic && r.reason.empty()) r.reason = source;
    if (!warnings.empty()) r.reason += (r.reason.empty() ? "" : "; ") + warnings;
    return r;
  };
  report.results.push_back(note(from_sweep(ids::hessian_psd, reduce(ma), witnesses, tol, CheckKind::consistency)));
  report.results.push_back(note(from_sweep(ids::norm_bound, reduce(mb), witnesses, tol)));
  report.results.push_back(note(from_sweep(ids::sandwich, reduce(mc), witnesses, tol)));
  report.results.push_back(note(from_sweep(ids::reflection, reduce(md), witnesses, 2.0 * tol)));
  report.results.push_back(note(from_sweep(ids::chain, reduce(mchain), witnesses, tol, CheckKind::consistency)));

  const auto pairs = sample_pairs(samples, d);
  const auto coco = check_cocoercive(f.gradient_field(), beta, pairs, exec);
  CheckResult agree;
  agree.check_id = ids::first_order;
  agree.kind = CheckKind::consistency;
  agree.samples = points.size() + coco.samples;
  agree.tolerance_used = tol;
  const bool coco_pass = coco.status == Status::pass;
  agree.reason = std::string("second-order ") + (all_b ? "PASS" : "FAIL") + ", first-order cocoercivity " +
                 to_string(coco.status);
  agree.estimate = coco.estimate;
  if (coco.status == Status::skipped || all_b == coco_pass) {
    agree.status = Status::pass;
    agree.worst_residual = -1.0;
  } else {
    agree.status = Status::fail;
    agree.worst_residual = 1.0;
    agree.witness = coco.witness ? *coco.witness : witnesses[reduce(mb).worst_index];
  }
  report.results.push_back(agree);
  for (const auto& r : report.results) validate(r);
  return report;
}

CheckResult check_psd_cocoercivity(const SymOperator& a, const SampleSpec& samples, Execution exec) {
  const double an = op_norm(a);
  if (!psd_check(a, 1e-12 * std::max(1.0, an)))
    throw DomainError("check_psd_cocoercivity: operator is not positive semidefinite");
  const auto points = sample_points(samples, a.dim());
  std::vector<PointPair> witnesses;
  const auto margins = kernels::tabulate<double>(
      points.size(),
      [&](std::size_t k) {
        const Vector ax = a.apply(points[k]);
        const double lhs = an * inner(points[k], ax);
        const double rhs = inner(ax, ax);
        return rhs - lhs - kPairSlack * scale_of(lhs, rhs);
      },
      exec);
  for (const auto& x : points) witnesses.emplace_back(x, a.apply(x));
  auto r = from_sweep(ids::psd_cocoercivity, reduce(margins), witnesses, kPairSlack);
  r.estimate = an;
  validate(r);
  return r;
}

ConstantEstimates estimate_constants(const VectorField& t, std::span<const PointPair> pairs, Execution exec) {
  struct Row {
    double lip, coco;
    bool violation;
  };
  const auto rows = kernels::tabulate<Row>(
      pairs.size(),
      [&](std::size_t k) {
        const auto& [x, y] = pairs[k];
        const Vector d = x - y;
        const Vector td = t(x) - t(y);
        const double nd = norm(d);
        const double nt = norm(td);
        const double ip = inner(d, td);
        Row r{kNaN, kNaN, false};
        if (nd > 0) r.lip = nt / nd;
        if (ip > 0) r.coco = nt * nt / ip;
        else r.violation = nt > 0;
        return r;
      },
      exec);
  ConstantEstimates out;
  out.pairs = pairs.size();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (!std::isnan(rows[k].lip)) out.lipschitz = std::max(out.lipschitz, rows[k].lip);
    if (!std::isnan(rows[k].coco)) out.cocoercivity = std::max(out.cocoercivity, rows[k].coco);
    if (rows[k].violation) {
      if (!out.violation_witness) out.violation_witness = pairs[k];
      ++out.cocoercivity_violations;
    }
  }
  return out;
}

std::vector<double> beta_sweep(const CatalogFunction& f) {
  const auto declared = f.lipschitz_beta();
  const double anchor = declared && *declared > 0 ? *declared : 1.0;
  return {0.75 * anchor, anchor, 1.5 * anchor};
}

}  // namespace proxverify::verify
