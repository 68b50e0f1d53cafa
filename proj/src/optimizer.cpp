#include "curesieve/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curesieve/errors.hpp"
#include "curesieve/stats.hpp"

namespace curesieve {

namespace {

constexpr double kStepMin = 1e-8;
constexpr double kStepMax = 1e4;

// Projection of y onto {x >= 0, sum(x) <= cap} (Duchi et al. style).
Vector project_capped_simplex(const Vector& y, double cap) {
  if (cap <= 0.0) return Vector::Zero(y.size());
  Vector yp = y.cwiseMax(0.0);
  if (yp.sum() <= cap) return yp;
  std::vector<double> u(y.data(), y.data() + y.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumsum += u[k];
    const double cand = (cumsum - cap) / static_cast<double>(k + 1);
    if (u[k] - cand > 0.0) theta = cand;  // cap > 0 makes k = 0 qualify
  }
  return (y.array() - theta).cwiseMax(0.0);
}

}  // namespace

Params project(const Params& point, const Constraints& cs) {
  const double slack = cs.sum_cap - cs.m.sum();
  if (slack < 0.0)
    throw ConfigurationError(
        "infeasible constraints: sum of lower bounds exceeds the cap");
  Params out;
  out.beta = point.beta;
  const double norm = out.beta.norm();
  if (norm > cs.c0) out.beta *= cs.c0 / norm;
  out.eta = cs.m + project_capped_simplex(point.eta - cs.m, slack);
  return out;
}

namespace {

struct Run {
  Params x;
  double f = -std::numeric_limits<double>::infinity();
  int steps = 0;
  bool converged = false;
};

double safe_value(const LikelihoodContext& ctx, const Params& x) {
  try {
    return ctx.value(x);
  } catch (const EvaluationError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

Run ascend(const LikelihoodContext& ctx, const Constraints& cs,
           const FitConfig& cfg, Params x) {
  Run run;
  x = project(x, cs);
  double f = ctx.value(x);
  Vector gb, ge;
  ctx.gradient(x, gb, ge);
  double bb_step = 1.0;
  int consec_small = 0;
  if (cfg.trace) cfg.trace(0, f, x);

  for (int it = 0; it < cfg.max_iter; ++it) {
    Params probe{x.beta + gb, x.eta + ge};
    probe = project(probe, cs);
    const double pg_norm = std::sqrt((probe.beta - x.beta).squaredNorm() +
                                     (probe.eta - x.eta).squaredNorm());
    if (pg_norm <= cfg.grad_tol) {
      run.converged = true;
      break;
    }

    double s = std::clamp(bb_step, kStepMin, kStepMax);
    bool accepted = false;
    Params xt;
    double ft = f;
    for (int ls = 0; ls < 80 && s >= 1e-16; ++ls, s *= cfg.shrink) {
      xt = project(Params{x.beta + s * gb, x.eta + s * ge}, cs);
      const Vector db = xt.beta - x.beta;
      const Vector de = xt.eta - x.eta;
      const double ascent = gb.dot(db) + ge.dot(de);
      if (!(ascent > 0.0)) continue;  // projection arc collapsed at this scale
      ft = safe_value(ctx, xt);
      if (ft >= f + cfg.armijo_c * ascent) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no improving step representable

    Vector gbn, gen;
    ctx.gradient(xt, gbn, gen);
    const Vector dxb = xt.beta - x.beta;
    const Vector dxe = xt.eta - x.eta;
    const double num = dxb.squaredNorm() + dxe.squaredNorm();
    const double den = dxb.dot(gbn - gb) + dxe.dot(gen - ge);
    bb_step = (std::isfinite(den) && den < 0.0)
                  ? std::clamp(-num / den, kStepMin, kStepMax)
                  : 1.0;

    const double rel = std::abs(ft - f) / (std::abs(f) + 1.0);
    consec_small = rel <= cfg.f_tol ? consec_small + 1 : 0;
    x = std::move(xt);
    f = ft;
    gb = std::move(gbn);
    ge = std::move(gen);
    ++run.steps;
    if (cfg.trace) cfg.trace(run.steps, f, x);
    if (consec_small >= 5) {
      run.converged = true;
      break;
    }
  }
  run.x = std::move(x);
  run.f = f;
  return run;
}

Params initial_point(const Dataset& data, const KnotSequence& ks,
                     const Constraints& cs, const FitConfig& cfg, int start) {
  const int p = ks.size();
  Vector eta(p);
  for (int j = 0; j < p; ++j) eta[j] = ks.span(j) / ks.order();
  const int events = data.count(Status::Exact) + data.count(Status::Interval);
  const double frac = static_cast<double>(events) / data.n();
  double target = frac < 1.0 ? -std::log1p(-frac) : 0.9 * cs.sum_cap;
  target = std::clamp(target, 2.0 * cs.m.sum(), 0.9 * cs.sum_cap);
  eta *= target / eta.sum();
  Params x{Vector::Zero(data.d), std::move(eta)};
  if (start > 0) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(start)));
    for (int j = 0; j < p; ++j) x.eta[j] *= rng.uniform(0.5, 2.0);
    for (int k = 0; k < data.d; ++k) x.beta[k] = 0.1 * rng.normal();
  }
  return x;
}

std::vector<int> binding_constraints(const Params& x, const Constraints& cs) {
  const double tol = 1e-8;
  std::vector<int> active;
  const int p = static_cast<int>(cs.m.size());
  for (int j = 0; j < p; ++j)
    if (x.eta[j] <= cs.m[j] + tol * (1.0 + cs.m[j])) active.push_back(j);
  if (x.eta.sum() >= cs.sum_cap - tol * (1.0 + cs.sum_cap)) active.push_back(p);
  if (x.beta.norm() >= cs.c0 - tol * (1.0 + cs.c0)) active.push_back(p + 1);
  return active;
}

}  // namespace

FitResult fit(const Dataset& data, const KnotSequence& ks,
              const Constraints& cs, const FitConfig& cfg) {
  if (cfg.max_iter < 1 || cfg.n_starts < 1 || !(cfg.grad_tol > 0.0) ||
      !(cfg.f_tol > 0.0) || !(cfg.armijo_c > 0.0) || !(cfg.shrink > 0.0) ||
      !(cfg.shrink < 1.0))
    throw ConfigurationError("invalid fit configuration");
  if (data.count(Status::Exact) == 0)
    throw DataError(
        "at least one exactly observed event is required: the hazard is not "
        "identifiable from interval and right-censored observations alone");
  if (cs.m.size() != ks.size())
    throw ConfigurationError("constraints do not match the basis size");

  const LikelihoodContext ctx(data, ks);
  Run best;
  bool have_best = false;
  for (int start = 0; start < cfg.n_starts; ++start) {
    Run run = ascend(ctx, cs, cfg, initial_point(data, ks, cs, cfg, start));
    const bool better =
        !have_best ||
        (run.converged && !best.converged) ||
        (run.converged == best.converged && run.f > best.f);
    if (better) {
      best = std::move(run);
      have_best = true;
    }
  }

  FitResult result{best.x,
                   best.f,
                   best.steps,
                   best.converged,
                   binding_constraints(best.x, cs),
                   ks,
                   cs};
  return result;
}

}  // namespace curesieve
