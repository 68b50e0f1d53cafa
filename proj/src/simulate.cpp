#include "curesieve/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curesieve/errors.hpp"
#include "curesieve/parallel.hpp"

namespace curesieve {

Scenario Scenario::make(HazardId id, TruncMode mode, int n) {
  Scenario sc;
  sc.hazard_id = id;
  sc.trunc_mode = mode;
  sc.n = n;
  sc.beta0 = Vector(2);
  sc.beta0 << 0.7, -0.5;
  return sc;
}

double Scenario::scale() const {
  switch (hazard_id) {
    case HazardId::H1:
      return std::exp(1.2);
    case HazardId::H2:
      return 1.0;
    case HazardId::H3:
      return std::exp(-1.2);
  }
  return 1.0;
}

double Scenario::cum_hazard_true(double t) const {
  if (t >= tau) return scale();
  return scale() * (-std::expm1(-t)) / (-std::expm1(-tau));
}

double Scenario::hazard_true(double t) const {
  return scale() * std::exp(-t) / (-std::expm1(-tau));
}

double Scenario::inv_cum_hazard(double s) const {
  return -std::log1p(-s * (-std::expm1(-tau)) / scale());
}

DrawOutcome draw_outcome(const Scenario& sc, Rng& rng) {
  Vector z(2);
  z[0] = rng.normal();
  z[1] = rng.bernoulli(0.5) ? 1.0 : 0.0;
  const double target = -std::log(rng.uniform()) * std::exp(-sc.beta0.dot(z));
  const bool cured = target > sc.scale();
  const double event_time =
      cured ? std::numeric_limits<double>::infinity() : sc.inv_cum_hazard(target);

  double q, a, b;
  if (sc.trunc_mode == TruncMode::Light) {
    q = rng.uniform(0.0, 1.0);
    a = rng.uniform(1.0, 4.5);
    b = rng.uniform(1.0, 4.5);
  } else {
    q = rng.uniform(0.0, sc.tau);
    a = rng.uniform(q, 4.5);
    b = rng.uniform(q, 4.5);
  }
  double u = std::min(a, b);
  double v = std::max(a, b);
  u = std::min(u, sc.tau);
  v = std::min(v, sc.tau);
  if (v - u < 0.005) u = v - 0.005;
  u = std::max(u, q);

  DrawOutcome out;
  out.cured = cured;
  if (event_time <= q) {
    out.truncated = true;  // never sampled
    return out;
  }
  if (event_time <= u)
    out.subject = Subject::exact(q, event_time, std::move(z));
  else if (event_time <= v)
    out.subject = Subject::interval(q, u, v, std::move(z));
  else
    out.subject = Subject::right_censored(q, v, std::move(z));
  return out;
}

std::optional<Subject> draw_subject(const Scenario& sc, Rng& rng) {
  return draw_outcome(sc, rng).subject;
}

Dataset gen_dataset(const Scenario& sc, Rng& rng) {
  Dataset data;
  data.tau = sc.tau;
  data.d = static_cast<int>(sc.beta0.size());
  data.subjects.reserve(sc.n);
  while (static_cast<int>(data.subjects.size()) < sc.n) {
    if (auto s = draw_subject(sc, rng)) data.subjects.push_back(std::move(*s));
  }
  return data;
}

namespace {

struct Replication {
  bool ok = false;
  Vector estimates;  // beta then increments
  Vector ses;
};

constexpr double kIncrFrom = 1.0;
constexpr double kIncrTo[] = {1.5, 2.5, 3.5};

Replication run_replication(const Scenario& sc, int rep, std::uint64_t seed,
                            const FitConfig& fit_cfg, bool with_inference,
                            const std::vector<double>* grid,
                            Vector* fitted_curve) {
  Replication out;
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
  try {
    const Dataset data = gen_dataset(sc, rng);
    const KnotSequence ks = knots_for_dataset(data, 3);
    const Constraints cs =
        make_constraints(ks, 1e-6, default_b0(data), 10.0);
    FitConfig cfg = fit_cfg;
    cfg.seed = derive_seed(derive_seed(seed, rep), 0x715EED);
    const FitResult fr = fit(data, ks, cs, cfg);
    if (!fr.converged) return out;
    if (with_inference) {
      const ScoreMatrix sm = score_matrix(fr, data);
      const InfoBlocks blocks = observed_information(sm);
      const int d = data.d;
      out.estimates.resize(d + 3);
      out.ses.resize(d + 3);
      const auto cis = beta_ci(blocks, fr, 0.95);
      for (int k = 0; k < d; ++k) {
        out.estimates[k] = cis[k].estimate;
        out.ses[k] = cis[k].se;
      }
      for (int k = 0; k < 3; ++k) {
        const auto [est, se] = cumhaz_increment(fr, blocks, kIncrFrom, kIncrTo[k]);
        out.estimates[d + k] = est;
        out.ses[d + k] = se;
      }
    }
    if (grid != nullptr) {
      fitted_curve->resize(grid->size());
      for (std::size_t g = 0; g < grid->size(); ++g)
        (*fitted_curve)[g] = hazard(fr.params, ks, (*grid)[g]);
    }
    out.ok = true;
  } catch (const Error&) {
    out.ok = false;  // counted as a failed replication
  }
  return out;
}

}  // namespace

McSummary run_mc(const Scenario& sc, int reps, std::uint64_t seed,
                 const FitConfig& fit_cfg) {
  if (reps < 1) throw ConfigurationError("reps must be >= 1");
  const int d = static_cast<int>(sc.beta0.size());
  std::vector<Replication> results(reps);
  parallel_for(reps, [&](int r) {
    results[r] = run_replication(sc, r, seed, fit_cfg, true, nullptr, nullptr);
  });

  const int n_targets = d + 3;
  Vector truth(n_targets);
  for (int k = 0; k < d; ++k) truth[k] = sc.beta0[k];
  for (int k = 0; k < 3; ++k)
    truth[d + k] = sc.cum_hazard_true(kIncrTo[k]) - sc.cum_hazard_true(kIncrFrom);

  McSummary summary;
  summary.n_reps = reps;
  const double z95 = norm_ppf(0.975);
  std::vector<std::vector<double>> est(n_targets);
  Vector se_sum = Vector::Zero(n_targets);
  Vector covered = Vector::Zero(n_targets);
  for (const Replication& r : results) {
    if (!r.ok) continue;
    ++summary.n_converged;
    for (int k = 0; k < n_targets; ++k) {
      est[k].push_back(r.estimates[k]);
      se_sum[k] += r.ses[k];
      if (std::abs(r.estimates[k] - truth[k]) <= z95 * r.ses[k])
        covered[k] += 1.0;
    }
  }
  if (reps - summary.n_converged > 0.2 * reps)
    throw McError("more than 20% of replications failed to converge");

  summary.rows.resize(n_targets);
  for (int k = 0; k < n_targets; ++k) {
    McRow& row = summary.rows[k];
    if (k < d) {
      row.target = "beta" + std::to_string(k + 1);
    } else {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "Lambda(%.1f)-Lambda(%.1f)",
                    kIncrTo[k - d], kIncrFrom);
      row.target = buf;
    }
    row.truth = truth[k];
    const auto& xs = est[k];
    const double m = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= m;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    row.mean = mean;
    row.sd = m > 1 ? std::sqrt(ss / (m - 1)) : 0.0;
    row.mean_se = se_sum[k] / m;
    row.coverage = covered[k] / m;
  }
  return summary;
}

std::vector<HazardCurvePoint> hazard_curve(const Scenario& sc, int reps,
                                           const std::vector<double>& grid,
                                           std::uint64_t seed,
                                           const FitConfig& fit_cfg) {
  if (reps < 1) throw ConfigurationError("reps must be >= 1");
  for (double t : grid)
    if (!(t >= 0.0) || !(t <= 3.9))
      throw DomainError("hazard-curve grid must lie in [0, 3.9]");
  std::vector<Replication> results(reps);
  std::vector<Vector> curves(reps);
  parallel_for(reps, [&](int r) {
    results[r] =
        run_replication(sc, r, seed, fit_cfg, false, &grid, &curves[r]);
  });
  int n_ok = 0;
  Vector mean = Vector::Zero(grid.size());
  for (int r = 0; r < reps; ++r) {
    if (!results[r].ok) continue;
    ++n_ok;
    mean += curves[r];
  }
  if (reps - n_ok > 0.2 * reps)
    throw McError("more than 20% of replications failed to converge");
  mean /= n_ok;
  std::vector<HazardCurvePoint> points(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g)
    points[g] = {grid[g], sc.hazard_true(grid[g]), mean[g]};
  return points;
}

}  // namespace curesieve
