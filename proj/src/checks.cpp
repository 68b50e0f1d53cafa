#include "curesieve/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "curesieve/likelihood.hpp"
#include "curesieve/parallel.hpp"
#include "curesieve/simulate.hpp"
#include "curesieve/spline_basis.hpp"
#include "curesieve/stats.hpp"

namespace curesieve {

namespace {

struct Failures {
  std::ostringstream detail;
  int count = 0;

  template <typename... Parts>
  void add(Parts&&... parts) {
    if (count < 8) {
      if (count > 0) detail << "; ";
      (detail << ... << parts);
    }
    ++count;
  }
};

CheckResult finish(const std::string& name, Failures& f) {
  CheckResult r;
  r.name = name;
  r.passed = f.count == 0;
  if (!r.passed)
    r.detail = f.detail.str() +
               (f.count > 8 ? " (+" + std::to_string(f.count - 8) + " more)" : "");
  return r;
}

// Composite Simpson split at the interior knots; exact for splines up to
// order 4 (piecewise cubics).
double simpson_between_knots(const KnotSequence& ks, int j, double a,
                             double b) {
  std::vector<double> cuts{a};
  for (double x : ks.interior())
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c], hi = cuts[c + 1];
    const int steps = 8;  // must be even
    const double h = (hi - lo) / steps;
    double acc = eval_b(ks, lo).values[j] + eval_b(ks, hi).values[j];
    for (int i = 1; i < steps; ++i)
      acc += (i % 2 ? 4.0 : 2.0) * eval_b(ks, lo + i * h).values[j];
    total += acc * h / 3.0;
  }
  return total;
}

bool near_knot(const KnotSequence& ks, double t, double eps) {
  if (t < eps || t > ks.tau() - eps) return true;
  for (double x : ks.interior())
    if (std::abs(t - x) < eps) return true;
  return false;
}

}  // namespace

CheckResult check_spline_identities(std::uint64_t seed) {
  Failures fails;
  Rng rng(derive_seed(seed, 1));
  for (int order = 2; order <= 4; ++order) {
    std::vector<double> times(200);
    for (double& t : times) t = rng.uniform(0.0, 4.0);
    const KnotSequence ks = build_knots(times, 200, order, 4.0);
    const int p = ks.size();

    for (int g = 0; g <= 1000; ++g) {
      const double t = 4.0 * g / 1000.0;
      const Vector b = eval_b(ks, t).values;
      if (std::abs(b.sum() - 1.0) > 1e-12)
        fails.add("partition of unity off by ", b.sum() - 1.0, " at t=", t,
                  " order=", order);
      if (b.minCoeff() < 0.0) fails.add("negative basis value at t=", t);
    }

    const Vector i0 = eval_i(ks, 0.0).values;
    const Vector i1 = eval_i(ks, ks.tau()).values;
    if (i0.cwiseAbs().maxCoeff() != 0.0) fails.add("I(0) != 0 order=", order);
    if ((i1.array() - 1.0).abs().maxCoeff() != 0.0)
      fails.add("I(tau) != 1 order=", order);

    Vector prev = i0;
    for (int g = 1; g <= 200; ++g) {
      const Vector cur = eval_i(ks, 4.0 * g / 200.0).values;
      if (((cur - prev).array() < -1e-12).any())
        fails.add("I not monotone near t=", 4.0 * g / 200.0);
      if (cur.minCoeff() < -1e-12 || cur.maxCoeff() > 1.0 + 1e-12)
        fails.add("I outside [0,1] near t=", 4.0 * g / 200.0);
      prev = cur;
    }

    const double h = 1e-5;
    for (int rep = 0; rep < 40; ++rep) {
      const double t = rng.uniform(0.0, 4.0);
      if (near_knot(ks, t, 10 * h)) continue;
      const Vector m = eval_m(ks, t).values;
      const Vector fd =
          (eval_i(ks, t + h).values - eval_i(ks, t - h).values) / (2 * h);
      for (int j = 0; j < p; ++j)
        if (std::abs(m[j] - fd[j]) > 1e-6 * std::max(1.0, std::abs(m[j])))
          fails.add("M != dI/dt at t=", t, " j=", j, " diff=", m[j] - fd[j]);
    }

    for (int rep = 0; rep < 20; ++rep) {
      double a = rng.uniform(0.0, 4.0), b = rng.uniform(0.0, 4.0);
      if (a > b) std::swap(a, b);
      for (int j = 0; j < p; ++j) {
        const double exact = integrate_b(ks, j, a, b);
        const double quad = simpson_between_knots(ks, j, a, b);
        if (std::abs(exact - quad) > 1e-10)
          fails.add("integrate_b vs quadrature diff=", exact - quad, " j=", j);
      }
    }
  }
  return finish("spline-identities", fails);
}

namespace {

Params random_feasible(const KnotSequence& ks, const Constraints& cs, int d,
                       Rng& rng) {
  Params x;
  x.beta = Vector(d);
  for (int k = 0; k < d; ++k) x.beta[k] = rng.uniform(-0.8, 0.8);
  Vector y(ks.size());
  for (int j = 0; j < ks.size(); ++j) y[j] = rng.uniform(0.02, 0.4);
  const double slack = cs.sum_cap - cs.m.sum();
  if (y.sum() > 0.9 * slack) y *= 0.9 * slack / y.sum();
  x.eta = cs.m + y;
  return x;
}

}  // namespace

CheckResult check_gradient_oracle(std::uint64_t seed, bool inject_fault) {
  Failures fails;
  Rng data_rng(derive_seed(seed, 2));
  const Scenario sc = Scenario::make(HazardId::H1, TruncMode::Light, 30);
  const Dataset data = gen_dataset(sc, data_rng);
  const KnotSequence ks = knots_for_dataset(data, 3);
  const Constraints cs = make_constraints(ks, 1e-6, default_b0(data), 10.0);
  const LikelihoodContext ctx(data, ks);
  Rng rng(derive_seed(seed, 3));
  const double h = 1e-6;
  for (int rep = 0; rep < 20; ++rep) {
    Params x = random_feasible(ks, cs, data.d, rng);
    Vector gb, ge;
    ctx.gradient(x, gb, ge);
    if (inject_fault) ge[0] += 1e-3;
    for (int k = 0; k < data.d + ks.size(); ++k) {
      const bool is_beta = k < data.d;
      Params lo = x, hi = x;
      double& lo_ref = is_beta ? lo.beta[k] : lo.eta[k - data.d];
      double& hi_ref = is_beta ? hi.beta[k] : hi.eta[k - data.d];
      lo_ref -= h;
      hi_ref += h;
      const double fd = (ctx.value(hi) - ctx.value(lo)) / (2 * h);
      const double g = is_beta ? gb[k] : ge[k - data.d];
      if (std::abs(g - fd) > 1e-5 * std::max(1.0, std::abs(g)))
        fails.add("coordinate ", k, ": analytic=", g, " fd=", fd);
    }
  }
  return finish("gradient-vs-finite-difference", fails);
}

CheckResult check_equivalence_oracle(std::uint64_t seed) {
  Failures fails;
  Rng rng(derive_seed(seed, 4));
  const HazardId ids[] = {HazardId::H1, HazardId::H2, HazardId::H3};
  const TruncMode modes[] = {TruncMode::Light, TruncMode::Heavy};
  for (int rep = 0; rep < 100; ++rep) {
    const Scenario sc =
        Scenario::make(ids[rep % 3], modes[rep % 2], 5 + (rep % 46));
    Dataset data = gen_dataset(sc, rng);
    while (data.count(Status::Exact) == 0) data = gen_dataset(sc, rng);
    const KnotSequence ks = knots_for_dataset(data, 3);
    const Constraints cs = make_constraints(ks, 1e-6, 10.0, 10.0);
    const Params x = random_feasible(ks, cs, data.d, rng);
    Vector alpha(ks.size());
    for (int j = 0; j < ks.size(); ++j)
      alpha[j] = x.eta[j] * ks.order() / ks.span(j);
    const double li = loglik(x, data, ks);
    const double lb = loglik_bform(x.beta, alpha, data, ks);
    if (std::abs(li - lb) > 1e-10)
      fails.add("rep ", rep, ": I-form=", li, " B-form=", lb);
  }
  return finish("likelihood-form-equivalence", fails);
}

namespace {

struct RateTable {
  double trunc[2][3];  // [mode][hazard]
  double cens[2][3];
  double cure[3];
};

constexpr RateTable kPublishedRates{
    {{0.654, 0.501, 0.421}, {0.894, 0.831, 0.794}},
    {{0.108, 0.163, 0.195}, {0.258, 0.323, 0.359}},
    {0.135, 0.448, 0.755}};

}  // namespace

CheckResult check_dgp_rates(std::uint64_t seed, int draws) {
  Failures fails;
  struct Cell {
    double trunc = 0, cens = 0, cure = 0;
  };
  Cell cells[2][3];
  parallel_for(6, [&](int idx) {
    const int mode = idx / 3;
    const int hz = idx % 3;
    const Scenario sc = Scenario::make(
        static_cast<HazardId>(hz),
        mode == 0 ? TruncMode::Light : TruncMode::Heavy, 1);
    Rng rng(derive_seed(seed, 100 + idx));
    long uncured = 0, trunc_uncured = 0, retained_uncured = 0;
    long censored_uncured = 0, cured = 0;
    for (int i = 0; i < draws; ++i) {
      const DrawOutcome o = draw_outcome(sc, rng);
      if (o.cured) {
        ++cured;
        continue;
      }
      ++uncured;
      if (o.truncated) {
        ++trunc_uncured;
        continue;
      }
      ++retained_uncured;
      if (o.subject->status != Status::Exact) ++censored_uncured;
    }
    cells[mode][hz].trunc = static_cast<double>(trunc_uncured) / uncured;
    cells[mode][hz].cens =
        static_cast<double>(censored_uncured) / retained_uncured;
    cells[mode][hz].cure = static_cast<double>(cured) / draws;
  });
  const char* mode_names[] = {"light", "heavy"};
  for (int mode = 0; mode < 2; ++mode) {
    for (int hz = 0; hz < 3; ++hz) {
      const Cell& c = cells[mode][hz];
      if (std::abs(c.trunc - kPublishedRates.trunc[mode][hz]) > 0.01)
        fails.add(mode_names[mode], " H", hz + 1, " truncation rate ", c.trunc,
                  " vs ", kPublishedRates.trunc[mode][hz]);
      if (std::abs(c.cens - kPublishedRates.cens[mode][hz]) > 0.01)
        fails.add(mode_names[mode], " H", hz + 1, " censoring rate ", c.cens,
                  " vs ", kPublishedRates.cens[mode][hz]);
      if (std::abs(c.cure - kPublishedRates.cure[hz]) > 0.005)
        fails.add(mode_names[mode], " H", hz + 1, " cure rate ", c.cure,
                  " vs ", kPublishedRates.cure[hz]);
    }
  }
  return finish("dgp-rate-reproduction", fails);
}


std::vector<CheckResult> run_checks(const CheckOptions& opts) {
  std::vector<CheckResult> results;
  results.push_back(check_spline_identities(opts.seed));
  results.push_back(check_gradient_oracle(opts.seed, opts.inject_gradient_fault));
  results.push_back(check_equivalence_oracle(opts.seed));
  results.push_back(check_dgp_rates(opts.seed, opts.rate_draws));
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.passed) return false;
  return true;
}

}  // namespace curesieve
