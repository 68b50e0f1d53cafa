#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "curesieve/errors.hpp"
#include "curesieve/inference.hpp"
#include "curesieve/simulate.hpp"
#include "curesieve/stats.hpp"

using namespace curesieve;

namespace {

struct Fitted {
  Dataset data;
  FitResult result;
};

Fitted fitted_example(int n, std::uint64_t seed,
                      HazardId id = HazardId::H1,
                      TruncMode mode = TruncMode::Light) {
  const Scenario sc = Scenario::make(id, mode, n);
  Rng rng(seed);
  Dataset data = gen_dataset(sc, rng);
  while (data.count(Status::Exact) == 0) data = gen_dataset(sc, rng);
  const KnotSequence ks = knots_for_dataset(data, 3);
  const Constraints cs = make_constraints(ks, 1e-6, default_b0(data), 10.0);
  FitResult result = fit(data, ks, cs, FitConfig{});
  return {std::move(data), std::move(result)};
}

}  // namespace

TEST_CASE("score_matrix: column means vanish at an interior optimum") {
  const Fitted f = fitted_example(200, 101);
  REQUIRE(f.result.converged);
  const ScoreMatrix sm = score_matrix(f.result, f.data);
  const Vector beta_means = sm.beta_scores.colwise().mean();
  // first-order condition: gradient / n at the maximum
  for (int k = 0; k < beta_means.size(); ++k)
    CHECK(std::abs(beta_means[k]) < 10 * 1e-6);
}

TEST_CASE("score_matrix: rows match per-subject finite differences") {
  const Fitted f = fitted_example(30, 102);
  const ScoreMatrix sm = score_matrix(f.result, f.data);
  const KnotSequence& ks = f.result.knots;
  const double h = 1e-6;
  const Params& x = f.result.params;
  for (int i = 0; i < f.data.n(); ++i) {
    Dataset one{{f.data.subjects[i]}, f.data.tau, f.data.d};
    const LikelihoodContext ctx(one, ks);
    for (int k = 0; k < f.data.d + ks.size(); ++k) {
      Params lo = x, hi = x;
      if (k < f.data.d) {
        lo.beta[k] -= h;
        hi.beta[k] += h;
      } else {
        lo.eta[k - f.data.d] -= h;
        hi.eta[k - f.data.d] += h;
      }
      const double fd = (ctx.value(hi) - ctx.value(lo)) / (2 * h);
      const double s = k < f.data.d ? sm.beta_scores(i, k)
                                    : sm.coef_scores(i, k - f.data.d);
      REQUIRE(std::abs(s - fd) <= 1e-5 * std::max(1.0, std::abs(s)));
    }
  }
}

TEST_CASE("score_matrix: hazard-basis scores are the diagonal rescaling") {
  const Fitted f = fitted_example(60, 103);
  const ScoreMatrix eta_sm = score_matrix(f.result, f.data);
  const ScoreMatrix alpha_sm =
      score_matrix(f.result, f.data, Parameterization::Alpha);
  const KnotSequence& ks = f.result.knots;
  CHECK((alpha_sm.beta_scores - eta_sm.beta_scores).cwiseAbs().maxCoeff() ==
        0.0);
  for (int j = 0; j < ks.size(); ++j) {
    const Vector expect = eta_sm.coef_scores.col(j) * (ks.span(j) / ks.order());
    REQUIRE((alpha_sm.coef_scores.col(j) - expect).cwiseAbs().maxCoeff() <
            1e-14);
  }
}

TEST_CASE("observed_information: scalar toy case") {
  ScoreMatrix sm;
  sm.beta_scores = Matrix(4, 1);
  sm.beta_scores << 1.0, -0.5, 0.25, -0.75;
  sm.coef_scores = Matrix(4, 1);
  sm.coef_scores << 0.5, 0.5, -1.0, 0.0;
  const InfoBlocks blocks = observed_information(sm);
  const double a11 = sm.beta_scores.col(0).squaredNorm() / 4;
  const double a22 = sm.coef_scores.col(0).squaredNorm() / 4;
  const double a12 = sm.beta_scores.col(0).dot(sm.coef_scores.col(0)) / 4;
  CHECK(blocks.a11(0, 0) == doctest::Approx(a11));
  CHECK(blocks.o_hat(0, 0) == doctest::Approx(a11 - a12 * a12 / a22));
  CHECK(blocks.o_tilde(0, 0) == doctest::Approx(a22 - a12 * a12 / a11));
  CHECK(blocks.ridge_used == 0.0);
  CHECK(blocks.n_obs == 4);
}

TEST_CASE("observed_information: PSD blocks and symmetric complements") {
  const Fitted f = fitted_example(150, 104);
  const InfoBlocks blocks = observed_information(score_matrix(f.result, f.data));
  CHECK((blocks.a11 - blocks.a11.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((blocks.o_hat - blocks.o_hat.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es11(blocks.a11);
  CHECK(es11.eigenvalues().minCoeff() >= -1e-10);
  Eigen::SelfAdjointEigenSolver<Matrix> es22(blocks.a22);
  CHECK(es22.eigenvalues().minCoeff() >= -1e-10);
  Eigen::SelfAdjointEigenSolver<Matrix> eso(blocks.o_hat);
  CHECK(eso.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("observed_information: invariant under the coefficient map") {
  const Fitted f = fitted_example(120, 105);
  const InfoBlocks eta_blocks =
      observed_information(score_matrix(f.result, f.data));
  const InfoBlocks alpha_blocks = observed_information(
      score_matrix(f.result, f.data, Parameterization::Alpha));
  const double scale = eta_blocks.o_hat.cwiseAbs().maxCoeff();
  CHECK((eta_blocks.o_hat - alpha_blocks.o_hat).cwiseAbs().maxCoeff() <
        1e-10 * std::max(1.0, scale));
}

TEST_CASE("beta_ci: Wald multiplier and p-values") {
  FitResult fr{Params{(Vector(1) << 0.5).finished(), Vector::Constant(1, 0.1)},
               0.0,
               1,
               true,
               {},
               KnotSequence(3, 4.0, {2.0}),
               Constraints{}};
  InfoBlocks blocks;
  blocks.o_hat = Matrix::Identity(1, 1);
  blocks.o_tilde = Matrix::Identity(1, 1);
  blocks.n_obs = 100;
  const auto rows = beta_ci(blocks, fr, 0.95);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].se == doctest::Approx(0.1));
  CHECK(rows[0].lower == doctest::Approx(0.5 - 1.959964 * 0.1).epsilon(1e-6));
  CHECK(rows[0].upper == doctest::Approx(0.5 + 1.959964 * 0.1).epsilon(1e-6));
  CHECK(rows[0].p_value ==
        doctest::Approx(2.0 * norm_cdf(-5.0)).epsilon(1e-9));
  const auto narrow = beta_ci(blocks, fr, 0.80);
  CHECK(narrow[0].upper - narrow[0].lower <
        rows[0].upper - rows[0].lower);
  CHECK_THROWS_AS(beta_ci(blocks, fr, 1.5), ConfigurationError);
}

TEST_CASE("cumhaz_increment: degenerate and error cases") {
  const Fitted f = fitted_example(80, 106);
  const InfoBlocks blocks = observed_information(score_matrix(f.result, f.data));
  const auto [est, se] = cumhaz_increment(f.result, blocks, 1.0, 1.0);
  CHECK(est == 0.0);
  CHECK(se == 0.0);
  CHECK_THROWS_AS(cumhaz_increment(f.result, blocks, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(cumhaz_increment(f.result, blocks, 1.0, 5.0), DomainError);
}

TEST_CASE("cumhaz_increment: estimate matches cum_haz difference") {
  const Fitted f = fitted_example(100, 107);
  const InfoBlocks blocks = observed_information(score_matrix(f.result, f.data));
  const auto [est, se] = cumhaz_increment(f.result, blocks, 1.0, 2.5);
  CHECK(est == doctest::Approx(cum_haz(f.result.params, f.result.knots, 2.5) -
                               cum_haz(f.result.params, f.result.knots, 1.0))
                   .epsilon(1e-12));
  CHECK(se > 0.0);
  CHECK(std::isfinite(se));
}

TEST_CASE("cumhaz_increment: identical se in either parameterization") {
  const Fitted f = fitted_example(130, 108);
  const InfoBlocks eta_blocks =
      observed_information(score_matrix(f.result, f.data));
  const InfoBlocks alpha_blocks = observed_information(
      score_matrix(f.result, f.data, Parameterization::Alpha));
  for (double t : {1.5, 2.5, 3.5}) {
    const auto [e1, s1] = cumhaz_increment(f.result, eta_blocks, 1.0, t);
    const auto [e2, s2] = cumhaz_increment(f.result, alpha_blocks, 1.0, t);
    CHECK(e1 == e2);
    CHECK(std::abs(s1 - s2) < 1e-10 * std::max(1.0, s1));
  }
}

TEST_CASE("cumhaz_increment: finite se in a region without events") {
  // all events before t = 2, increment requested over [3, 3.5]
  Rng rng(111);
  Dataset data;
  data.tau = 4.0;
  data.d = 1;
  for (int i = 0; i < 120; ++i) {
    Vector z(1);
    z[0] = rng.normal();
    if (i % 3 == 0) {
      data.subjects.push_back(
          Subject::exact(rng.uniform(0.0, 0.4), rng.uniform(0.5, 2.0), z));
    } else if (i % 3 == 1) {
      const double u = rng.uniform(0.6, 1.2);
      data.subjects.push_back(
          Subject::interval(rng.uniform(0.0, 0.5), u, u + rng.uniform(0.1, 0.7), z));
    } else {
      data.subjects.push_back(Subject::right_censored(0.0, 4.0, z));
    }
  }
  const KnotSequence ks = knots_for_dataset(data, 3);
  const Constraints cs = make_constraints(ks, 1e-6, default_b0(data), 10.0);
  const FitResult fr = fit(data, ks, cs, FitConfig{});
  const InfoBlocks blocks = observed_information(score_matrix(fr, data));
  const auto [est, se] = cumhaz_increment(fr, blocks, 3.0, 3.5);
  CHECK(std::isfinite(est));
  CHECK(std::isfinite(se));
  CHECK(se >= 0.0);
}

TEST_CASE("observed_information: ridge fires on a degenerate direction") {
  // duplicate a single subject so the coefficient scores are rank one
  const Scenario sc = Scenario::make(HazardId::H1, TruncMode::Light, 40);
  Rng rng(109);
  Dataset data = gen_dataset(sc, rng);
  while (data.count(Status::Exact) == 0) data = gen_dataset(sc, rng);
  Dataset degen;
  degen.tau = data.tau;
  degen.d = data.d;
  const Subject* ex = nullptr;
  for (const auto& s : data.subjects)
    if (s.status == Status::Exact) ex = &s;
  REQUIRE(ex != nullptr);
  for (int i = 0; i < 20; ++i) degen.subjects.push_back(*ex);
  const KnotSequence ks = knots_for_dataset(data, 3);
  const Constraints cs = make_constraints(ks, 1e-6, default_b0(data), 10.0);
  FitConfig cfg;
  cfg.max_iter = 40;
  const FitResult fr = fit(degen, ks, cs, cfg);
  const ScoreMatrix sm = score_matrix(fr, degen);
  const InfoBlocks blocks = observed_information(sm);
  CHECK(blocks.ridge_used > 0.0);
}

TEST_CASE("score_matrix: non-finite scores are reported with the subject") {
  const Fitted f = fitted_example(50, 110);
  FitResult broken = f.result;
  broken.params.eta.setZero();  // zero hazard at exact events
  CHECK_THROWS_AS(score_matrix(broken, f.data), EvaluationError);
}
