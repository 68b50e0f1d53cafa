#include "curesieve/inference.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "curesieve/errors.hpp"
#include "curesieve/stats.hpp"

namespace curesieve {

ScoreMatrix score_matrix(const FitResult& fit, const Dataset& data,
                         Parameterization par) {
  const LikelihoodContext ctx(data, fit.knots);
  ScoreMatrix sm;
  sm.parameterization = par;
  ctx.score_rows(fit.params, sm.beta_scores, sm.coef_scores);
  if (par == Parameterization::Alpha) {
    const KnotSequence& ks = fit.knots;
    for (int j = 0; j < ks.size(); ++j)
      sm.coef_scores.col(j) *= ks.span(j) / ks.order();
  }
  for (int i = 0; i < sm.beta_scores.rows(); ++i) {
    if (!sm.beta_scores.row(i).allFinite() ||
        !sm.coef_scores.row(i).allFinite())
      throw InferenceError("non-finite score for subject " +
                           std::to_string(i));
  }
  return sm;
}

namespace {

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

InfoBlocks observed_information(const ScoreMatrix& sm) {
  const int n = static_cast<int>(sm.beta_scores.rows());
  const int p = static_cast<int>(sm.coef_scores.cols());
  if (n == 0) throw InferenceError("empty score matrix");
  InfoBlocks blocks;
  blocks.n_obs = n;
  blocks.parameterization = sm.parameterization;
  const double inv_n = 1.0 / n;
  blocks.a11 = symmetrize(inv_n * (sm.beta_scores.transpose() * sm.beta_scores));
  blocks.a12 = inv_n * (sm.beta_scores.transpose() * sm.coef_scores);
  blocks.a22 = symmetrize(inv_n * (sm.coef_scores.transpose() * sm.coef_scores));

  Matrix a22r = blocks.a22;
  const double trace = blocks.a22.trace();
  Eigen::SelfAdjointEigenSolver<Matrix> es(a22r);
  if (es.eigenvalues().minCoeff() < 1e-10 * trace) {
    blocks.ridge_used = 1e-8 * trace / p;
    a22r.diagonal().array() += blocks.ridge_used;
    es.compute(a22r);
    if (!(es.eigenvalues().minCoeff() > 0.0))
      throw InferenceError("coefficient score block singular after ridge");
  }
  Eigen::LDLT<Matrix> a22_ldlt(a22r);
  blocks.o_hat =
      symmetrize(blocks.a11 -
                 blocks.a12 * a22_ldlt.solve(blocks.a12.transpose()));

  Eigen::LDLT<Matrix> a11_ldlt(blocks.a11);
  Matrix o_tilde = a22r - blocks.a12.transpose() * a11_ldlt.solve(blocks.a12);
  if (!o_tilde.allFinite())
    throw InferenceError("regression score block singular");
  blocks.o_tilde = symmetrize(o_tilde);
  return blocks;
}

std::vector<CiRow> beta_ci(const InfoBlocks& blocks, const FitResult& fit,
                           double level) {
  if (!(level > 0.0 && level < 1.0))
    throw ConfigurationError("confidence level must lie in (0, 1)");
  const int d = static_cast<int>(blocks.o_hat.rows());
  Eigen::LDLT<Matrix> ldlt(blocks.o_hat);
  const Matrix inv = ldlt.solve(Matrix::Identity(d, d));
  if (!inv.allFinite())
    throw InferenceError("information matrix for beta is not invertible");
  const double z = norm_ppf(0.5 + 0.5 * level);
  std::vector<CiRow> rows(d);
  for (int s = 0; s < d; ++s) {
    const double var = inv(s, s) / blocks.n_obs;
    if (!(var >= 0.0) || !std::isfinite(var))
      throw InferenceError("negative variance estimate for beta");
    CiRow& row = rows[s];
    row.estimate = fit.params.beta[s];
    row.se = std::sqrt(var);
    row.lower = row.estimate - z * row.se;
    row.upper = row.estimate + z * row.se;
    row.p_value = row.se > 0.0
                      ? 2.0 * norm_cdf(-std::abs(row.estimate) / row.se)
                      : (row.estimate == 0.0 ? 1.0 : 0.0);
  }
  return rows;
}

std::pair<double, double> cumhaz_increment(const FitResult& fit,
                                           const InfoBlocks& blocks,
                                           double q, double t) {
  if (q > t) throw DomainError("cumulative-hazard increment requires q <= t");
  if (q == t) return {0.0, 0.0};
  const KnotSequence& ks = fit.knots;
  const Vector it = eval_i(ks, t).values;
  const Vector iq = eval_i(ks, q).values;
  Vector omega = it - iq;
  const double estimate = fit.params.eta.dot(omega);
  if (blocks.parameterization == Parameterization::Alpha)
    for (int j = 0; j < ks.size(); ++j) omega[j] *= ks.span(j) / ks.order();
  Eigen::LDLT<Matrix> ldlt(blocks.o_tilde);
  const Vector solved = ldlt.solve(omega);
  const double var = omega.dot(solved) / blocks.n_obs;
  if (!std::isfinite(var) || var < -1e-12)
    throw InferenceError("coefficient information is not invertible");
  return {estimate, std::sqrt(std::max(var, 0.0))};
}

}  // namespace curesieve
