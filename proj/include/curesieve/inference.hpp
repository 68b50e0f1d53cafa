#pragma once

#include <vector>

#include "curesieve/optimizer.hpp"

namespace curesieve {

/// Coordinate system for the spline-coefficient scores: Eta is the
/// integrated-basis parameterization used by the optimizer; Alpha the
/// hazard-basis one. The two differ by the diagonal map
/// eta[j] = alpha[j]*span(j)/order.
enum class Parameterization { Eta, Alpha };

struct ScoreMatrix {
  Matrix beta_scores;   // n x d
  Matrix coef_scores;   // n x p
  Parameterization parameterization = Parameterization::Eta;
};

struct InfoBlocks {
  Matrix a11;   // d x d
  Matrix a12;   // d x p
  Matrix a22;   // p x p
  Matrix o_hat;    // information for beta: a11 - a12 a22^-1 a21
  Matrix o_tilde;  // information for the spline coefficients
  double ridge_used = 0.0;
  int n_obs = 0;
  Parameterization parameterization = Parameterization::Eta;
};

/// Per-subject analytic scores at the fitted parameters.
ScoreMatrix score_matrix(const FitResult& fit, const Dataset& data,
                         Parameterization par = Parameterization::Eta);

/// Empirical second-moment blocks of the scores and their Schur
/// complements. A near-singular coefficient block gets a diagonal ridge of
/// 1e-8 * trace/p (recorded in ridge_used) before inversion.
InfoBlocks observed_information(const ScoreMatrix& sm);

struct CiRow {
  double estimate = 0.0;
  double se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double p_value = 0.0;
};

/// Wald intervals and two-sided normal p-values for the regression
/// coefficients at the given confidence level.
std::vector<CiRow> beta_ci(const InfoBlocks& blocks, const FitResult& fit,
                           double level);

/// Estimate and delta-method standard error of the cumulative-hazard
/// increment from q to t.
std::pair<double, double> cumhaz_increment(const FitResult& fit,
                                           const InfoBlocks& blocks,
                                           double q, double t);

}  // namespace curesieve
