#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "curesieve/likelihood.hpp"

namespace curesieve {

struct FitConfig {
  int max_iter = 5000;
  double grad_tol = 1e-6;   // on the projected-gradient norm
  double f_tol = 1e-9;      // relative log-likelihood change
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int n_starts = 3;
  std::uint64_t seed = 0;
  /// Optional hook called once per accepted iterate (and at the start
  /// point) with the accepted-step count, log-likelihood and parameters.
  std::function<void(int, double, const Params&)> trace;
};

struct FitResult {
  Params params;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Binding constraints: j in [0, p) marks eta[j] at its lower bound,
  /// p the coefficient-sum cap, p+1 the beta norm bound.
  std::vector<int> active_set;
  KnotSequence knots;
  Constraints constraints;
};

/// Euclidean projection onto the feasible set: beta clipped radially to the
/// c0-ball, eta shifted by its lower bounds and projected onto the capped
/// nonnegative simplex by the sort/water-filling algorithm.
Params project(const Params& point, const Constraints& constraints);

/// Projected gradient ascent with Armijo backtracking and a safeguarded
/// Barzilai-Borwein step, restarted from n_starts feasible points; keeps the
/// best converged run (best overall if none converged, flagged).
FitResult fit(const Dataset& data, const KnotSequence& ks,
              const Constraints& constraints, const FitConfig& cfg);

}  // namespace curesieve
