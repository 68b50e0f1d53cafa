#pragma once

#include <utility>
#include <vector>

#include "curesieve/spline_basis.hpp"
#include "curesieve/types.hpp"

namespace curesieve {

enum class Status { Exact, Interval, Right };

// One observation under delayed entry. The meaning of time1/time2 follows
// the censoring class: Exact carries the event time in time1; Interval the
// observation window in (time1, time2]; Right the censoring time in time1.
struct Subject {
  double entry = 0.0;
  Status status = Status::Right;
  double time1 = 0.0;
  double time2 = 0.0;
  Vector z;

  static Subject exact(double entry, double t, Vector z);
  static Subject interval(double entry, double u, double v, Vector z);
  static Subject right_censored(double entry, double v, Vector z);
};

struct Dataset {
  std::vector<Subject> subjects;
  double tau = 0.0;
  int d = 0;

  int n() const { return static_cast<int>(subjects.size()); }
  int count(Status s) const;
};

/// Checks subject invariants against tau and the covariate dimension.
/// Throws DataError naming the first offending subject.
void validate(const Dataset& data);

/// Knot sequence for fitting: quantile knots over the pooled distinct exact
/// event times, interval endpoints and censoring times below tau (entry
/// times excluded).
KnotSequence knots_for_dataset(const Dataset& data, int order);

// Model state: regression coefficients and nonnegative coefficients of the
// integrated spline basis (the baseline cumulative hazard).
struct Params {
  Vector beta;
  Vector eta;
};

// Feasible region of the sieve: eta >= m componentwise, sum(eta) <= tau*b0,
// |beta| <= c0.
struct Constraints {
  double a0 = 0.0;
  double b0 = 0.0;
  double c0 = 0.0;
  Vector m;
  double sum_cap = 0.0;
};

Constraints make_constraints(const KnotSequence& ks, double a0, double b0,
                             double c0);

/// Data-scaled default hazard cap: 10 x events per unit of follow-up time.
double default_b0(const Dataset& data);

/// Baseline cumulative hazard at t.
double cum_haz(const Params& params, const KnotSequence& ks, double t);

/// Baseline hazard at t.
double hazard(const Params& params, const KnotSequence& ks, double t);

/// Log-likelihood of the dataset under delayed entry, with the interval
/// contribution computed on the log1p/expm1 path.
double loglik(const Params& params, const Dataset& data,
              const KnotSequence& ks);

/// Analytic gradient of loglik: (d/d beta, d/d eta).
std::pair<Vector, Vector> grad_loglik(const Params& params,
                                      const Dataset& data,
                                      const KnotSequence& ks);

/// Log-likelihood in the hazard-basis coefficient form, with every
/// cumulative-hazard increment evaluated through integrate_b. Serves as the
/// cross-parameterization oracle: with alpha[j] = eta[j]*order/span(j) it
/// equals loglik.
double loglik_bform(const Vector& beta, const Vector& alpha,
                    const Dataset& data, const KnotSequence& ks);

// Precomputed per-subject basis rows; turns repeated likelihood, gradient
// and score evaluations into a handful of matrix products.
class LikelihoodContext {
 public:
  LikelihoodContext(const Dataset& data, const KnotSequence& ks);

  int n() const { return n_; }
  int dim_beta() const { return d_; }
  int dim_eta() const { return p_; }

  double value(const Params& params) const;
  void gradient(const Params& params, Vector& g_beta, Vector& g_eta) const;
  /// Per-subject score rows at params; gradient equals the column sums.
  void score_rows(const Params& params, Matrix& beta_rows,
                  Matrix& eta_rows) const;

 private:
  struct Weights {
    Vector wb;   // beta weight per subject
    Vector c1;   // weight on the entry-to-endpoint increment row
    Vector cm;   // weight on the hazard-basis row (exact only)
    Vector cw;   // weight on the within-window increment row (interval)
    Vector c2;   // weight on the entry-to-window-end increment row (interval)
  };
  Weights weights(const Params& params) const;
  void check_dims(const Params& params) const;

  int n_ = 0, d_ = 0, p_ = 0;
  std::vector<Status> status_;
  Matrix Z_;    // n x d covariates
  Matrix D1_;   // I(endpoint) - I(entry), endpoint = t/u/v by class
  Matrix D2_;   // I(v) - I(entry), interval rows only
  Matrix W_;    // I(v) - I(u), interval rows only
  Matrix Mt_;   // hazard basis at the exact event time, exact rows only
};

}  // namespace curesieve
