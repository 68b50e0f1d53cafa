#include "curesieve/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curesieve/errors.hpp"

namespace curesieve {

Subject Subject::exact(double entry, double t, Vector z) {
  return {entry, Status::Exact, t, 0.0, std::move(z)};
}

Subject Subject::interval(double entry, double u, double v, Vector z) {
  return {entry, Status::Interval, u, v, std::move(z)};
}

Subject Subject::right_censored(double entry, double v, Vector z) {
  return {entry, Status::Right, v, 0.0, std::move(z)};
}

int Dataset::count(Status s) const {
  int c = 0;
  for (const auto& sub : subjects)
    if (sub.status == s) ++c;
  return c;
}

void validate(const Dataset& data) {
  if (!(data.tau > 0.0)) throw DataError("tau must be positive");
  for (int i = 0; i < data.n(); ++i) {
    const Subject& s = data.subjects[i];
    const std::string at = "subject " + std::to_string(i) + ": ";
    if (s.z.size() != data.d)
      throw DataError(at + "covariate dimension mismatch");
    if (!(s.entry >= 0.0)) throw DataError(at + "entry time must be >= 0");
    switch (s.status) {
      case Status::Exact:
        if (!(s.entry < s.time1) || !(s.time1 <= data.tau))
          throw DataError(at + "exact event requires entry < time <= tau");
        break;
      case Status::Interval:
        if (!(s.entry <= s.time1) || !(s.time1 < s.time2) ||
            !(s.time2 <= data.tau))
          throw DataError(at +
                          "interval requires entry <= left < right <= tau");
        break;
      case Status::Right:
        if (!(s.entry <= s.time1) || !(s.time1 <= data.tau))
          throw DataError(at +
                          "right censoring requires entry <= time <= tau");
        break;
    }
  }
}

KnotSequence knots_for_dataset(const Dataset& data, int order) {
  std::vector<double> pooled;
  pooled.reserve(2 * data.subjects.size());
  for (const Subject& s : data.subjects) {
    switch (s.status) {
      case Status::Exact:
        pooled.push_back(s.time1);
        break;
      case Status::Interval:
        pooled.push_back(s.time1);
        if (s.time2 < data.tau) pooled.push_back(s.time2);
        break;
      case Status::Right:
        // censoring times spread knots over the right tail, where exact
        // events are sparse; without them the late-time cumulative hazard
        // is noticeably overestimated
        if (s.time1 < data.tau) pooled.push_back(s.time1);
        break;
    }
  }
  std::vector<double> distinct = pooled;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  return build_knots(pooled, static_cast<int>(distinct.size()), order,
                     data.tau);
}

Constraints make_constraints(const KnotSequence& ks, double a0, double b0,
                             double c0) {
  if (!(a0 > 0.0) || !(b0 > a0) || !(c0 > 0.0))
    throw ConfigurationError("constraints require 0 < a0 < b0 and c0 > 0");
  Constraints cs;
  cs.a0 = a0;
  cs.b0 = b0;
  cs.c0 = c0;
  cs.m.resize(ks.size());
  for (int j = 0; j < ks.size(); ++j)
    cs.m[j] = ks.span(j) / ks.order() * a0;
  cs.sum_cap = ks.tau() * b0;
  if (cs.m.sum() > cs.sum_cap)
    throw ConfigurationError("infeasible constraints: sum of lower bounds exceeds the cap");
  return cs;
}

double default_b0(const Dataset& data) {
  int events = 0;
  double exposure = 0.0;
  for (const Subject& s : data.subjects) {
    switch (s.status) {
      case Status::Exact:
        ++events;
        exposure += s.time1 - s.entry;
        break;
      case Status::Interval:
        ++events;
        exposure += s.time2 - s.entry;
        break;
      case Status::Right:
        exposure += s.time1 - s.entry;
        break;
    }
  }
  if (events == 0 || !(exposure > 0.0)) return 10.0;
  return 10.0 * events / exposure;
}

double cum_haz(const Params& params, const KnotSequence& ks, double t) {
  return params.eta.dot(eval_i(ks, t).values);
}

double hazard(const Params& params, const KnotSequence& ks, double t) {
  return params.eta.dot(eval_m(ks, t).values);
}

namespace {

// log(1 - exp(-x)) for x > 0 without cancellation at either end.
double log1mexp(double x) {
  return x > 0.6931471805599453 ? std::log1p(-std::exp(-x))
                                : std::log(-std::expm1(-x));
}

[[noreturn]] void throw_eval(const char* what, int subject) {
  throw EvaluationError(std::string(what) + " (subject " +
                        std::to_string(subject) + ")");
}

}  // namespace

LikelihoodContext::LikelihoodContext(const Dataset& data,
                                     const KnotSequence& ks) {
  validate(data);
  n_ = data.n();
  d_ = data.d;
  p_ = ks.size();
  status_.resize(n_);
  Z_.resize(n_, d_);
  D1_.resize(n_, p_);
  D2_ = Matrix::Zero(n_, p_);
  W_ = Matrix::Zero(n_, p_);
  Mt_ = Matrix::Zero(n_, p_);
  for (int i = 0; i < n_; ++i) {
    const Subject& s = data.subjects[i];
    status_[i] = s.status;
    Z_.row(i) = s.z.transpose();
    const Vector iq = eval_i(ks, s.entry).values;
    const Vector i1 = eval_i(ks, s.time1).values;
    D1_.row(i) = (i1 - iq).transpose();
    if (s.status == Status::Interval) {
      const Vector i2 = eval_i(ks, s.time2).values;
      D2_.row(i) = (i2 - iq).transpose();
      W_.row(i) = (i2 - i1).transpose();
    } else if (s.status == Status::Exact) {
      Mt_.row(i) = eval_m(ks, s.time1).values.transpose();
    }
  }
}

void LikelihoodContext::check_dims(const Params& params) const {
  if (params.beta.size() != d_ || params.eta.size() != p_)
    throw ConfigurationError("parameter dimensions do not match the context");
}

double LikelihoodContext::value(const Params& params) const {
  check_dims(params);
  const Vector lin = Z_ * params.beta;
  const Vector d1 = D1_ * params.eta;
  const Vector lam = Mt_ * params.eta;
  const Vector win = W_ * params.eta;
  double ll = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double e = std::exp(lin[i]);
    switch (status_[i]) {
      case Status::Exact:
        if (!(lam[i] > 0.0)) throw_eval("nonpositive hazard at exact event", i);
        ll += -e * d1[i] + lin[i] + std::log(lam[i]);
        break;
      case Status::Right:
        ll += -e * d1[i];
        break;
      case Status::Interval: {
        const double x = e * win[i];
        if (!(x > 0.0)) throw_eval("zero-probability censoring interval", i);
        ll += -e * d1[i] + log1mexp(x);
        break;
      }
    }
  }
  return ll;
}

LikelihoodContext::Weights LikelihoodContext::weights(
    const Params& params) const {
  check_dims(params);
  const Vector lin = Z_ * params.beta;
  const Vector d1 = D1_ * params.eta;
  const Vector d2 = D2_ * params.eta;
  const Vector lam = Mt_ * params.eta;
  const Vector win = W_ * params.eta;
  Weights w;
  w.wb = Vector::Zero(n_);
  w.c1 = Vector::Zero(n_);
  w.cm = Vector::Zero(n_);
  w.cw = Vector::Zero(n_);
  w.c2 = Vector::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    const double e = std::exp(lin[i]);
    switch (status_[i]) {
      case Status::Exact:
        if (!(lam[i] > 0.0)) throw_eval("nonpositive hazard at exact event", i);
        w.wb[i] = 1.0 - e * d1[i];
        w.c1[i] = -e;
        w.cm[i] = 1.0 / lam[i];
        break;
      case Status::Right:
        w.wb[i] = -e * d1[i];
        w.c1[i] = -e;
        break;
      case Status::Interval: {
        const double x = e * win[i];
        if (!(x > 0.0)) throw_eval("zero-probability censoring interval", i);
        const double onemr = -std::expm1(-x);  // 1 - exp(-x)
        w.wb[i] = e * (win[i] / onemr - d2[i]);
        w.cw[i] = e / onemr;
        w.c2[i] = -e;
        break;
      }
    }
  }
  return w;
}

void LikelihoodContext::gradient(const Params& params, Vector& g_beta,
                                 Vector& g_eta) const {
  const Weights w = weights(params);
  g_beta = Z_.transpose() * w.wb;
  g_eta = D1_.transpose() * w.c1 + Mt_.transpose() * w.cm +
          W_.transpose() * w.cw + D2_.transpose() * w.c2;
}

void LikelihoodContext::score_rows(const Params& params, Matrix& beta_rows,
                                   Matrix& eta_rows) const {
  const Weights w = weights(params);
  beta_rows = w.wb.asDiagonal() * Z_;
  eta_rows = w.c1.asDiagonal() * D1_ + w.cm.asDiagonal() * Mt_ +
             w.cw.asDiagonal() * W_ + w.c2.asDiagonal() * D2_;
}

double loglik(const Params& params, const Dataset& data,
              const KnotSequence& ks) {
  return LikelihoodContext(data, ks).value(params);
}

std::pair<Vector, Vector> grad_loglik(const Params& params,
                                      const Dataset& data,
                                      const KnotSequence& ks) {
  Vector gb, ge;
  LikelihoodContext(data, ks).gradient(params, gb, ge);
  return {std::move(gb), std::move(ge)};
}

double loglik_bform(const Vector& beta, const Vector& alpha,
                    const Dataset& data, const KnotSequence& ks) {
  validate(data);
  if (alpha.size() != ks.size())
    throw ConfigurationError("coefficient dimension does not match the basis");
  const int p = ks.size();
  const auto increment = [&](double lo, double hi) {
    double s = 0.0;
    for (int j = 0; j < p; ++j) s += alpha[j] * integrate_b(ks, j, lo, hi);
    return s;
  };
  double ll = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const Subject& s = data.subjects[i];
    const double bz = beta.dot(s.z);
    const double e = std::exp(bz);
    switch (s.status) {
      case Status::Exact: {
        const double lam = alpha.dot(eval_b(ks, s.time1).values);
        if (!(lam > 0.0)) throw_eval("nonpositive hazard at exact event", i);
        ll += -e * increment(s.entry, s.time1) + bz + std::log(lam);
        break;
      }
      case Status::Right:
        ll += -e * increment(s.entry, s.time1);
        break;
      case Status::Interval: {
        const double x = e * increment(s.time1, s.time2);
        if (!(x > 0.0)) throw_eval("zero-probability censoring interval", i);
        ll += -e * increment(s.entry, s.time1) + log1mexp(x);
        break;
      }
    }
  }
  return ll;
}

}  // namespace curesieve
