#include "curesieve/spline_basis.hpp"

#include <algorithm>
#include <cmath>

#include "curesieve/errors.hpp"

namespace curesieve {

KnotSequence::KnotSequence(int order, double tau, std::vector<double> interior)
    : order_(order), tau_(tau), interior_(std::move(interior)) {
  if (order_ < 1) throw ConfigurationError("spline order must be >= 1");
  if (!(tau_ > 0.0)) throw ConfigurationError("tau must be positive");
  if (interior_.empty())
    throw ConfigurationError("at least one interior knot is required");
  double prev = 0.0;
  for (double x : interior_) {
    if (!(x > prev) || !(x < tau_))
      throw ConfigurationError(
          "interior knots must be strictly increasing inside (0, tau)");
    prev = x;
  }
  size_ = order_ + static_cast<int>(interior_.size());
  full_ = assemble(order_);
  full_raised_ = assemble(order_ + 1);
}

Vector KnotSequence::assemble(int multiplicity) const {
  Vector k(2 * multiplicity + interior_.size());
  int at = 0;
  for (int i = 0; i < multiplicity; ++i) k[at++] = 0.0;
  for (double x : interior_) k[at++] = x;
  for (int i = 0; i < multiplicity; ++i) k[at++] = tau_;
  return k;
}

namespace {

void check_domain(const KnotSequence& ks, double t) {
  if (!(t >= 0.0) || !(t <= ks.tau()))
    throw DomainError("evaluation point outside [0, tau]");
}

// Largest integer r with r^3 <= n.
int icbrt(int n) {
  if (n <= 0) return 0;
  int r = static_cast<int>(std::llround(std::cbrt(static_cast<double>(n))));
  while (static_cast<long long>(r + 1) * (r + 1) * (r + 1) <= n) ++r;
  while (r > 0 && static_cast<long long>(r) * r * r > n) --r;
  return r;
}

double quantile(const std::vector<double>& sorted, double level) {
  const int m = static_cast<int>(sorted.size());
  if (m == 1) return sorted[0];
  double pos = level * (m - 1);
  int lo = static_cast<int>(std::floor(pos));
  lo = std::min(lo, m - 2);
  double frac = pos - lo;
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// All order-`order` B-spline values at t over the given knot vector.
// The order-1 seed is the indicator of the span containing t, with the
// convention that t == last knot belongs to the last nonempty span.
Vector eval_all(const Vector& knots, int order, double t) {
  const int nb = static_cast<int>(knots.size()) - order;
  Vector cur = Vector::Zero(knots.size() - 1);
  {
    const double* b = knots.data();
    const double* e = b + knots.size();
    int j = static_cast<int>(std::upper_bound(b, e, t) - b) - 1;
    j = std::clamp(j, order - 1, nb - 1);
    cur[j] = 1.0;
  }
  for (int k = 2; k <= order; ++k) {
    const int m = static_cast<int>(knots.size()) - k;
    for (int j = 0; j < m; ++j) {
      const double dl = knots[j + k - 1] - knots[j];
      const double dr = knots[j + k] - knots[j + 1];
      double v = 0.0;
      if (dl > 0.0) v += (t - knots[j]) / dl * cur[j];
      if (dr > 0.0) v += (knots[j + k] - t) / dr * cur[j + 1];
      cur[j] = v;
    }
  }
  return cur.head(nb);
}

}  // namespace

KnotSequence build_knots(const std::vector<double>& times, int n_distinct,
                         int order, double tau) {
  if (!(tau > 0.0)) throw ConfigurationError("tau must be positive");
  if (order < 2) throw ConfigurationError("order must be >= 2");
  std::vector<double> vals;
  vals.reserve(times.size());
  for (double t : times)
    if (t > 0.0 && t < tau) vals.push_back(t);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  if (vals.empty())
    throw ConfigurationError("no usable times in (0, tau) for knot placement");

  const int p = std::max(icbrt(n_distinct), order + 1);
  const int k = p - order;
  std::vector<double> interior;
  interior.reserve(k);
  for (int i = 1; i <= k; ++i)
    interior.push_back(quantile(vals, static_cast<double>(i) / (k + 1)));
  interior.erase(std::unique(interior.begin(), interior.end()), interior.end());

  // Degenerate data can collapse quantiles; restore the count by splitting
  // the largest gap (boundaries included) at its midpoint.
  while (static_cast<int>(interior.size()) < k) {
    double best_gap = -1.0;
    std::size_t best_at = 0;
    double lo = 0.0;
    for (std::size_t i = 0; i <= interior.size(); ++i) {
      const double hi = i < interior.size() ? interior[i] : tau;
      if (hi - lo > best_gap) {
        best_gap = hi - lo;
        best_at = i;
      }
      lo = hi;
    }
    const double left = best_at == 0 ? 0.0 : interior[best_at - 1];
    const double right = best_at == interior.size() ? tau : interior[best_at];
    interior.insert(interior.begin() + best_at, 0.5 * (left + right));
  }
  return KnotSequence(order, tau, std::move(interior));
}

BasisVector eval_b(const KnotSequence& ks, double t) {
  check_domain(ks, t);
  return {eval_all(ks.full(), ks.order(), t), BasisKind::B, t};
}

BasisVector eval_m(const KnotSequence& ks, double t) {
  check_domain(ks, t);
  Vector v = eval_all(ks.full(), ks.order(), t);
  for (int j = 0; j < ks.size(); ++j) v[j] *= ks.order() / ks.span(j);
  return {std::move(v), BasisKind::M, t};
}

BasisVector eval_i(const KnotSequence& ks, double t) {
  check_domain(ks, t);
  const int p = ks.size();
  Vector raised = eval_all(ks.full_raised(), ks.order() + 1, t);  // p+1 values
  Vector out(p);
  double acc = 0.0;
  for (int j = p - 1; j >= 0; --j) {
    acc += raised[j + 1];
    out[j] = acc;
  }
  return {std::move(out), BasisKind::I, t};
}

double integrate_b(const KnotSequence& ks, int j, double a, double b) {
  if (j < 0 || j >= ks.size()) throw DomainError("basis index out of range");
  if (a > b) throw DomainError("integration bounds must satisfy a <= b");
  check_domain(ks, a);
  check_domain(ks, b);
  if (a == b) return 0.0;
  const Vector ia = eval_i(ks, a).values;
  const Vector ib = eval_i(ks, b).values;
  return ks.span(j) / ks.order() * (ib[j] - ia[j]);
}

}  // namespace curesieve
