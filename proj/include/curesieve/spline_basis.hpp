#pragma once

#include <vector>

#include "curesieve/types.hpp"

namespace curesieve {

enum class BasisKind { B, M, I };

// Order-l knot vector on [0, tau]: l copies of 0, strictly increasing
// interior knots, l copies of tau. Also carries the order-(l+1) vector on
// the same interior knots, which the integrated basis is built from.
class KnotSequence {
 public:
  KnotSequence(int order, double tau, std::vector<double> interior);

  int order() const { return order_; }
  double tau() const { return tau_; }
  /// Number of basis functions p = order + #interior.
  int size() const { return size_; }
  const std::vector<double>& interior() const { return interior_; }
  /// Full knot vector of length size() + order().
  const Vector& full() const { return full_; }
  /// Knot vector with boundary multiplicity order()+1 (size()+1 functions).
  const Vector& full_raised() const { return full_raised_; }
  /// Support width of basis j: full[j+order] - full[j].
  double span(int j) const { return full_[j + order_] - full_[j]; }

 private:
  Vector assemble(int multiplicity) const;

  int order_;
  double tau_;
  int size_;
  std::vector<double> interior_;
  Vector full_;
  Vector full_raised_;
};

struct BasisVector {
  Vector values;
  BasisKind kind;
  double point;
};

/// Knot sequence with basis count max(floor(n_distinct^(1/3)), order+1) and
/// interior knots at equally spaced quantiles of the distinct values of
/// `times` inside (0, tau). Duplicate quantiles are collapsed and the knot
/// count is restored by splitting the largest gaps.
KnotSequence build_knots(const std::vector<double>& times, int n_distinct,
                         int order, double tau);

/// B-spline basis values at t (Cox-de Boor recursion, right-closed at tau).
BasisVector eval_b(const KnotSequence& ks, double t);

/// M-spline basis values: order/(span) times the B-spline basis, so each
/// function integrates to one over [0, tau].
BasisVector eval_m(const KnotSequence& ks, double t);

/// I-spline basis values: tail sums of the order+1 B-spline basis on the
/// same interior knots; each function runs monotonically from 0 to 1.
BasisVector eval_i(const KnotSequence& ks, double t);

/// Exact integral of B-spline j over [a, b] via the integrated basis.
double integrate_b(const KnotSequence& ks, int j, double a, double b);

}  // namespace curesieve
