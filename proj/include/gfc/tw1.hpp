/*
 * Tracy-Widom F1 evaluation through the Fredholm determinant
 * F1(s) = det(I - A_s) on L^2(s, infinity) with the kernel
 * A(x, y) = Ai((x + y)/2) / 2, discretized by Gauss-Legendre Nystrom
 * quadrature on a truncated interval.
 *
 * SPDX-License-Identifier: MIT
 */
#pragma once

namespace gfc {

class TW1Evaluator {
public:
  explicit TW1Evaluator(int nodes = 120);

  int nodes() const { return nodes_; }

  // F1(r); monotone in r, limits 0 and 1.
  double cdf(double r) const;

  // Inverse CDF by bisection on [-12, 8]; u in (0, 1).
  double quantile(double u) const;

private:
  int nodes_;
};

// Shared default evaluator (120 nodes).
double tw1CDF(double r);
double tw1Quantile(double u);

} // namespace gfc
