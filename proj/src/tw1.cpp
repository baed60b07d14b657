/*
 * Tracy-Widom F1 via the Airy-kernel Fredholm determinant.
 *
 * SPDX-License-Identifier: MIT
 */
#include "gfc/tw1.hpp"

#include <Eigen/Dense>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_airy.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace gfc {

namespace {

double airyAi(double x) { return gsl_sf_airy_Ai(x, GSL_PREC_DOUBLE); }

} // namespace

TW1Evaluator::TW1Evaluator(int nodes) : nodes_(nodes) {
  if (nodes < 4) throw std::invalid_argument("TW1Evaluator needs >= 4 nodes");
}

double TW1Evaluator::cdf(double r) const {
  // Truncate (r, infinity) at T: Ai decays like exp(-(2/3) x^{3/2}), so the
  // tail beyond (x+y)/2 = 18 is far below the 1e-10 target.
  const double T = std::max(r + 4.0, 18.0);
  gsl_integration_glfixed_table *tbl =
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(nodes_));
  std::vector<double> x(nodes_), w(nodes_);
  for (int i = 0; i < nodes_; ++i)
    gsl_integration_glfixed_point(r, T, static_cast<std::size_t>(i), &x[i],
                                  &w[i], tbl);
  gsl_integration_glfixed_table_free(tbl);

  // Symmetrized Nystrom matrix I - sqrt(w_i) K(x_i, x_j) sqrt(w_j).
  Eigen::MatrixXd M(nodes_, nodes_);
  for (int i = 0; i < nodes_; ++i)
    for (int j = i; j < nodes_; ++j) {
      double k = 0.5 * airyAi((x[i] + x[j]) / 2.0);
      double v = std::sqrt(w[i] * w[j]) * k;
      M(i, j) = (i == j ? 1.0 : 0.0) - v;
      if (i != j) M(j, i) = -v;
    }
  double det = M.partialPivLu().determinant();
  if (det < 0) det = 0;
  if (det > 1) det = 1;
  return det;
}

double TW1Evaluator::quantile(double u) const {
  if (u <= 0 || u >= 1)
    throw std::invalid_argument("quantile requires 0 < u < 1");
  double lo = -12, hi = 8;
  for (int it = 0; it < 80; ++it) {
    double mid = (lo + hi) / 2;
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

double tw1CDF(double r) {
  static const TW1Evaluator eval;
  return eval.cdf(r);
}

double tw1Quantile(double u) {
  static const TW1Evaluator eval;
  return eval.quantile(u);
}

} // namespace gfc
