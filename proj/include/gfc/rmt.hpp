/*
 * Numerical companion: sparse random-matrix sampling, spectral-edge
 * statistics with the kappa_4 and chi corrections, resolvents, the
 * interpolating-flow observable, and the mollified eigenvalue count.
 *
 * SPDX-License-Identifier: MIT
 */
#pragma once

#include "gfc/util.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace gfc {

using Cplx = std::complex<double>;

struct ModelParams {
  int N = 0;
  double p = 0;        // edge probability in (0, 1)
  std::uint64_t seed = 0;
  std::uint64_t stream = 0; // sample index; distinct streams are independent
  double q() const;    // sqrt(pN)
  double kappa4() const;
  // Assumption band N^{1/6} <= q <= N^{1/2}; violations are warnings.
  bool qInBand() const;
};

// h_ij = (a_ij - p) / (q sqrt(1-p)), a_ij iid Bernoulli(p) on the upper
// triangle (diagonal included), mirrored. Deterministic in (seed, stream).
Eigen::MatrixXd sampleER(const ModelParams &params);

// GOE-normalized Gaussian matrix: entries N(0, 1/N) off the diagonal and
// N(0, 2/N) on it. Deterministic in (seed, stream).
Eigen::MatrixXd sampleGOE(int N, std::uint64_t seed, std::uint64_t stream = 0);

// kappa_4 = (1 - 6p + 6p^2) / (6(1-p)): the fourth cumulant of the
// centered normalized Bernoulli entry matched to 3! kappa_4 / (N q^2).
double kappa4Bernoulli(double p);

struct EdgeShift {
  double chi = 0;  // (1/N) Sum_ij (h_ij^2 - 1/N)
  double Lhat = 0; // 2 + 6 kappa_4 / q^2 + chi
};
EdgeShift edgeShift(const Eigen::MatrixXd &H, double q, double kappa4);

// Upper-half-plane root of 1 + z m + m^2 = 0. Throws on Im z <= 0.
Cplx mSC(Cplx z);

// Ascending eigenvalues of a real symmetric matrix (LAPACK dsyevd).
std::vector<double> symEigenvalues(const Eigen::MatrixXd &H);

struct GreenEval {
  Cplx z;
  Eigen::MatrixXcd G; // (H - z)^{-1}
  Cplx mN;            // (1/N) Tr G
  double psi = 0;     // 1/q + sqrt(Im m_sc/(N eta)) + 1/(N eta)
};
GreenEval greenEval(const Eigen::MatrixXd &H, Cplx z, double q);

// Relative Ward-identity residual |(1/N) Sum |G_jk|^2 - Im m_N / eta| /
// (Im m_N / eta) of an evaluated resolvent.
double wardResidual(const GreenEval &g);

/* Interpolating flow H(t) = e^{-t/2} W + sqrt(1-e^{-t}) H with the
 * time-dependent edge Lhat_t = 2 + 6 kappa_4 (1-e^{-t})^2 / q^2 + chi(t),
 * chi(t) = (1-e^{-t}) (1/N) Sum_ij (h_ij^2 - 1/N). */
struct FlowState {
  Eigen::MatrixXd Ht;
  double LhatT = 0;
  double chiT = 0;
};
FlowState flowMatrix(const Eigen::MatrixXd &W, const Eigen::MatrixXd &H,
                     double t, double q, double kappa4);

// X(t) = N Int_{gamma1}^{gamma2} Im m_N(t, Lhat_t + x + i eta) dx by
// adaptive Simpson quadrature over eigenvalue-based evaluation of m_N.
double flowObservable(const Eigen::MatrixXd &W, const Eigen::MatrixXd &H,
                      double t, double q, double kappa4, double gamma1,
                      double gamma2, double eta, double tol = 1e-9);

// Trace of the pairwise-product identity used as a Dim bookkeeping spot
// check: Sum_v Int_{g1}^{g2} Im[(G^2)_{aa}] dx = Im G_aa(g2) - Im G_aa(g1).
// Returns the maximum absolute mismatch over the diagonal a = 0..nProbe-1.
double dimSpotCheck(const Eigen::MatrixXd &H, double E0, double gamma1,
                    double gamma2, double eta, int nProbe = 4);

// (N/pi) Int_E^{EL} Im m_N(y + i eta) dy, adaptive Simpson on the spectral
// representation (eigenvalues computed once).
double smoothedCount(const Eigen::MatrixXd &H, double E, double EL, double eta,
                     double tol = 1e-9);
double smoothedCount(const std::vector<double> &eigenvalues, double E,
                     double EL, double eta, double tol = 1e-9);

// Exact eigenvalue counting function N(E, infinity).
int countAbove(const std::vector<double> &eigenvalues, double E);

} // namespace gfc
