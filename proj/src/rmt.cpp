/*
 * Numerical random-matrix routines.
 *
 * SPDX-License-Identifier: MIT
 */
#include "gfc/rmt.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace gfc {

double ModelParams::q() const { return std::sqrt(p * N); }

double ModelParams::kappa4() const { return kappa4Bernoulli(p); }

bool ModelParams::qInBand() const {
  double qq = q();
  return qq >= std::pow(N, 1.0 / 6.0) && qq <= std::pow(N, 0.5) + 1e-12;
}

double kappa4Bernoulli(double p) {
  if (p <= 0 || p >= 1)
    throw std::invalid_argument("kappa4Bernoulli requires 0 < p < 1");
  return (1 - 6 * p + 6 * p * p) / (6 * (1 - p));
}

Eigen::MatrixXd sampleER(const ModelParams &params) {
  if (params.p <= 0 || params.p >= 1)
    throw std::invalid_argument("sampleER requires 0 < p < 1");
  const int N = params.N;
  const double q = params.q();
  const double scale = 1.0 / (q * std::sqrt(1 - params.p));
  CounterRng rng(params.seed, params.stream);
  Eigen::MatrixXd H(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      // Counter derived from the (i, j) position: order-independent draws.
      std::uint64_t ctr =
          static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(N) + j;
      double a = rng.uniform(ctr) < params.p ? 1.0 : 0.0;
      double h = (a - params.p) * scale;
      H(i, j) = h;
      H(j, i) = h;
    }
  return H;
}

Eigen::MatrixXd sampleGOE(int N, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  Eigen::MatrixXd W(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      // Box-Muller on a pair of counter-indexed uniforms.
      std::uint64_t ctr =
          2 * (static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(N) + j);
      double u1 = rng.uniform(ctr);
      double u2 = rng.uniform(ctr + 1);
      if (u1 <= 0) u1 = 0x1.0p-53;
      double g = std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
      double sd = (i == j ? std::sqrt(2.0 / N) : std::sqrt(1.0 / N));
      W(i, j) = sd * g;
      W(j, i) = W(i, j);
    }
  return W;
}

EdgeShift edgeShift(const Eigen::MatrixXd &H, double q, double kappa4) {
  const int N = static_cast<int>(H.rows());
  double chi = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) chi += H(i, j) * H(i, j) - 1.0 / N;
  chi /= N;
  EdgeShift e;
  e.chi = chi;
  e.Lhat = 2 + 6 * kappa4 / (q * q) + chi;
  return e;
}

Cplx mSC(Cplx z) {
  if (z.imag() <= 0) throw std::invalid_argument("mSC requires Im z > 0");
  Cplx root = std::sqrt(z * z - 4.0);
  Cplx m1 = (-z + root) / 2.0;
  Cplx m2 = (-z - root) / 2.0;
  return m1.imag() > 0 ? m1 : m2;
}

std::vector<double> symEigenvalues(const Eigen::MatrixXd &H) {
  const int N = static_cast<int>(H.rows());
  std::vector<double> a(static_cast<std::size_t>(N) * N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) a[static_cast<std::size_t>(j) * N + i] = H(i, j);
  std::vector<double> w(N);
  int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', N, a.data(), N, w.data());
  if (info != 0)
    throw std::runtime_error("dsyevd failed, info = " + std::to_string(info));
  return w; // ascending
}

GreenEval greenEval(const Eigen::MatrixXd &H, Cplx z, double q) {
  if (z.imag() <= 0) throw std::invalid_argument("greenEval requires Im z > 0");
  const int N = static_cast<int>(H.rows());
  Eigen::MatrixXcd A = H.cast<Cplx>();
  A.diagonal().array() -= z;
  GreenEval g;
  g.z = z;
  g.G = A.partialPivLu().inverse();
  g.mN = g.G.trace() / static_cast<double>(N);
  const double eta = z.imag();
  g.psi = 1.0 / q + std::sqrt(mSC(z).imag() / (N * eta)) + 1.0 / (N * eta);
  return g;
}

double wardResidual(const GreenEval &g) {
  const int N = static_cast<int>(g.G.rows());
  double sum = 0;
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) sum += std::norm(g.G(j, k));
  sum /= N;
  double rhs = g.mN.imag() / g.z.imag();
  return std::abs(sum - rhs) / std::abs(rhs);
}

FlowState flowMatrix(const Eigen::MatrixXd &W, const Eigen::MatrixXd &H,
                     double t, double q, double kappa4) {
  const double u = std::exp(-t);
  const double s2 = 1 - u;
  FlowState f;
  f.Ht = std::sqrt(u) * W + std::sqrt(s2) * H;
  const int N = static_cast<int>(H.rows());
  double chi = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) chi += H(i, j) * H(i, j) - 1.0 / N;
  f.chiT = s2 * chi / N;
  f.LhatT = 2 + 6 * kappa4 * s2 * s2 / (q * q) + f.chiT;
  return f;
}

namespace {

// Adaptive Simpson quadrature with an absolute tolerance.
double adaptiveSimpson(const std::function<double(double)> &f, double a,
                       double b, double tol, int depth = 24) {
  double c = (a + b) / 2;
  double fa = f(a), fb = f(b), fc = f(c);
  std::function<double(double, double, double, double, double, double, double,
                       int)>
      rec = [&](double x0, double x2, double fx0, double fx2, double fx1,
                double whole, double eps, int d) -> double {
    double x1 = (x0 + x2) / 2;
    double lm = (x0 + x1) / 2, rm = (x1 + x2) / 2;
    double flm = f(lm), frm = f(rm);
    double left = (x1 - x0) / 6 * (fx0 + 4 * flm + fx1);
    double right = (x2 - x1) / 6 * (fx1 + 4 * frm + fx2);
    if (d <= 0 || std::abs(left + right - whole) <= 15 * eps)
      return left + right + (left + right - whole) / 15;
    return rec(x0, x1, fx0, fx1, flm, left, eps / 2, d - 1) +
           rec(x1, x2, fx1, fx2, frm, right, eps / 2, d - 1);
  };
  double whole = (b - a) / 6 * (fa + 4 * fc + fb);
  return rec(a, b, fa, fb, fc, whole, tol, depth);
}

// Im m_N from eigenvalues: (1/N) Sum eta / ((lambda - E)^2 + eta^2).
double imMNFromEigs(const std::vector<double> &eigs, double E, double eta) {
  double sum = 0;
  for (double l : eigs) {
    double d = l - E;
    sum += eta / (d * d + eta * eta);
  }
  return sum / static_cast<double>(eigs.size());
}

} // namespace

double flowObservable(const Eigen::MatrixXd &W, const Eigen::MatrixXd &H,
                      double t, double q, double kappa4, double gamma1,
                      double gamma2, double eta, double tol) {
  if (gamma1 > gamma2)
    throw std::invalid_argument("flowObservable requires gamma1 <= gamma2");
  if (eta <= 0) throw std::invalid_argument("flowObservable requires eta > 0");
  if (gamma1 == gamma2) return 0.0;
  FlowState f = flowMatrix(W, H, t, q, kappa4);
  auto eigs = symEigenvalues(f.Ht);
  const double N = static_cast<double>(H.rows());
  auto integrand = [&](double x) {
    return N * imMNFromEigs(eigs, f.LhatT + x, eta);
  };
  return adaptiveSimpson(integrand, gamma1, gamma2, tol);
}

double dimSpotCheck(const Eigen::MatrixXd &H, double E0, double gamma1,
                    double gamma2, double eta, int nProbe) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const auto &lam = es.eigenvalues();
  const auto &V = es.eigenvectors();
  const int N = static_cast<int>(H.rows());
  nProbe = std::min(nProbe, N);
  double worst = 0;
  for (int a = 0; a < nProbe; ++a) {
    auto Gaa = [&](double x) {
      Cplx z(E0 + x, eta), g(0, 0);
      for (int k = 0; k < N; ++k) g += V(a, k) * V(a, k) / (lam(k) - z);
      return g;
    };
    auto G2aa = [&](double x) {
      Cplx z(E0 + x, eta), g(0, 0);
      for (int k = 0; k < N; ++k) {
        Cplx d = lam(k) - z;
        g += V(a, k) * V(a, k) / (d * d);
      }
      return g;
    };
    // Sum_v G_va G_av = (G^2)_aa and d/dx G_aa = (G^2)_aa, so the window
    // integral telescopes to the endpoint difference.
    double integral =
        adaptiveSimpson([&](double x) { return G2aa(x).imag(); }, gamma1,
                        gamma2, 1e-11);
    double endpoints = Gaa(gamma2).imag() - Gaa(gamma1).imag();
    worst = std::max(worst, std::abs(integral - endpoints));
  }
  return worst;
}

double smoothedCount(const std::vector<double> &eigenvalues, double E,
                     double EL, double eta, double tol) {
  if (E >= EL) throw std::invalid_argument("smoothedCount requires E < EL");
  if (eta <= 0) throw std::invalid_argument("smoothedCount requires eta > 0");
  const double N = static_cast<double>(eigenvalues.size());
  auto f = [&](double y) { return imMNFromEigs(eigenvalues, y, eta); };
  return N / M_PI * adaptiveSimpson(f, E, EL, tol * M_PI / N, 30);
}

double smoothedCount(const Eigen::MatrixXd &H, double E, double EL, double eta,
                     double tol) {
  return smoothedCount(symEigenvalues(H), E, EL, eta, tol);
}

int countAbove(const std::vector<double> &eigenvalues, double E) {
  return static_cast<int>(eigenvalues.end() -
                          std::lower_bound(eigenvalues.begin(),
                                           eigenvalues.end(), E));
}

} // namespace gfc
