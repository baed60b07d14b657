/*
 * Numerics tests: sampling, edge statistics, resolvents, TW1, experiment.
 *
 * SPDX-License-Identifier: MIT
 */
#include "gfc/experiment.hpp"
#include "gfc/rmt.hpp"
#include "gfc/tw1.hpp"

#include <doctest.h>

#include <cmath>

using namespace gfc;

TEST_SUITE("rmt") {

TEST_CASE("sampleER is symmetric, deterministic, centered, normalized") {
  ModelParams params{1000, 0.3, 42, 0};
  Eigen::MatrixXd H = sampleER(params);
  Eigen::MatrixXd H2 = sampleER(params);
  CHECK((H - H.transpose()).norm() == 0.0);
  CHECK((H - H2).norm() == 0.0);

  double mean = H.sum() / (1000.0 * 1000.0);
  double var = H.squaredNorm() / (1000.0 * 1000.0);
  // Mean 0, variance 1/N; 5 standard errors over ~10^6 entries.
  double sdEntry = 1.0 / std::sqrt(1000.0);
  CHECK(std::abs(mean) < 5 * sdEntry / 1000.0);
  CHECK(std::abs(var - 1.0 / 1000) < 5e-5 * 5);

  ModelParams small{4, 0.5, 7, 0};
  Eigen::MatrixXd A = sampleER(small);
  Eigen::MatrixXd B = sampleER(small);
  CHECK((A - B).norm() == 0.0);
}

TEST_CASE("kappa4Bernoulli closed form") {
  CHECK(kappa4Bernoulli(1e-9) == doctest::Approx(1.0 / 6).epsilon(1e-6));
  CHECK(kappa4Bernoulli(0.5) == doctest::Approx(-1.0 / 6));
  CHECK_THROWS_AS(kappa4Bernoulli(1.0), std::invalid_argument);
}

TEST_CASE("edgeShift on constructed matrices") {
  int N = 8;
  Eigen::MatrixXd H =
      Eigen::MatrixXd::Constant(N, N, 1.0 / std::sqrt(static_cast<double>(N)));
  EdgeShift e = edgeShift(H, 2.0, 0.0);
  CHECK(e.chi == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.Lhat == doctest::Approx(2.0));
  EdgeShift e2 = edgeShift(H, 2.0, 1.0 / 6);
  CHECK(e2.Lhat == doctest::Approx(2.0 + 1.0 / 4));
}

TEST_CASE("semicircle Stieltjes transform") {
  Cplx m = mSC(Cplx(0, 2));
  CHECK(m.real() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(m.imag() == doctest::Approx(std::sqrt(2.0) - 1));
  // Residual on a grid over the spectral domain.
  for (double E = -5; E <= 5; E += 0.5)
    for (double eta : {0.01, 0.3, 1.0, 3.0}) {
      Cplx z(E, eta);
      Cplx mm = mSC(z);
      CHECK(std::abs(1.0 + z * mm + mm * mm) < 1e-12);
      CHECK(mm.imag() > 0);
    }
  CHECK_THROWS_AS(mSC(Cplx(1, -1)), std::invalid_argument);
}

TEST_CASE("greenEval on the zero matrix and the Ward identity") {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(16, 16);
  GreenEval g = greenEval(Z, Cplx(0.5, 0.5), 2.0);
  CHECK(std::abs(g.mN - (-1.0 / Cplx(0.5, 0.5))) < 1e-13);

  ModelParams params{120, 0.4, 3, 0};
  Eigen::MatrixXd H = sampleER(params);
  GreenEval ge = greenEval(H, Cplx(2.0, 0.05), params.q());
  CHECK(wardResidual(ge) < 1e-9);
  CHECK(ge.mN.imag() > 0);

  // eta -> eta Im m_N(E + i eta) nondecreasing in eta.
  double prev = 0;
  for (double eta : {0.02, 0.05, 0.1, 0.5, 1.0}) {
    GreenEval gg = greenEval(H, Cplx(1.0, eta), params.q());
    double val = eta * gg.mN.imag();
    CHECK(val >= prev - 1e-12);
    prev = val;
  }
}

TEST_CASE("flow matrix endpoints and observable") {
  int N = 40;
  Eigen::MatrixXd W = sampleGOE(N, 5, 0);
  ModelParams params{N, 0.5, 6, 0};
  Eigen::MatrixXd H = sampleER(params);
  double q = params.q(), k4 = params.kappa4();

  FlowState f0 = flowMatrix(W, H, 0.0, q, k4);
  CHECK((f0.Ht - W).norm() == 0.0);
  CHECK(f0.chiT == 0.0);
  CHECK(f0.LhatT == 2.0);

  CHECK(flowObservable(W, H, 0.7, q, k4, -0.1, -0.1, 0.01) == 0.0);
  double x = flowObservable(W, H, 0.7, q, k4, -0.2, 0.1, 0.05, 1e-8);
  CHECK(x > 0); // integral of a positive integrand
}

TEST_CASE("pairwise-trace window identity") {
  ModelParams params{60, 0.5, 9, 0};
  Eigen::MatrixXd H = sampleER(params);
  double mismatch = dimSpotCheck(H, 2.0, -0.3, 0.2, 0.05);
  CHECK(mismatch < 1e-8);
}

TEST_CASE("smoothed eigenvalue count") {
  ModelParams params{200, 0.4, 8, 0};
  Eigen::MatrixXd H = sampleER(params);
  auto eigs = symEigenvalues(H);
  // Full window at moderate eta captures nearly all N eigenvalues.
  double full = smoothedCount(eigs, -3.0, 3.0, 0.01);
  CHECK(full == doctest::Approx(200.0).epsilon(0.01));
  // A window far above the spectrum holds nothing but eta tails.
  double empty = smoothedCount(eigs, 10.0, 11.0, 0.01);
  CHECK(empty < 0.5);
  CHECK(countAbove(eigs, eigs.back() + 1e-9) == 0);
  CHECK(countAbove(eigs, eigs.front() - 1e-9) == 200);
}

TEST_CASE("TW1 CDF basics") {
  TW1Evaluator tw(100);
  CHECK(tw.cdf(-11.0) < 1e-6);
  // Right tail 1 - F1(s) ~ exp(-(2/3) s^{3/2}), about 2e-6 at s = 7.
  CHECK(tw.cdf(7.0) > 1 - 1e-5);
  double prev = 0;
  for (double r = -6; r <= 4; r += 0.25) {
    double v = tw.cdf(r);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  // Median region sanity: F1(-1.27) is near 1/2.
  CHECK(tw.cdf(-1.27) == doctest::Approx(0.5).epsilon(0.05));
  // Quantile inverts the CDF.
  double r = tw.quantile(0.7);
  CHECK(tw.cdf(r) == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("KS harness is consistent on samples drawn from F1 itself") {
  CounterRng rng(77, 0);
  std::vector<double> samples;
  const int M = 400;
  for (int i = 0; i < M; ++i) samples.push_back(tw1Quantile(
      (static_cast<double>(rng.next() >> 11) + 0.5) * 0x1.0p-53));
  KSResult ks = ksDistanceToTW1(samples, -4.0);
  // ~M^{-1/2} scale; 5x allowance.
  CHECK(ks.ks < 5.0 / std::sqrt(static_cast<double>(M)));
  CHECK(ks.stderrEstimate > 0);
}

TEST_CASE("experiment config parsing and CSV shape") {
  auto cfg = parseExperimentConfig(
      R"({"settings":[{"N":50,"p":0.5,"M":120,"r0":-4.0,"seed":9}]})");
  REQUIRE(cfg.settings.size() == 1);
  CHECK(cfg.settings[0].N == 50);
  auto rows = convergenceExperiment(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].q == doctest::Approx(std::sqrt(25.0)));
  std::string csv = experimentCsv(rows);
  CHECK(csv.rfind("N,p,q,M,seed,r0,ks,ks_stderr\n", 0) == 0);
  // Determinism: identical config and seed give identical tables.
  auto rows2 = convergenceExperiment(cfg);
  CHECK(experimentCsv(rows2) == csv);
  ExperimentSetting bad{50, 0.5, 50, -4.0, 1};
  CHECK_THROWS_AS(sampleStatistics(bad), std::invalid_argument);
}

} // TEST_SUITE
