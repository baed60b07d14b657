/*
 * Desk-scale Tracy-Widom convergence experiment: samples sparse matrices,
 * forms the shifted edge statistic N^{2/3}(lambda_N - Lhat), and reports
 * one-sided Kolmogorov distances to F1 with binomial error bars.
 *
 * SPDX-License-Identifier: MIT
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gfc {

struct ExperimentSetting {
  int N = 0;
  double p = 0;
  int M = 0;           // sample count (>= 100)
  double r0 = -4;      // one-sided KS left cutoff
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::vector<ExperimentSetting> settings;
};

struct ExperimentRow {
  int N = 0;
  double p = 0, q = 0;
  int M = 0;
  std::uint64_t seed = 0;
  double r0 = 0;
  double ks = 0, ksStderr = 0;
};

struct KSResult {
  double ks = 0;
  double stderrEstimate = 0; // binomial error at the achieving point
};

// sup_{r > r0} |Fhat_M(r) - F1(r)| over the empirical CDF of `samples`.
KSResult ksDistanceToTW1(std::vector<double> samples, double r0);

// Per-sample edge statistics for one setting; `shifted` uses
// N^{2/3}(lambda_N - 2 - 6 kappa_4/q^2 - chi), otherwise N^{2/3}(lambda_N - 2).
// Both variants are computed from the same realized matrices.
struct SettingSamples {
  std::vector<double> shifted;
  std::vector<double> unshifted;
};
SettingSamples sampleStatistics(const ExperimentSetting &s);

// Runs every setting; optionally collects the per-sample shifted statistics.
std::vector<ExperimentRow> convergenceExperiment(
    const ExperimentConfig &config,
    std::vector<std::vector<double>> *samplesOut = nullptr);

// CSV with the columns N,p,q,M,seed,r0,ks,ks_stderr.
std::string experimentCsv(const std::vector<ExperimentRow> &rows);

ExperimentConfig parseExperimentConfig(const std::string &jsonText);

} // namespace gfc
