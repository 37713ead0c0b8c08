#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "zerohit/brownian_path.hpp"
#include "zerohit/flow.hpp"

namespace zerohit {

// ---------------------------------------------------------------------------
// Summary statistics

/// Linear-interpolation quantile of an unsorted sample, p in [0, 1].
double sample_quantile(std::vector<double> values, double p);

struct MeanEstimate {
  double mean = 0.0;
  /// Standard error of the mean.
  double se = 0.0;
  std::size_t n = 0;
};

MeanEstimate mean_estimate(const std::vector<double>& values);

/// Lag-1 autocorrelation of a pooled set of sequences: pairs (v_k, v_{k+1})
/// are taken within each sequence only.
double lag1_autocorrelation(const std::vector<std::vector<double>>& sequences);

// ---------------------------------------------------------------------------
// Hitting-time field

/// Zero-hitting times of the dimension-delta Bessel flow from every x of a
/// grid, all driven by one path.
struct HittingTimeField {
  PathSeed seed;
  std::vector<double> xs;
  std::vector<double> deltas;
  /// entries[i * xs.size() + j] belongs to (deltas[i], xs[j]).
  std::vector<HittingTime> entries;
  FlowConfig config;

  /// Adjacent x pairs on one side of 0 whose brackets are not strictly
  /// ordered the right way (increasing for x >= 0, decreasing for x <= 0).
  std::size_t x_violations = 0;
  /// Adjacent delta pairs where the smaller delta hits surely later.
  std::size_t delta_violations = 0;
  std::size_t censored = 0;
  std::size_t resolution_limited = 0;
  /// max |zeta| difference over adjacent uncensored cells.
  double max_x_increment = 0.0;
  double max_delta_increment = 0.0;

  const HittingTime& at(std::size_t i, std::size_t j) const {
    return entries[i * xs.size() + j];
  }
};

/// Grids must be sorted and every delta <= 0.
HittingTimeField compute_field(const BrownianPath& path,
                               const std::vector<double>& xs,
                               const std::vector<double>& deltas,
                               const FlowConfig& cfg = {},
                               unsigned threads = 1);

/// Inserts midpoints between adjacent grid values.
std::vector<double> refine_grid(const std::vector<double>& grid);

struct RefinementLevel {
  std::size_t nx = 0;
  std::size_t ndelta = 0;
  double max_x_increment = 0.0;
  double max_delta_increment = 0.0;
  std::size_t violations = 0;
};

/// Continuity diagnostic: the field on the given grids and on `levels - 1`
/// successive midpoint refinements of both.
std::vector<RefinementLevel> field_refinement(const BrownianPath& path,
                                              const std::vector<double>& xs,
                                              const std::vector<double>& deltas,
                                              int levels,
                                              const FlowConfig& cfg = {},
                                              unsigned threads = 1);

// ---------------------------------------------------------------------------
// Exact law

struct CdfCheck {
  double t = 0.0;
  double exact = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  /// Samples whose bracket straddles t (the slack term).
  std::size_t straddling = 0;
  double allowed = 0.0;
  bool pass = false;
};

struct MeanCheck {
  /// False when the Inverse-Gamma shape is <= 1 and the mean is infinite.
  bool finite = false;
  /// The mean is compared only when the shape is >= 2 (finite variance up
  /// to a logarithm); otherwise it is informational.
  bool gated = false;
  double expected = 0.0;
  MeanEstimate sample;
  bool pass = true;
};

struct ExactLawReport {
  double delta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  std::size_t censored = 0;
  std::size_t resolution_limited = 0;
  std::vector<CdfCheck> points;
  MeanCheck mean;
  std::vector<HittingTime> samples;
  bool pass = false;
};

/// Hitting time of the Bessel flow from 1 on paths (seed, 0..n_paths-1),
/// compared with the Inverse-Gamma(1 - delta/2, 1/2) CDF at each point.
ExactLawReport verify_exact_law(double delta, std::size_t n_paths,
                                const std::vector<double>& quantile_points,
                                std::uint64_t seed, const FlowConfig& cfg = {},
                                unsigned threads = 1);

/// Sample mean of n direct Inverse-Gamma draws against its exact mean.
struct DirectMeanReport {
  double alpha = 0.0;
  double expected = 0.0;
  MeanEstimate sample;
  bool pass = false;
};

DirectMeanReport direct_mean_check(double alpha, std::size_t n,
                                   std::uint64_t seed);

/// Monte Carlo E[exp(-t T)] for T ~ Inverse-Gamma(1, 1/2).
struct LaplaceCheck {
  double t = 0.0;
  double exact = 0.0;
  MeanEstimate sample;
  bool pass = false;
};

std::vector<LaplaceCheck> laplace_check(const std::vector<double>& ts,
                                        std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Walks

/// S_n / (n log n) for S_n a sum of n Inverse-Gamma(1, 1/2) draws, one value
/// per replicate (replicate r uses stream r).
std::vector<double> walk_sum_statistic(std::size_t n, std::size_t replicates,
                                       std::uint64_t seed,
                                       unsigned threads = 1);

struct WalkRun {
  double x = 0.0;
  std::size_t k = 0;
  /// s_0 = 0 < s_1 < ... < s_k.
  std::vector<double> times;
  std::vector<double> increments;
  /// Certified interval of each increment.
  std::vector<Bracket> brackets;
  std::size_t resolution_limited = 0;
  bool censored = false;
};

/// s_{k+1} = T_4(s_k, 2x) on one path. Each start is snapped up to the
/// path's tick grid; increments are measured from the snapped start.
WalkRun bessel_walk(const BrownianPath& path, double x, std::size_t k,
                    const FlowConfig& cfg = {});

struct EventProbability {
  double x = 0.0;
  std::size_t k = 0;
  double lambda = 0.0;
  std::size_t replicates = 0;
  double empirical = 0.0;
  double exact = 0.0;
  /// 1 - F(lambda / x^2)^k from the Inverse-Gamma CDF.
  double via_cdf = 0.0;
  double se = 0.0;
  bool pass = false;
};

/// Frequency that any of k i.i.d. x^2 Inverse-Gamma(1, 1/2) increments
/// exceeds lambda, against 1 - exp(-k x^2 / (2 lambda)).
EventProbability event_a_probability(double x, std::size_t k, double lambda,
                                     std::size_t replicates,
                                     std::uint64_t seed);

struct KappaSupRow {
  double kappa = 0.0;
  /// Median of sqrt(kappa) sup |B| up to the hit, a lower bound at stored
  /// resolution.
  double median_sup = 0.0;
  double median_hit = 0.0;
  std::size_t censored = 0;
};

struct KappaSupReport {
  double x = 0.0;
  std::vector<KappaSupRow> rows;
  bool decreasing = false;
};

/// kappas must be decreasing.
KappaSupReport kappa_sup_vanishes(double x, const std::vector<double>& kappas,
                                  std::size_t n_paths, std::uint64_t seed,
                                  const FlowConfig& cfg = {},
                                  unsigned threads = 1);

}  // namespace zerohit
