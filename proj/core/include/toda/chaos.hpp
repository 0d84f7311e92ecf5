#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "toda/algebra.hpp"
#include "toda/covariance.hpp"

namespace toda {

// Per-cell chaos masses for each simple-root direction, kept in log space;
// exponentiation happens once, at aggregation.
struct ChaosMeasure {
  Eigen::MatrixXd log_mass;  // rank x N
  InsertionSet insertions;
  double gamma = 0;
  double epsilon = 0;
  std::uint64_t seed = 0;
  long replica = 0;

  double log_total(int direction) const;
  double total(int direction) const;
  Eigen::VectorXd totals() const;
  Eigen::MatrixXd masses() const { return log_mass.array().exp(); }
};

// Wick-normalized chaos of the sampled field: direction i has cell mass
// exp(gamma <e_i, X(x_n)> - gamma^2/2 Var<e_i, X(x_n)>) vol_n, with the
// variance taken from the model actually sampled.
ChaosMeasure gmc_from_sample(const FieldSample& sample, const CovarianceModel& model,
                             double gamma);

// Multiplies direction i by exp(gamma sum_k <alpha_k, e_i> G(x_n, z_k)).
ChaosMeasure shift_measure(const ChaosMeasure& measure, const InsertionSet& insertions,
                           const CovarianceModel& model);

enum class MassTrend { Stable, Decreasing, Inconclusive };

struct ThresholdStage {
  int grid_n = 0;
  double epsilon = 0;
  double log_median_total = 0;
  double log_median_se = 0;
};

struct ThresholdReport {
  double coupling = 0;
  double weight_norm_sq = 0;  // |b e_1|^2 = 2 b^2, nontrivial below 4
  std::vector<ThresholdStage> stages;  // coarse to fine
  MassTrend trend = MassTrend::Inconclusive;
};

// Emulates the joint refinement limit on grids of N, N/2, N/4 points with
// epsilon tied to each grid's resolution, and reports the trend of the
// median direction-1 total mass. A qualitative monotonicity report, not a
// limit claim.
ThresholdReport vertex_threshold_probe(double coupling, const CovarianceModel& model,
                                       long replicas, std::uint64_t seed);

}  // namespace toda
