#pragma once

#include <cstdint>
#include <stdexcept>

#include "toda/algebra.hpp"
#include "toda/chaos.hpp"
#include "toda/covariance.hpp"
#include "toda/sphere.hpp"

namespace toda {

struct McOptions {
  long replicas = 10000;
  std::uint64_t seed = 1;
  int workers = 0;    // 0 = hardware concurrency
  double epsilon = 0; // 0 = model default
};

struct EstimateMetadata {
  int grid_n = 0;
  double epsilon = 0;
  double theta_eta = 0;
  double clipped_fraction = 0;
  bool clip_warning = false;
};

struct McEstimate {
  double value = 0;
  double stderr_value = 0;
  double log_value = 0;
  double rel_stderr = 0;
  long replicas = 0;
  std::uint64_t seed = 0;
  EstimateMetadata metadata;
};

// Analytic rejection: the correlation function does not exist for this
// insertion set. Exit code 2 at the CLI boundary, never a sampling run.
class SeibergRejection : public std::runtime_error {
public:
  explicit SeibergRejection(SeibergReport report);
  const SeibergReport& report() const { return report_; }

private:
  SeibergReport report_;
};

// Log of the deterministic factor of the GMC representation:
//   sum_i [ln Gamma(s_i) - s_i ln mu_i - ln gamma]
// + sum_k Delta_k ln ghat(z_k) + sum_{k<l} <a_k, a_l> G(z_k, z_l).
// Throws SeibergRejection when some s_i <= 0.
double log_prefactor(const InsertionSet& insertions, const AlgebraData& data,
                     const CouplingParams& params);

// replica_logs, when given, receives each replica's log moment factor
// (the trace emitted as CSV by the CLI).
McEstimate estimate_correlation(const InsertionSet& insertions, const AlgebraData& data,
                                const CouplingParams& params, const SphereGrid& grid,
                                const McOptions& mc, std::vector<double>* replica_logs = nullptr);

struct ComparisonReport {
  double log_lhs = 0, log_rhs = 0;
  double rel_se_lhs = 0, rel_se_rhs = 0;
  double log_scale = 0;  // deterministic factor folded into log_rhs
  double sigma_distance = 0;
};

// Estimates the correlation at the psi-image points against the
// |psi'|^{-2 Delta}-scaled estimate at the original points, with
// independent seeds.
ComparisonReport covariance_test(const InsertionSet& insertions, const MobiusMap& psi,
                                 const AlgebraData& data, const CouplingParams& params,
                                 const SphereGrid& grid, const McOptions& mc);

// Two-pipeline anomaly check: the correlation in the metric e^phi ghat
// against exp((c_T/96 pi) S_L(phi)) times the round-metric estimate.
ComparisonReport weyl_anomaly_test(const InsertionSet& insertions, const ConformalFactor& phi,
                                   const AlgebraData& data, const CouplingParams& params,
                                   const SphereGrid& grid, const McOptions& mc);

// Relative deviation of the numeric integral
//   int exp(s gamma c - mu z e^{gamma c}) dc
// from Gamma(s) (mu z)^{-s} / gamma. Throws for s <= 0 (divergent).
double zero_mode_identity_deviation(double s, double mu, double z, double gamma);

}  // namespace toda
