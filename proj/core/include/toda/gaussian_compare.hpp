#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "toda/rng.hpp"

namespace toda {

// Small dense Gaussian model, d blocks of n coordinates, dim <= 64 so the
// full-covariance square root is the sampling oracle.
struct SmallGaussianModel {
  int blocks = 0;
  int block_dim = 0;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd root;  // symmetric PSD square root

  int dim() const { return blocks * block_dim; }

  static SmallGaussianModel make(int blocks, int block_dim, Eigen::MatrixXd covariance);

  // Cross-block covariances zeroed, marginal block laws preserved.
  SmallGaussianModel decoupled() const;

  Eigen::VectorXd draw(GaussianStream& stream) const;
};

using VectorFunctional = std::function<double(const Eigen::VectorXd&)>;

struct InequalityReport {
  double lhs = 0, rhs = 0;
  double se_lhs = 0, se_rhs = 0;
  double standardized = 0;  // (lhs - rhs) / combined se; expected <= ~3 when the hypotheses hold
};

// Compares E[F(X)] against E[F(X~)] for the decoupled model X~. The caller
// certifies nonnegative cross-block mixed partials; a finite-difference
// spot check at 100 random points guards against gross violations and
// throws when one is found.
InequalityReport kahane_compare(const SmallGaussianModel& model, const VectorFunctional& functional,
                                bool certified_mixed_partials, long replicas, std::uint64_t seed);

struct QuadraticFunctional {
  Eigen::MatrixXd quad;  // may be zero-sized for affine functionals
  Eigen::VectorXd lin;
  double constant = 0;

  double operator()(const Eigen::VectorXd& x) const;
};

struct GirsanovReport {
  double mc_lhs = 0, mc_rhs = 0;
  double se_lhs = 0, se_rhs = 0;
  double standardized = 0;
  bool has_closed_form = false;
  double closed_lhs = 0, closed_rhs = 0;  // both equal E[F(X + C w)] analytically
};

// Verifies E[e^{Z - E[Z^2]/2} F(X)] = E[F(X + E[Z X])] for Z = w.X by
// Monte Carlo, and exactly through Gaussian moment algebra when F is the
// given quadratic.
GirsanovReport girsanov_verify(const SmallGaussianModel& model, const Eigen::VectorXd& weights,
                               const VectorFunctional& functional,
                               const QuadraticFunctional* closed_form, long replicas,
                               std::uint64_t seed);

}  // namespace toda
