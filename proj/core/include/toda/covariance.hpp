#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "toda/algebra.hpp"
#include "toda/rng.hpp"
#include "toda/sphere.hpp"

namespace toda {

// Regularized spatial factor of the coupled free field on a grid. The full
// covariance is the Kronecker product A (x) spatial and is never
// materialized; sampling goes through the two symmetric square roots.
struct CovarianceModel {
  SphereGrid grid;
  AlgebraData algebra;
  double epsilon = 0;
  double theta_eta = 0;

  Eigen::MatrixXd spatial;        // mean-zero projected, eigenvalue-clipped
  Eigen::MatrixXd spatial_sqrt;   // symmetric PSD square root of spatial
  Eigen::MatrixXd coupling_sqrt;  // symmetric square root of the Cartan matrix
  Eigen::VectorXd diag_pre;       // regularized diagonal before projection
  Eigen::VectorXd mean_weights;   // normalized projection weights
  double clipped_fraction = 0;

  int rank() const { return algebra.rank(); }
  int n() const { return grid.size(); }
  bool clip_warning() const { return clipped_fraction > 0.05; }

  // Variance of <e_i, X(x_n)> under the final model (|e_i|^2 = 2).
  double component_pair_variance(int node) const { return 2.0 * spatial(node, node); }
};

// epsilon = 0 selects the default, a quarter of the grid's mean
// nearest-neighbor separation in the round metric, which keeps the uniform
// regularized diagonal above the neighbor kernel values (no clipping);
// negative epsilon is an error.
// volume_weights, when given, replace the equal round weights in the
// mean-zero projection (conformal-metric pipeline).
CovarianceModel build_covariance(const SphereGrid& grid, const AlgebraData& algebra,
                                 double epsilon = 0.0,
                                 const Eigen::VectorXd* volume_weights = nullptr);

struct FieldSample {
  Eigen::MatrixXd values;  // rank x N; row i realizes <e_i, X(x_n)>
  std::uint64_t seed = 0;
  long replica = 0;
};

// Deterministic function of (model, seed, replica).
FieldSample sample_field(const CovarianceModel& model, std::uint64_t seed, long replica);

// Batched sampler. Replicas live in fixed home blocks of kHomeBlock so the
// matrix products, and therefore the outputs, do not depend on how a
// replica range is partitioned across workers.
class FieldSampler {
public:
  static constexpr int kHomeBlock = 64;

  explicit FieldSampler(const CovarianceModel& model) : model_(&model) {}

  // Samples replicas [first, first + count) and invokes
  // visit(replica_index, values) for each in increasing order.
  template <typename Visitor>
  void for_each(std::uint64_t seed, long first, long count, Visitor&& visit) const;

  const CovarianceModel& model() const { return *model_; }

private:
  Eigen::MatrixXd home_block(std::uint64_t seed, long block_index) const;
  const CovarianceModel* model_;
};

// Deterministic mean shift reproducing the insertion-tilted field law:
// component i of the returned rank x N field is sum_j A_ij c_j G(x_n, z)
// with c the root coordinates of alpha.
Eigen::MatrixXd girsanov_shift(const CovarianceModel& model, const CartanVector& alpha,
                               Complex z);

// Throws, naming the offending node, when z is closer than one cell radius
// to a grid node.
void check_insertion_proximity(const SphereGrid& grid, Complex z);

template <typename Visitor>
void FieldSampler::for_each(std::uint64_t seed, long first, long count, Visitor&& visit) const {
  const int r = model_->rank();
  const int n = model_->n();
  const long last = first + count;
  for (long block = first / kHomeBlock; block * kHomeBlock < last; ++block) {
    const Eigen::MatrixXd y = home_block(seed, block);
    const long lo = std::max(first, block * kHomeBlock);
    const long hi = std::min(last, (block + 1) * kHomeBlock);
    for (long rep = lo; rep < hi; ++rep) {
      const long row = (rep - block * kHomeBlock) * r;
      Eigen::MatrixXd values = model_->coupling_sqrt * y.block(row, 0, r, n);
      // Remove the residual weighted mean: the law lives on the mean-zero
      // subspace and the projection is idempotent.
      for (int i = 0; i < r; ++i)
        values.row(i).array() -= values.row(i).dot(model_->mean_weights);
      visit(rep, values);
    }
  }
}

}  // namespace toda
