#include "toda/covariance.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace toda {

namespace {

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m, double* clipped_fraction) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  Eigen::VectorXd lambda = es.eigenvalues();
  double clipped = 0, total = 0;
  for (int i = 0; i < lambda.size(); ++i) {
    total += std::abs(lambda(i));
    if (lambda(i) < 0) {
      clipped += -lambda(i);
      lambda(i) = 0;
    }
  }
  if (clipped_fraction) *clipped_fraction = total > 0 ? clipped / total : 0.0;
  return es.eigenvectors() * lambda.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

CovarianceModel build_covariance(const SphereGrid& grid, const AlgebraData& algebra,
                                 double epsilon, const Eigen::VectorXd* volume_weights) {
  CovarianceModel model;
  model.grid = grid;
  model.algebra = algebra;
  model.theta_eta = std::numbers::ln2 - 0.5;
  if (epsilon == 0.0) epsilon = 0.25 * grid.mean_nn_round;
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  model.epsilon = epsilon;

  const int n = grid.size();
  Eigen::MatrixXd c(n, n);
  model.diag_pre.resize(n);
  // Mollified variance at chart radius epsilon, transported rigidly over
  // the sphere: a single round-metric cutoff 2 epsilon everywhere, so the
  // sampled theory is homogeneous. The chart formula
  // -ln eps - ln(g(x))/2 + theta would tie the physical cutoff to the
  // chart position and imprint a smooth spurious profile on every
  // position-sensitive estimate.
  const double diag_value =
      -std::log(epsilon) - 0.5 * std::log(round_metric(Complex(0, 0))) + model.theta_eta;
  for (int i = 0; i < n; ++i) {
    model.diag_pre(i) = diag_value;
    c(i, i) = model.diag_pre(i);
    for (int j = 0; j < i; ++j) {
      const double g = green_round(grid.points[i], grid.points[j]);
      c(i, j) = g;
      c(j, i) = g;
    }
  }

  Eigen::VectorXd w = volume_weights ? *volume_weights : grid.cell_volume;
  if (w.size() != n) throw std::invalid_argument("volume weight size mismatch");
  w /= w.sum();
  // P = I - 1 w^T removes the w-weighted mean; for equal weights this is
  // I - (1/N) 1 1^T.
  const Eigen::VectorXd cw = c * w;
  const double wcw = w.dot(cw);
  Eigen::MatrixXd projected = c;
  projected.colwise() -= cw;
  projected.rowwise() -= cw.transpose();
  projected.array() += wcw;
  projected = 0.5 * (projected + projected.transpose()).eval();

  model.spatial_sqrt = symmetric_sqrt(projected, &model.clipped_fraction);
  model.spatial = model.spatial_sqrt * model.spatial_sqrt;
  model.spatial = 0.5 * (model.spatial + model.spatial.transpose()).eval();
  model.coupling_sqrt = symmetric_sqrt(algebra.cartan_d(), nullptr);
  model.mean_weights = w;
  return model;
}

Eigen::MatrixXd FieldSampler::home_block(std::uint64_t seed, long block_index) const {
  const int r = model_->rank();
  const int n = model_->n();
  Eigen::MatrixXd z(kHomeBlock * r, n);
  for (int k = 0; k < kHomeBlock; ++k) {
    const long replica = block_index * kHomeBlock + k;
    GaussianStream stream(seed, static_cast<std::uint64_t>(replica));
    for (int i = 0; i < r; ++i)
      for (int m = 0; m < n; ++m) z(k * r + i, m) = stream.next();
  }
  return z * model_->spatial_sqrt;
}

FieldSample sample_field(const CovarianceModel& model, std::uint64_t seed, long replica) {
  FieldSample out;
  out.seed = seed;
  out.replica = replica;
  FieldSampler sampler(model);
  sampler.for_each(seed, replica, 1,
                   [&](long, const Eigen::MatrixXd& values) { out.values = values; });
  return out;
}

void check_insertion_proximity(const SphereGrid& grid, Complex z) {
  // A quarter of the equal-volume disk radius: generic points clear it,
  // points essentially on top of a node (where the unregularized kernel
  // column blows up) do not.
  for (int i = 0; i < grid.size(); ++i) {
    if (std::abs(z - grid.points[i]) <= 0.25 * grid.cell_radius(i)) {
      std::ostringstream os;
      os << "insertion at (" << z.real() << ", " << z.imag()
         << ") lies too close to grid node " << i;
      throw std::invalid_argument(os.str());
    }
  }
}

Eigen::MatrixXd girsanov_shift(const CovarianceModel& model, const CartanVector& alpha,
                               Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::invalid_argument("shift point must be finite");
  check_insertion_proximity(model.grid, z);
  const int r = model.rank();
  const int n = model.n();
  const Eigen::VectorXd pairing = alpha.weight_coords();  // (A c)_i = <alpha, e_i>
  Eigen::VectorXd column(n);
  for (int m = 0; m < n; ++m) column(m) = green_round(model.grid.points[m], z);
  Eigen::MatrixXd shift(r, n);
  for (int i = 0; i < r; ++i) shift.row(i) = pairing(i) * column.transpose();
  return shift;
}

}  // namespace toda
