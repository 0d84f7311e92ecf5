#include "toda/gaussian_compare.hpp"

#include <cmath>
#include <stdexcept>

#include "toda/special.hpp"

namespace toda {

namespace {

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::VectorXd lambda = es.eigenvalues();
  for (int i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -1e-12 * scale)
      throw std::invalid_argument("covariance is not positive semidefinite");
    lambda(i) = std::max(lambda(i), 0.0);
  }
  return es.eigenvectors() * lambda.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

struct McAccumulator {
  KahanSum sum, sum_sq;
  long count = 0;

  void add(double x) {
    sum.add(x);
    sum_sq.add(x * x);
    ++count;
  }
  double mean() const { return sum.value() / count; }
  double se() const {
    const double m = mean();
    const double var = std::max(0.0, sum_sq.value() / count - m * m);
    return std::sqrt(var / count);
  }
};

}  // namespace

SmallGaussianModel SmallGaussianModel::make(int blocks, int block_dim,
                                            Eigen::MatrixXd covariance) {
  if (blocks * block_dim > 64)
    throw std::invalid_argument("small Gaussian models are capped at dimension 64");
  if (covariance.rows() != blocks * block_dim || covariance.cols() != blocks * block_dim)
    throw std::invalid_argument("covariance shape mismatch");
  SmallGaussianModel model;
  model.blocks = blocks;
  model.block_dim = block_dim;
  model.covariance = 0.5 * (covariance + covariance.transpose());
  model.root = psd_sqrt(model.covariance);
  return model;
}

SmallGaussianModel SmallGaussianModel::decoupled() const {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim(), dim());
  for (int b = 0; b < blocks; ++b)
    cov.block(b * block_dim, b * block_dim, block_dim, block_dim) =
        covariance.block(b * block_dim, b * block_dim, block_dim, block_dim);
  return make(blocks, block_dim, cov);
}

Eigen::VectorXd SmallGaussianModel::draw(GaussianStream& stream) const {
  Eigen::VectorXd z(dim());
  stream.fill(std::span<double>(z.data(), z.size()));
  return root * z;
}

InequalityReport kahane_compare(const SmallGaussianModel& model, const VectorFunctional& functional,
                                bool certified_mixed_partials, long replicas, std::uint64_t seed) {
  if (!certified_mixed_partials)
    throw std::invalid_argument("caller must certify nonnegative cross-block mixed partials");

  // Spot check: discrete mixed differences across blocks at random points.
  {
    GaussianStream probe(derive_seed(seed, 0x5350u), 0);
    const double h = 1e-3;
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd x = model.draw(probe);
      const int bi = static_cast<int>(std::abs(probe.next()) * 7919) % model.blocks;
      int bj = static_cast<int>(std::abs(probe.next()) * 7127) % model.blocks;
      if (model.blocks > 1 && bj == bi) bj = (bi + 1) % model.blocks;
      if (bj == bi) continue;
      const int ki = static_cast<int>(std::abs(probe.next()) * 6997) % model.block_dim;
      const int kj = static_cast<int>(std::abs(probe.next()) * 6689) % model.block_dim;
      Eigen::VectorXd ei = Eigen::VectorXd::Zero(model.dim());
      Eigen::VectorXd ej = Eigen::VectorXd::Zero(model.dim());
      ei(bi * model.block_dim + ki) = h;
      ej(bj * model.block_dim + kj) = h;
      const double f00 = functional(x);
      const double mixed =
          (functional(x + ei + ej) - functional(x + ei) - functional(x + ej) + f00) / (h * h);
      if (mixed < -1e-4 * (1.0 + std::abs(f00)))
        throw std::invalid_argument("certificate violated: negative cross-block mixed partial");
    }
  }

  const SmallGaussianModel independent = model.decoupled();
  McAccumulator lhs, rhs;
  for (long rep = 0; rep < replicas; ++rep) {
    GaussianStream sl(seed, static_cast<std::uint64_t>(rep));
    GaussianStream sr(derive_seed(seed, 0x4445u), static_cast<std::uint64_t>(rep));
    lhs.add(functional(model.draw(sl)));
    rhs.add(functional(independent.draw(sr)));
  }

  InequalityReport report;
  report.lhs = lhs.mean();
  report.rhs = rhs.mean();
  report.se_lhs = lhs.se();
  report.se_rhs = rhs.se();
  report.standardized = (report.lhs - report.rhs) / std::hypot(report.se_lhs, report.se_rhs);
  return report;
}

double QuadraticFunctional::operator()(const Eigen::VectorXd& x) const {
  double v = constant;
  if (lin.size()) v += lin.dot(x);
  if (quad.size()) v += x.dot(quad * x);
  return v;
}

GirsanovReport girsanov_verify(const SmallGaussianModel& model, const Eigen::VectorXd& weights,
                               const VectorFunctional& functional,
                               const QuadraticFunctional* closed_form, long replicas,
                               std::uint64_t seed) {
  if (weights.size() != model.dim()) throw std::invalid_argument("weight size mismatch");
  const Eigen::VectorXd shift = model.covariance * weights;  // E[Z X]
  const double var_z = weights.dot(shift);

  McAccumulator lhs, rhs;
  for (long rep = 0; rep < replicas; ++rep) {
    GaussianStream sl(seed, static_cast<std::uint64_t>(rep));
    GaussianStream sr(derive_seed(seed, 0x4752u), static_cast<std::uint64_t>(rep));
    const Eigen::VectorXd x = model.draw(sl);
    lhs.add(std::exp(weights.dot(x) - 0.5 * var_z) * functional(x));
    rhs.add(functional(model.draw(sr) + shift));
  }

  GirsanovReport report;
  report.mc_lhs = lhs.mean();
  report.mc_rhs = rhs.mean();
  report.se_lhs = lhs.se();
  report.se_rhs = rhs.se();
  report.standardized = (report.mc_lhs - report.mc_rhs) / std::hypot(report.se_lhs, report.se_rhs);

  if (closed_form) {
    report.has_closed_form = true;
    // Substitution route: E[F(X + m)] = tr(M C) + m^T M m + a^T m + b.
    double rhs_value = closed_form->constant;
    if (closed_form->lin.size()) rhs_value += closed_form->lin.dot(shift);
    if (closed_form->quad.size()) {
      rhs_value += (closed_form->quad * model.covariance).trace();
      rhs_value += shift.dot(closed_form->quad * shift);
    }
    // Moment-generating route for the tilted side, exponential factors kept
    // explicit: E[e^Z x^T M x] = e^{var/2}(tr(MC) + m^T M m), etc.
    const double damp = std::exp(-0.5 * var_z);
    const double boost = std::exp(0.5 * var_z);
    double lhs_value = damp * boost * closed_form->constant;
    if (closed_form->lin.size()) lhs_value += damp * boost * closed_form->lin.dot(shift);
    if (closed_form->quad.size()) {
      lhs_value += damp * boost * (closed_form->quad * model.covariance).trace();
      lhs_value += damp * boost * shift.dot(closed_form->quad * shift);
    }
    report.closed_lhs = lhs_value;
    report.closed_rhs = rhs_value;
  }
  return report;
}

}  // namespace toda
