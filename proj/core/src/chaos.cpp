#include "toda/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "toda/special.hpp"

namespace toda {

double ChaosMeasure::log_total(int direction) const {
  const Eigen::VectorXd row = log_mass.row(direction);
  return log_sum_exp(std::span<const double>(row.data(), row.size()));
}

double ChaosMeasure::total(int direction) const { return std::exp(log_total(direction)); }

Eigen::VectorXd ChaosMeasure::totals() const {
  Eigen::VectorXd out(log_mass.rows());
  for (int i = 0; i < log_mass.rows(); ++i) out(i) = total(i);
  return out;
}

ChaosMeasure gmc_from_sample(const FieldSample& sample, const CovarianceModel& model,
                             double gamma) {
  const int r = model.rank();
  const int n = model.n();
  if (sample.values.rows() != r || sample.values.cols() != n)
    throw std::invalid_argument("sample shape does not match model");

  ChaosMeasure out;
  out.gamma = gamma;
  out.epsilon = model.epsilon;
  out.seed = sample.seed;
  out.replica = sample.replica;
  out.log_mass.resize(r, n);
  for (int m = 0; m < n; ++m) {
    const double wick = 0.5 * gamma * gamma * model.component_pair_variance(m);
    const double logvol = std::log(model.grid.cell_volume(m));
    for (int i = 0; i < r; ++i) {
      const double lm = gamma * sample.values(i, m) - wick + logvol;
      if (lm > 700.0) {
        std::ostringstream os;
        os << "chaos mass overflow in direction " << i + 1 << " at cell " << m
           << " (log mass " << lm << "); epsilon is likely mis-scaled";
        throw std::runtime_error(os.str());
      }
      out.log_mass(i, m) = lm;
    }
  }
  return out;
}

ChaosMeasure shift_measure(const ChaosMeasure& measure, const InsertionSet& insertions,
                           const CovarianceModel& model) {
  ChaosMeasure out = measure;
  const int r = static_cast<int>(measure.log_mass.rows());
  const int n = static_cast<int>(measure.log_mass.cols());
  for (size_t k = 0; k < insertions.size(); ++k) {
    for (size_t l = 0; l < k; ++l)
      if (insertions[k].z == insertions[l].z)
        throw std::invalid_argument("insertion points must be pairwise distinct");
    check_insertion_proximity(model.grid, insertions[k].z);
  }
  for (const auto& ins : insertions) {
    const Eigen::VectorXd pairing = ins.alpha.weight_coords();
    for (int m = 0; m < n; ++m) {
      const double g = green_round(model.grid.points[m], ins.z);
      for (int i = 0; i < r; ++i) out.log_mass(i, m) += measure.gamma * pairing(i) * g;
    }
    out.insertions.push_back(ins);
  }
  return out;
}

namespace {

struct MedianStat {
  double log_median;
  double se;
};

MedianStat log_median_with_se(std::vector<double>& logs) {
  std::sort(logs.begin(), logs.end());
  const size_t n = logs.size();
  const double med = n % 2 ? logs[n / 2] : 0.5 * (logs[n / 2 - 1] + logs[n / 2]);
  // Normal-approximation standard error of the sample median on log scale:
  // 1.2533 sd / sqrt(n), with sd from the interquartile range.
  const double iqr = logs[(3 * n) / 4] - logs[n / 4];
  const double sd = iqr / 1.349;
  return {med, 1.2533 * sd / std::sqrt(static_cast<double>(n))};
}

}  // namespace

ThresholdReport vertex_threshold_probe(double coupling, const CovarianceModel& model,
                                       long replicas, std::uint64_t seed) {
  if (!(coupling > 0)) throw std::invalid_argument("coupling must be positive");
  ThresholdReport report;
  report.coupling = coupling;
  report.weight_norm_sq = 2.0 * coupling * coupling;

  const int base_n = model.n();
  for (int divisor : {4, 2, 1}) {
    const int n = base_n / divisor;
    const SphereGrid grid = SphereGrid::fibonacci(n);
    const CovarianceModel stage_model = build_covariance(grid, model.algebra);
    FieldSampler sampler(stage_model);
    std::vector<double> logs(replicas);
    sampler.for_each(derive_seed(seed, divisor), 0, replicas,
                     [&](long rep, const Eigen::MatrixXd& values) {
                       Eigen::VectorXd lm(n);
                       for (int m = 0; m < n; ++m) {
                         lm(m) = coupling * values(0, m) -
                                 0.5 * coupling * coupling *
                                     stage_model.component_pair_variance(m) +
                                 std::log(grid.cell_volume(m));
                       }
                       logs[rep] = log_sum_exp(std::span<const double>(lm.data(), lm.size()));
                     });
    MedianStat stat = log_median_with_se(logs);
    report.stages.push_back({n, stage_model.epsilon, stat.log_median, stat.se});
  }

  bool decreasing = true;
  bool stable = true;
  for (size_t j = 1; j < report.stages.size(); ++j) {
    const double drop = report.stages[j - 1].log_median_total - report.stages[j].log_median_total;
    const double se = std::hypot(report.stages[j - 1].log_median_se, report.stages[j].log_median_se);
    if (!(drop > 3.0 * se)) decreasing = false;
    if (!(std::abs(drop) < std::max(0.25, 3.0 * se))) stable = false;
  }
  report.trend = decreasing ? MassTrend::Decreasing
                            : (stable ? MassTrend::Stable : MassTrend::Inconclusive);
  return report;
}

}  // namespace toda
