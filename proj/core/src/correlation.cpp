#include "toda/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "toda/special.hpp"

namespace toda {

namespace {

std::string describe_rejection(const SeibergReport& report) {
  std::ostringstream os;
  os << "Seiberg bounds reject the insertion set:";
  for (const auto& f : report.failures()) os << " [" << f << "]";
  return os.str();
}

double logsumexp_row(const Eigen::VectorXd& row) {
  return log_sum_exp(std::span<const double>(row.data(), row.size()));
}

struct ReplicaStats {
  double log_mean = 0;
  double rel_se = 0;
};

ReplicaStats summarize(const std::vector<double>& logs) {
  const long n = static_cast<long>(logs.size());
  double shift = logs[0];
  for (double l : logs) shift = std::max(shift, l);
  KahanSum m1, m2;
  for (double l : logs) {
    const double e = std::exp(l - shift);
    m1.add(e);
    m2.add(e * e);
  }
  const double mean = m1.value() / n;
  const double var = std::max(0.0, m2.value() / n - mean * mean);
  ReplicaStats stats;
  stats.log_mean = shift + std::log(mean);
  stats.rel_se = std::sqrt(var / n) / mean;
  return stats;
}

// Runs fn(replica, field values) over [0, replicas), distributing the
// fixed sampler home blocks across workers. Output order and content are
// independent of the worker count.
template <typename Fn>
std::vector<double> run_replicas(const CovarianceModel& model, std::uint64_t seed, long replicas,
                                 int workers, Fn&& fn) {
  const long block = FieldSampler::kHomeBlock;
  const long nblocks = (replicas + block - 1) / block;
  long hw = static_cast<long>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  const long nworkers = std::clamp<long>(workers > 0 ? workers : hw, 1, nblocks);

  std::vector<double> logs(replicas);
  FieldSampler sampler(model);
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&](long worker) {
    try {
      for (long b = worker; b < nblocks; b += nworkers) {
        const long first = b * block;
        const long count = std::min(block, replicas - first);
        sampler.for_each(seed, first, count, [&](long rep, const Eigen::MatrixXd& values) {
          logs[rep] = fn(rep, values);
        });
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (nworkers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (long w = 0; w < nworkers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return logs;
}

void guard_log_mass(double lm, int direction, int cell) {
  if (lm > 700.0) {
    std::ostringstream os;
    os << "chaos mass overflow in direction " << direction + 1 << " at cell " << cell
       << " (log mass " << lm << "); epsilon is likely mis-scaled";
    throw std::runtime_error(os.str());
  }
}

// Shift kernel of the estimator: the round Green kernel with the distance
// floored at the cell's logarithmic mean radius e^{-1/2} rho (the exact
// average of ln 1/r over the equal-volume disk). A cell cannot resolve
// separations below its own scale; evaluating the kernel there would make
// the quadrature error depend on where an insertion happens to fall inside
// its cell, which is exactly what the covariance comparisons must not see.
double shift_kernel(const SphereGrid& grid, int node, Complex z) {
  const double floor = std::exp(-0.5) * grid.cell_radius(node);
  const double dist = std::max(std::abs(grid.points[node] - z), floor);
  return std::log(1.0 / dist) -
         0.25 * (std::log(round_metric(grid.points[node])) + std::log(round_metric(z))) +
         std::numbers::ln2 - 0.5;
}

// Per-direction additive log terms shared by every replica of an estimate:
// Wick normalization, cell volume, and the projected insertion shift.
Eigen::MatrixXd replica_base(const CovarianceModel& model, const InsertionSet& insertions,
                             const CouplingParams& params) {
  const int r = model.rank();
  const int n = model.n();
  const double gamma = params.gamma;
  Eigen::MatrixXd base(r, n);
  for (int m = 0; m < n; ++m) {
    const double wick = 0.5 * gamma * gamma * model.component_pair_variance(m);
    const double logvol = std::log(model.grid.cell_volume(m));
    for (int i = 0; i < r; ++i) base(i, m) = logvol - wick;
  }
  for (const auto& ins : insertions) {
    const Eigen::VectorXd pairing = ins.alpha.weight_coords();
    for (int m = 0; m < n; ++m) {
      const double g = shift_kernel(model.grid, m, ins.z);
      for (int i = 0; i < r; ++i) base(i, m) += gamma * pairing(i) * g;
    }
  }
  return base;
}

double replica_log_value(const Eigen::MatrixXd& values, const Eigen::MatrixXd& base,
                         const Eigen::VectorXd& s, double gamma) {
  double out = 0;
  Eigen::VectorXd row(values.cols());
  for (int i = 0; i < values.rows(); ++i) {
    row = gamma * values.row(i).transpose() + base.row(i).transpose();
    Eigen::Index peak = 0;
    const double top = row.maxCoeff(&peak);
    guard_log_mass(top, i, static_cast<int>(peak));
    out -= s(i) * logsumexp_row(row);
  }
  return out;
}

}  // namespace

SeibergRejection::SeibergRejection(SeibergReport report)
    : std::runtime_error(describe_rejection(report)), report_(std::move(report)) {}

double log_prefactor(const InsertionSet& raw_insertions, const AlgebraData& data,
                     const CouplingParams& params) {
  params.validate(data.rank());
  const InsertionSet insertions = canonical_order(raw_insertions);
  const Eigen::VectorXd s = s_vector(insertions, data, params);
  for (int i = 0; i < s.size(); ++i)
    if (!(s(i) > 0.0)) throw SeibergRejection(seiberg_check(insertions, data, params));

  double logp = 0;
  for (int i = 0; i < s.size(); ++i)
    logp += log_gamma(s(i)) - s(i) * std::log(params.mu(i)) - std::log(params.gamma);
  for (const auto& ins : insertions)
    logp += conformal_weight(ins.alpha, data, params) * std::log(round_metric(ins.z));
  for (size_t k = 0; k < insertions.size(); ++k)
    for (size_t l = k + 1; l < insertions.size(); ++l)
      logp += inner_product(insertions[k].alpha, insertions[l].alpha) *
              green_round(insertions[k].z, insertions[l].z);
  return logp;
}

McEstimate estimate_correlation(const InsertionSet& raw_insertions, const AlgebraData& data,
                                const CouplingParams& params, const SphereGrid& grid,
                                const McOptions& mc, std::vector<double>* replica_logs) {
  params.validate(data.rank());
  const InsertionSet insertions = canonical_order(raw_insertions);
  const SeibergReport verdict = seiberg_check(insertions, data, params);
  if (!verdict.pass()) throw SeibergRejection(verdict);
  for (const auto& ins : insertions) check_insertion_proximity(grid, ins.z);

  const CovarianceModel model = build_covariance(grid, data, mc.epsilon);
  const Eigen::VectorXd s = s_vector(insertions, data, params);
  const double logp = log_prefactor(insertions, data, params);
  const Eigen::MatrixXd base = replica_base(model, insertions, params);

  const std::vector<double> logs =
      run_replicas(model, mc.seed, mc.replicas, mc.workers,
                   [&](long, const Eigen::MatrixXd& values) {
                     return replica_log_value(values, base, s, params.gamma);
                   });
  if (replica_logs) *replica_logs = logs;
  const ReplicaStats stats = summarize(logs);

  McEstimate est;
  est.log_value = logp + stats.log_mean;
  est.value = std::exp(est.log_value);
  est.rel_stderr = stats.rel_se;
  est.stderr_value = est.value * stats.rel_se;
  est.replicas = mc.replicas;
  est.seed = mc.seed;
  est.metadata = {model.n(), model.epsilon, model.theta_eta, model.clipped_fraction,
                  model.clip_warning()};
  return est;
}

ComparisonReport covariance_test(const InsertionSet& insertions, const MobiusMap& psi,
                                 const AlgebraData& data, const CouplingParams& params,
                                 const SphereGrid& grid, const McOptions& mc) {
  InsertionSet image;
  image.reserve(insertions.size());
  for (const auto& ins : insertions) image.push_back({psi.apply(ins.z), ins.alpha});

  McOptions mc_lhs = mc;
  mc_lhs.seed = derive_seed(mc.seed, 0x4c31u);
  McOptions mc_rhs = mc;
  mc_rhs.seed = derive_seed(mc.seed, 0x5232u);

  const McEstimate lhs = estimate_correlation(image, data, params, grid, mc_lhs);
  const McEstimate rhs = estimate_correlation(insertions, data, params, grid, mc_rhs);

  double log_scale = 0;
  for (const auto& ins : insertions) {
    const double delta = conformal_weight(ins.alpha, data, params);
    log_scale += -2.0 * delta * std::log(std::abs(psi.derivative(ins.z)));
  }

  ComparisonReport report;
  report.log_lhs = lhs.log_value;
  report.log_scale = log_scale;
  report.log_rhs = rhs.log_value + log_scale;
  report.rel_se_lhs = lhs.rel_stderr;
  report.rel_se_rhs = rhs.rel_stderr;
  report.sigma_distance =
      std::abs(report.log_lhs - report.log_rhs) / std::hypot(lhs.rel_stderr, rhs.rel_stderr);
  return report;
}

ComparisonReport weyl_anomaly_test(const InsertionSet& insertions, const ConformalFactor& phi,
                                   const AlgebraData& data, const CouplingParams& params,
                                   const SphereGrid& grid, const McOptions& mc) {
  params.validate(data.rank());
  const SeibergReport verdict = seiberg_check(insertions, data, params);
  if (!verdict.pass()) throw SeibergRejection(verdict);
  for (const auto& ins : insertions) check_insertion_proximity(grid, ins.z);

  const int n = grid.size();
  const int r = data.rank();
  const double gamma = params.gamma;
  const double q = params.q();
  const int nk = static_cast<int>(insertions.size());

  // Round-metric leg.
  McOptions mc_rhs = mc;
  mc_rhs.seed = derive_seed(mc.seed, 0x5233u);
  const McEstimate round_leg = estimate_correlation(insertions, data, params, grid, mc_rhs);

  // Conformal-metric leg: the field covariance is the round kernel centered
  // in the metric e^phi ghat (this is the displayed general kernel with all
  // means computed by the same quadrature), the chaos carries the
  // vertex-normalized volume weights, and the curvature coupling enters as
  // an exact Gaussian mean shift.
  Eigen::VectorXd phi_vals(n), wg(n);
  for (int m = 0; m < n; ++m) {
    phi_vals(m) = phi.value(grid.points[m]);
    if (!std::isfinite(phi_vals(m)))
      throw std::invalid_argument("conformal factor not finite at a grid point");
    wg(m) = std::exp(phi_vals(m)) * grid.cell_volume(m);
  }

  const CovarianceModel model_r = build_covariance(grid, data, mc.epsilon);
  const CovarianceModel model_g = build_covariance(grid, data, model_r.epsilon, &wg);

  // Base kernel matrix and the weighted means entering the projected kernel.
  Eigen::MatrixXd cbase(n, n);
  for (int i = 0; i < n; ++i) {
    cbase(i, i) = model_r.diag_pre(i);
    for (int j = 0; j < i; ++j) {
      const double g = green_round(grid.points[i], grid.points[j]);
      cbase(i, j) = g;
      cbase(j, i) = g;
    }
  }
  const Eigen::VectorXd ug = wg / wg.sum();
  const Eigen::VectorXd mrow_g = cbase * ug;
  const double mm_g = ug.dot(mrow_g);

  std::vector<Eigen::VectorXd> cols(nk);
  Eigen::VectorXd mcol_g(nk);
  for (int k = 0; k < nk; ++k) {
    cols[k].resize(n);
    for (int m = 0; m < n; ++m) cols[k](m) = shift_kernel(grid, m, insertions[k].z);
    mcol_g(k) = ug.dot(cols[k]);
  }

  // Curvature coupling R_g <Q, X>, realized as a Girsanov shift.
  Eigen::VectorXd qg(n);
  for (int m = 0; m < n; ++m) qg(m) = scalar_curvature(phi, grid.points[m]) * wg(m);
  const Eigen::VectorXd ur_nodes = model_g.spatial * qg;
  const double norm_q_sq = q * q * data.weyl_norm_sq().to_double();
  const double var_zc =
      norm_q_sq / (16.0 * std::numbers::pi * std::numbers::pi) * qg.dot(ur_nodes);

  const Eigen::VectorXd s = s_vector(insertions, data, params);
  const double sl = liouville_functional(phi, grid);
  const double c_t = central_charge(data, params);

  // Deterministic log prefactor of the conformal-metric pipeline.
  double logf = static_cast<double>(r) / (96.0 * std::numbers::pi) * sl + 0.5 * var_zc;
  for (int i = 0; i < r; ++i)
    logf += log_gamma(s(i)) - s(i) * std::log(params.mu(i)) - std::log(gamma);
  for (int k = 0; k < nk; ++k) {
    const auto& ins = insertions[k];
    const double delta = conformal_weight(ins.alpha, data, params);
    // <alpha, Q> = q <alpha, rho> = q sum of root coordinates.
    const double alpha_q = q * ins.alpha.root_coords().sum();
    logf += delta * std::log(round_metric(ins.z)) + 0.5 * alpha_q * phi.value(ins.z);
    // Covariance of the curvature tilt with this vertex operator.
    double urk = 0;
    for (int m = 0; m < n; ++m)
      urk += (cols[k](m) - mrow_g(m) - mcol_g(k) + mm_g) * qg(m);
    logf += -1.0 / (4.0 * std::numbers::pi) * alpha_q * urk;
  }
  for (int k = 0; k < nk; ++k) {
    for (int l = k + 1; l < nk; ++l) {
      logf += inner_product(insertions[k].alpha, insertions[l].alpha) *
              green_round(insertions[k].z, insertions[l].z);
    }
  }

  // Per-replica additive terms of the conformal-metric chaos.
  Eigen::MatrixXd base(r, n);
  for (int m = 0; m < n; ++m) {
    const double wick = gamma * gamma * model_r.spatial(m, m);  // VO normalization
    const double common = std::log(grid.cell_volume(m)) - wick + 0.5 * gamma * q * phi_vals(m) -
                          gamma * q / (4.0 * std::numbers::pi) * ur_nodes(m);
    for (int i = 0; i < r; ++i) base(i, m) = common;
  }
  for (int k = 0; k < nk; ++k) {
    const Eigen::VectorXd pairing = insertions[k].alpha.weight_coords();
    for (int m = 0; m < n; ++m) {
      for (int i = 0; i < r; ++i) base(i, m) += gamma * pairing(i) * cols[k](m);
    }
  }

  const std::vector<double> logs =
      run_replicas(model_g, derive_seed(mc.seed, 0x4c32u), mc.replicas, mc.workers,
                   [&](long, const Eigen::MatrixXd& values) {
                     return replica_log_value(values, base, s, gamma);
                   });
  const ReplicaStats stats = summarize(logs);

  ComparisonReport report;
  report.log_lhs = logf + stats.log_mean;
  report.log_scale = c_t / (96.0 * std::numbers::pi) * sl;
  report.log_rhs = report.log_scale + round_leg.log_value;
  report.rel_se_lhs = stats.rel_se;
  report.rel_se_rhs = round_leg.rel_stderr;
  report.sigma_distance =
      std::abs(report.log_lhs - report.log_rhs) / std::hypot(stats.rel_se, round_leg.rel_stderr);
  return report;
}

double zero_mode_identity_deviation(double s, double mu, double z, double gamma) {
  if (!(s > 0.0))
    throw std::domain_error("zero-mode integral diverges for s <= 0");
  if (!(mu > 0.0) || !(z > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("mu, z and gamma must be positive");

  // The integrand e^{s gamma c - mu z e^{gamma c}} has a double-exponential
  // right tail; the left cut is pushed out for small s where the e^{s gamma c}
  // tail is fat.
  const double hi = 40.0 / gamma;
  const double lo = -std::max(40.0, 46.0 / s) / gamma;
  const double mz = mu * z;
  const auto integrand = [&](double c) {
    return std::exp(s * gamma * c - mz * std::exp(gamma * c));
  };
  const double numeric = integrate_adaptive(integrand, lo, hi, 1e-11);
  const double exact = std::exp(log_gamma(s) - s * std::log(mz)) / gamma;
  return std::abs(numeric - exact) / exact;
}

}  // namespace toda
