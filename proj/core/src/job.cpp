#include "toda/job.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "toda/chaos.hpp"
#include "toda/correlation.hpp"
#include "toda/covariance.hpp"
#include "toda/gaussian_compare.hpp"
#include "toda/special.hpp"

namespace toda {

using json = nlohmann::ordered_json;

Task task_from_name(const std::string& name) {
  if (name == "algebra-info") return Task::AlgebraInfo;
  if (name == "seiberg") return Task::Seiberg;
  if (name == "correlate") return Task::Correlate;
  if (name == "covariance-test") return Task::CovarianceTest;
  if (name == "weyl-test") return Task::WeylTest;
  if (name == "gmc-stats") return Task::GmcStats;
  if (name == "verify") return Task::Verify;
  throw std::invalid_argument("unknown task '" + name + "'");
}

std::string task_name(Task task) {
  switch (task) {
    case Task::AlgebraInfo: return "algebra-info";
    case Task::Seiberg: return "seiberg";
    case Task::Correlate: return "correlate";
    case Task::CovarianceTest: return "covariance-test";
    case Task::WeylTest: return "weyl-test";
    case Task::GmcStats: return "gmc-stats";
    case Task::Verify: return "verify";
  }
  return "?";
}

namespace {

bool needs_grid(Task task) {
  return task == Task::Correlate || task == Task::CovarianceTest || task == Task::WeylTest ||
         task == Task::GmcStats;
}

bool needs_insertions(Task task) {
  return task == Task::Seiberg || task == Task::Correlate || task == Task::CovarianceTest ||
         task == Task::WeylTest;
}

}  // namespace

void JobConfig::validate() const {
  if (needs_grid(task) && (grid_n < 256 || grid_n > 8192))
    throw std::invalid_argument("grid_n must lie in [256, 8192]");
  if (epsilon && !(*epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (replicas < 1) throw std::invalid_argument("replicas must be at least 1");
  if (workers < 0) throw std::invalid_argument("workers must be nonnegative");
  if (needs_insertions(task) && insertions.empty())
    throw std::invalid_argument("task '" + task_name(task) + "' needs at least one insertion");
  if (task == Task::CovarianceTest && !mobius)
    throw std::invalid_argument("covariance-test needs a mobius map");
  if (task == Task::WeylTest && !phi)
    throw std::invalid_argument("weyl-test needs a phi specification");
  if (phi && phi->type != "constant" && phi->type != "bump")
    throw std::invalid_argument("phi type must be 'constant' or 'bump'");
}

JobConfig JobConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed config JSON: ") + e.what());
  }
  JobConfig cfg;
  try {
    cfg.task = task_from_name(j.at("task").get<std::string>());
    cfg.algebra = j.value("algebra", std::string("A1"));
    cfg.gamma = j.value("gamma", 0.5);
    if (j.contains("mu")) {
      if (j["mu"].is_number())
        cfg.mu = {j["mu"].get<double>()};
      else
        cfg.mu = j["mu"].get<std::vector<double>>();
    }
    if (j.contains("insertions")) {
      for (const auto& item : j["insertions"]) {
        InsertionSpec spec;
        const auto& z = item.at("z");
        spec.re = z.at(0).get<double>();
        spec.im = z.at(1).get<double>();
        const auto& alpha = item.at("alpha");
        spec.basis = alpha.value("basis", std::string("root"));
        if (spec.basis != "root" && spec.basis != "weight")
          throw std::invalid_argument("alpha basis must be 'root' or 'weight'");
        spec.coords = alpha.at("coords").get<std::vector<double>>();
        cfg.insertions.push_back(std::move(spec));
      }
    }
    cfg.grid_n = j.value("grid_n", 1024);
    if (j.contains("epsilon") && !j["epsilon"].is_null()) cfg.epsilon = j["epsilon"].get<double>();
    cfg.replicas = j.value("replicas", 10000L);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.workers = j.value("workers", 0);
    if (j.contains("mobius")) cfg.mobius = j["mobius"].get<std::string>();
    if (j.contains("phi")) {
      PhiSpec phi;
      phi.type = j["phi"].value("type", std::string("constant"));
      phi.value = j["phi"].value("value", 0.0);
      cfg.phi = phi;
    }
    if (j.contains("trace_csv")) cfg.trace_csv = j["trace_csv"].get<std::string>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config field error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

JobConfig JobConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

namespace {

json config_echo(const JobConfig& cfg) {
  json j;
  j["task"] = task_name(cfg.task);
  j["algebra"] = cfg.algebra;
  j["gamma"] = cfg.gamma;
  j["mu"] = cfg.mu;
  json ins = json::array();
  for (const auto& spec : cfg.insertions) {
    json item;
    item["z"] = {spec.re, spec.im};
    item["alpha"] = {{"basis", spec.basis}, {"coords", spec.coords}};
    ins.push_back(item);
  }
  j["insertions"] = ins;
  j["grid_n"] = cfg.grid_n;
  if (cfg.epsilon)
    j["epsilon"] = *cfg.epsilon;
  else
    j["epsilon"] = nullptr;
  j["replicas"] = cfg.replicas;
  j["seed"] = cfg.seed;
  if (cfg.mobius) j["mobius"] = *cfg.mobius;
  if (cfg.phi) j["phi"] = {{"type", cfg.phi->type}, {"value", cfg.phi->value}};
  return j;
}

Eigen::VectorXd resolve_mu(const JobConfig& cfg, int rank) {
  if (cfg.mu.empty()) return Eigen::VectorXd::Ones(rank);
  if (cfg.mu.size() == 1) return Eigen::VectorXd::Constant(rank, cfg.mu[0]);
  if (static_cast<int>(cfg.mu.size()) != rank)
    throw std::invalid_argument("mu must have 1 or rank entries");
  Eigen::VectorXd mu(rank);
  for (int i = 0; i < rank; ++i) mu(i) = cfg.mu[i];
  return mu;
}

InsertionSet resolve_insertions(const JobConfig& cfg, const AlgebraData& data) {
  InsertionSet out;
  for (const auto& spec : cfg.insertions) {
    if (static_cast<int>(spec.coords.size()) != data.rank())
      throw std::invalid_argument("insertion weight has wrong number of coordinates");
    Eigen::VectorXd coords(data.rank());
    for (int i = 0; i < data.rank(); ++i) coords(i) = spec.coords[i];
    const Basis basis = spec.basis == "weight" ? Basis::FundamentalWeight : Basis::SimpleRoot;
    out.push_back({Complex(spec.re, spec.im), CartanVector(basis, std::move(coords), data)});
  }
  return out;
}

ConformalFactor resolve_phi(const PhiSpec& spec) {
  if (spec.type == "bump") return ConformalFactor::bump(spec.value);
  return ConformalFactor::constant(spec.value);
}

json seiberg_json(const SeibergReport& report, const ExtendedSeibergReport& extended) {
  json j;
  j["pass"] = report.pass();
  json s = json::array();
  for (const auto& e : report.s)
    s.push_back({{"i", e.index + 1}, {"value", e.value}, {"positive", e.positive}});
  j["s"] = s;
  json bounds = json::array();
  for (const auto& b : report.bounds)
    bounds.push_back(
        {{"k", b.insertion + 1}, {"i", b.direction + 1}, {"margin", b.margin}, {"ok", b.ok}});
  j["weight_bounds"] = bounds;
  json ext;
  ext["pass"] = extended.pass();
  json entries = json::array();
  for (const auto& e : extended.entries)
    entries.push_back({{"i", e.index + 1}, {"neg_s", e.neg_s}, {"bound", e.bound}, {"ok", e.ok}});
  ext["entries"] = entries;
  j["extended"] = ext;
  json failures = json::array();
  for (const auto& f : report.failures()) failures.push_back(f);
  j["failures"] = failures;
  return j;
}

json metadata_json(const EstimateMetadata& md) {
  json j;
  j["grid_n"] = md.grid_n;
  j["epsilon"] = md.epsilon;
  j["theta_eta"] = md.theta_eta;
  j["clipped_fraction"] = md.clipped_fraction;
  j["clip_warning"] = md.clip_warning;
  j["quadrature"] = "fibonacci-stereographic";
  j["rng"] = "philox4x64-10";
  j["version"] = kVersion;
  return j;
}

json comparison_json(const ComparisonReport& report) {
  json j;
  j["log_lhs"] = report.log_lhs;
  j["log_rhs"] = report.log_rhs;
  j["log_scale"] = report.log_scale;
  j["rel_se_lhs"] = report.rel_se_lhs;
  j["rel_se_rhs"] = report.rel_se_rhs;
  j["sigma_distance"] = report.sigma_distance;
  return j;
}

void write_trace(const std::string& path, const std::string& header,
                 const std::vector<std::string>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file '" + path + "'");
  out << header << "\n";
  for (const auto& row : rows) out << row << "\n";
}

json run_algebra_info(const JobConfig& cfg) {
  const AlgebraData data = AlgebraData::build(cfg.algebra);
  json result;
  result["name"] = data.spec().name();
  result["rank"] = data.rank();
  json cartan = json::array();
  for (int i = 0; i < data.rank(); ++i) {
    json row = json::array();
    for (int j = 0; j < data.rank(); ++j) row.push_back(data.cartan()(i, j));
    cartan.push_back(row);
  }
  result["cartan"] = cartan;
  json inv = json::array();
  for (int i = 0; i < data.rank(); ++i) {
    json row = json::array();
    for (int j = 0; j < data.rank(); ++j) row.push_back(data.cartan_inv()[i][j].to_string());
    inv.push_back(row);
  }
  result["cartan_inv"] = inv;
  result["weyl_norm_sq"] = data.weyl_norm_sq().to_string();
  result["dual_coxeter"] = data.dual_coxeter();
  const auto [rank_term, coeff] = central_charge_coefficients(data);
  result["central_charge"] = {{"rank_term", rank_term}, {"q_sq_coefficient", coeff.to_string()}};
  CouplingParams params = CouplingParams::uniform(cfg.gamma, 1.0, data.rank());
  params.validate_gamma();
  result["gamma"] = cfg.gamma;
  result["q"] = params.q();
  result["c_t"] = central_charge(data, params);
  return result;
}

struct TaskOutput {
  json body;
  int exit_code = 0;
};

TaskOutput run_verify(const JobConfig& cfg) {
  json checks = json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, json detail) {
    checks.push_back({{"name", name}, {"pass", pass}, {"detail", std::move(detail)}});
    all_pass = all_pass && pass;
  };

  {  // Zero-mode Gamma identity on a 100-point lattice.
    double worst = 0;
    for (double s : {0.6, 1.0, 2.5, 7.0, 20.0})
      for (double mu : {0.5, 2.0})
        for (double z : {0.7, 3.0})
          for (double g : {0.3, 0.5, 0.8, 1.1, 1.35})
            worst = std::max(worst, zero_mode_identity_deviation(s, mu, z, g));
    record("zero_mode_gamma_identity", worst <= 1e-8, {{"max_rel_deviation", worst}});
  }

  {  // Girsanov closed-form branch over random quadratic functionals.
    GaussianStream gen(derive_seed(cfg.seed, 0x7665u), 0);
    double worst = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const int d = 2 + (trial % 3);
      Eigen::MatrixXd b(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) b(i, j) = gen.next();
      const SmallGaussianModel model =
          SmallGaussianModel::make(d, 1, b * b.transpose() + Eigen::MatrixXd::Identity(d, d));
      Eigen::VectorXd w(d), a(d);
      Eigen::MatrixXd m(d, d);
      for (int i = 0; i < d; ++i) {
        w(i) = 0.5 * gen.next();
        a(i) = gen.next();
        for (int j = 0; j < d; ++j) m(i, j) = 0.3 * gen.next();
      }
      QuadraticFunctional f{0.5 * (m + m.transpose()), a, gen.next()};
      const auto report = girsanov_verify(
          model, w, [&f](const Eigen::VectorXd& x) { return f(x); }, &f, 64, cfg.seed + trial);
      const double scale = std::max(1.0, std::abs(report.closed_rhs));
      worst = std::max(worst, std::abs(report.closed_lhs - report.closed_rhs) / scale);
    }
    record("girsanov_closed_form", worst <= 1e-10, {{"max_rel_gap", worst}});
  }

  {  // Kahane two-block exponential example against e^{1-c}.
    bool pass = true;
    json rows = json::array();
    for (double c : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      Eigen::MatrixXd cov(2, 2);
      cov << 1.0, -c, -c, 1.0;
      const SmallGaussianModel model = SmallGaussianModel::make(2, 1, cov);
      const auto report = kahane_compare(
          model, [](const Eigen::VectorXd& x) { return std::exp(x(0) + x(1)); }, true, 40000,
          derive_seed(cfg.seed, static_cast<std::uint64_t>(c * 1000)));
      const double closed = std::exp(1.0 - c);
      const bool row_ok =
          std::abs(report.lhs - closed) <= 3.0 * report.se_lhs && report.standardized <= 3.0;
      pass = pass && row_ok;
      rows.push_back({{"c", c}, {"lhs", report.lhs}, {"closed", closed},
                      {"standardized", report.standardized}, {"ok", row_ok}});
    }
    record("kahane_exponential_example", pass, rows);
  }

  {  // Mobius covariance residual of the round kernel.
    GaussianStream gen(derive_seed(cfg.seed, 0x6d62u), 0);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const MobiusMap psi(Complex(1 + 0.5 * gen.next(), 0.3 * gen.next()),
                          Complex(0.5 * gen.next(), 0.5 * gen.next()),
                          Complex(0.3 * gen.next(), 0.3 * gen.next()),
                          Complex(1 + 0.5 * gen.next(), 0.3 * gen.next()));
      const Complex x(gen.next(), gen.next());
      const Complex y(gen.next(), gen.next());
      if (std::abs(x - y) < 1e-3) continue;
      if (std::abs(psi.c() * x + psi.d()) < 0.2 || std::abs(psi.c() * y + psi.d()) < 0.2) continue;
      worst = std::max(worst, std::abs(green_mobius_residual(psi, x, y)));
    }
    record("green_mobius_residual", worst <= 1e-10, {{"max_abs_residual", worst}});
  }

  {  // Mean-zero property of the round kernel at modest resolution.
    const SphereGrid grid = SphereGrid::fibonacci(512);
    double worst = 0;
    for (const Complex x : {Complex(0.3, 0.1), Complex(-1.2, 0.7), Complex(2.0, -0.4)}) {
      KahanSum acc;
      for (int m = 0; m < grid.size(); ++m)
        acc.add(green_round(x, grid.points[m]) * grid.cell_volume(m));
      worst = std::max(worst, std::abs(acc.value()) / (4.0 * std::numbers::pi));
    }
    record("green_round_mean_zero_n512", worst <= 2e-2, {{"max_abs_mean", worst}});
  }

  json body;
  body["checks"] = checks;
  body["all_pass"] = all_pass;
  return {body, all_pass ? 0 : 1};
}

TaskOutput dispatch(const JobConfig& cfg, json& seiberg_slot, json& metadata_slot) {
  switch (cfg.task) {
    case Task::AlgebraInfo:
      return {run_algebra_info(cfg), 0};

    case Task::Verify:
      return run_verify(cfg);

    case Task::Seiberg: {
      const AlgebraData data = AlgebraData::build(cfg.algebra);
      CouplingParams params;
      params.gamma = cfg.gamma;
      params.mu = resolve_mu(cfg, data.rank());
      params.validate(data.rank());
      const InsertionSet insertions = resolve_insertions(cfg, data);
      const SeibergReport report = seiberg_check(insertions, data, params);
      const ExtendedSeibergReport extended = extended_seiberg_check(insertions, data, params);
      seiberg_slot = seiberg_json(report, extended);
      json body;
      body["pass"] = report.pass();
      return {body, report.pass() ? 0 : 2};
    }

    case Task::Correlate: {
      const AlgebraData data = AlgebraData::build(cfg.algebra);
      CouplingParams params;
      params.gamma = cfg.gamma;
      params.mu = resolve_mu(cfg, data.rank());
      params.validate(data.rank());
      const InsertionSet insertions = resolve_insertions(cfg, data);
      seiberg_slot = seiberg_json(seiberg_check(insertions, data, params),
                                  extended_seiberg_check(insertions, data, params));
      const SphereGrid grid = SphereGrid::fibonacci(cfg.grid_n);
      McOptions mc{cfg.replicas, cfg.seed, cfg.workers, cfg.epsilon.value_or(0.0)};
      std::vector<double> replica_logs;
      const McEstimate est = estimate_correlation(insertions, data, params, grid, mc,
                                                  cfg.trace_csv ? &replica_logs : nullptr);
      if (cfg.trace_csv) {
        std::vector<std::string> rows;
        rows.reserve(replica_logs.size());
        for (size_t i = 0; i < replica_logs.size(); ++i)
          rows.push_back(std::to_string(i) + "," + std::to_string(replica_logs[i]));
        write_trace(*cfg.trace_csv, "replica,log_moment_factor", rows);
      }
      metadata_slot = metadata_json(est.metadata);
      json body;
      body["value"] = est.value;
      body["stderr"] = est.stderr_value;
      body["log_value"] = est.log_value;
      body["rel_stderr"] = est.rel_stderr;
      return {body, 0};
    }

    case Task::CovarianceTest: {
      const AlgebraData data = AlgebraData::build(cfg.algebra);
      CouplingParams params;
      params.gamma = cfg.gamma;
      params.mu = resolve_mu(cfg, data.rank());
      params.validate(data.rank());
      const InsertionSet insertions = resolve_insertions(cfg, data);
      seiberg_slot = seiberg_json(seiberg_check(insertions, data, params),
                                  extended_seiberg_check(insertions, data, params));
      const SphereGrid grid = SphereGrid::fibonacci(cfg.grid_n);
      const MobiusMap psi = MobiusMap::parse(*cfg.mobius);
      McOptions mc{cfg.replicas, cfg.seed, cfg.workers, cfg.epsilon.value_or(0.0)};
      const ComparisonReport report = covariance_test(insertions, psi, data, params, grid, mc);
      return {comparison_json(report), 0};
    }

    case Task::WeylTest: {
      const AlgebraData data = AlgebraData::build(cfg.algebra);
      CouplingParams params;
      params.gamma = cfg.gamma;
      params.mu = resolve_mu(cfg, data.rank());
      params.validate(data.rank());
      const InsertionSet insertions = resolve_insertions(cfg, data);
      seiberg_slot = seiberg_json(seiberg_check(insertions, data, params),
                                  extended_seiberg_check(insertions, data, params));
      const SphereGrid grid = SphereGrid::fibonacci(cfg.grid_n);
      const ConformalFactor phi = resolve_phi(*cfg.phi);
      McOptions mc{cfg.replicas, cfg.seed, cfg.workers, cfg.epsilon.value_or(0.0)};
      const ComparisonReport report = weyl_anomaly_test(insertions, phi, data, params, grid, mc);
      json body = comparison_json(report);
      body["liouville_functional"] = liouville_functional(phi, grid);
      return {body, 0};
    }

    case Task::GmcStats: {
      const AlgebraData data = AlgebraData::build(cfg.algebra);
      CouplingParams params;
      params.gamma = cfg.gamma;
      params.mu = resolve_mu(cfg, data.rank());
      params.validate(data.rank());
      const SphereGrid grid = SphereGrid::fibonacci(cfg.grid_n);
      const CovarianceModel model =
          build_covariance(grid, data, cfg.epsilon.value_or(0.0));
      const InsertionSet insertions = resolve_insertions(cfg, data);

      const int r = data.rank();
      std::vector<KahanSum> sums(r), sums_sq(r);
      std::vector<std::string> rows;
      FieldSampler sampler(model);
      sampler.for_each(cfg.seed, 0, cfg.replicas, [&](long rep, const Eigen::MatrixXd& values) {
        FieldSample sample{values, cfg.seed, rep};
        ChaosMeasure measure = gmc_from_sample(sample, model, params.gamma);
        if (!insertions.empty()) measure = shift_measure(measure, insertions, model);
        for (int i = 0; i < r; ++i) {
          const double total = measure.total(i);
          sums[i].add(total);
          sums_sq[i].add(total * total);
          if (cfg.trace_csv)
            rows.push_back(std::to_string(rep) + "," + std::to_string(i + 1) + "," +
                           std::to_string(total));
        }
      });
      if (cfg.trace_csv) write_trace(*cfg.trace_csv, "replica,direction,total_mass", rows);

      EstimateMetadata md{model.n(), model.epsilon, model.theta_eta, model.clipped_fraction,
                          model.clip_warning()};
      metadata_slot = metadata_json(md);
      json body;
      body["directions"] = r;
      json means = json::array(), ses = json::array();
      for (int i = 0; i < r; ++i) {
        const double mean = sums[i].value() / cfg.replicas;
        const double var = std::max(0.0, sums_sq[i].value() / cfg.replicas - mean * mean);
        means.push_back(mean);
        ses.push_back(std::sqrt(var / cfg.replicas));
      }
      body["mean_total"] = means;
      body["stderr"] = ses;
      if (insertions.empty()) body["wick_expected"] = 4.0 * std::numbers::pi;
      return {body, 0};
    }
  }
  throw std::logic_error("unhandled task");
}

}  // namespace

std::string JobConfig::to_json_text() const { return config_echo(*this).dump(2); }

int run_job(const JobConfig& config, std::string* json_capture) {
  const auto t0 = std::chrono::steady_clock::now();
  json doc;
  doc["task"] = task_name(config.task);
  doc["config"] = config_echo(config);

  int exit_code = 0;
  json seiberg_slot, metadata_slot;
  try {
    config.validate();
    TaskOutput out = dispatch(config, seiberg_slot, metadata_slot);
    doc["result"] = out.body;
    exit_code = out.exit_code;
  } catch (const SeibergRejection& rejection) {
    seiberg_slot = seiberg_json(rejection.report(), {});
    doc["result"] = nullptr;
    doc["rejection"] = rejection.what();
    exit_code = 2;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  if (!seiberg_slot.is_null()) doc["seiberg"] = seiberg_slot;
  if (!metadata_slot.is_null()) doc["metadata"] = metadata_slot;

  const auto t1 = std::chrono::steady_clock::now();
  doc["timing"] = {
      {"wall_ms", std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()},
      {"workers", config.workers},
  };

  const std::string text = doc.dump(2) + "\n";
  if (json_capture) *json_capture = text;
  if (config.out) {
    std::ofstream out(*config.out);
    if (!out) {
      std::cerr << "error: cannot write output file '" << *config.out << "'\n";
      return 1;
    }
    out << text;
  } else {
    std::cout << text;
  }
  return exit_code;
}

}  // namespace toda
