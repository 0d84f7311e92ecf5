#include <benchmark/benchmark.h>

#include "toda/chaos.hpp"
#include "toda/correlation.hpp"
#include "toda/covariance.hpp"
#include "toda/rng.hpp"

namespace {

void PhiloxThroughput(benchmark::State& state) {
  toda::GaussianStream stream(42, 0);
  std::vector<double> buf(state.range(0));
  for (auto _ : state) {
    stream.fill(buf);
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(PhiloxThroughput)->Arg(1 << 12)->Arg(1 << 16);

void GreenRoundKernel(benchmark::State& state) {
  const toda::SphereGrid grid = toda::SphereGrid::fibonacci(static_cast<int>(state.range(0)));
  double acc = 0;
  for (auto _ : state) {
    for (int i = 1; i < grid.size(); ++i) acc += toda::green_round(grid.points[0], grid.points[i]);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(GreenRoundKernel)->Arg(1024)->Arg(4096);

void BuildCovariance(benchmark::State& state) {
  const toda::SphereGrid grid = toda::SphereGrid::fibonacci(static_cast<int>(state.range(0)));
  const toda::AlgebraData algebra = toda::AlgebraData::build("A2");
  for (auto _ : state) {
    auto model = toda::build_covariance(grid, algebra);
    benchmark::DoNotOptimize(model.spatial_sqrt.data());
  }
}
BENCHMARK(BuildCovariance)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void SampleFieldBlock(benchmark::State& state) {
  const toda::SphereGrid grid = toda::SphereGrid::fibonacci(static_cast<int>(state.range(0)));
  const toda::AlgebraData algebra = toda::AlgebraData::build("A2");
  const toda::CovarianceModel model = toda::build_covariance(grid, algebra);
  toda::FieldSampler sampler(model);
  long rep = 0;
  for (auto _ : state) {
    double acc = 0;
    sampler.for_each(7, rep, toda::FieldSampler::kHomeBlock,
                     [&](long, const Eigen::MatrixXd& values) { acc += values(0, 0); });
    rep += toda::FieldSampler::kHomeBlock;
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * toda::FieldSampler::kHomeBlock);
}
BENCHMARK(SampleFieldBlock)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void GmcFromSample(benchmark::State& state) {
  const toda::SphereGrid grid = toda::SphereGrid::fibonacci(static_cast<int>(state.range(0)));
  const toda::AlgebraData algebra = toda::AlgebraData::build("A2");
  const toda::CovarianceModel model = toda::build_covariance(grid, algebra);
  const toda::FieldSample sample = toda::sample_field(model, 7, 0);
  for (auto _ : state) {
    auto measure = toda::gmc_from_sample(sample, model, 0.5);
    benchmark::DoNotOptimize(measure.log_mass.data());
  }
}
BENCHMARK(GmcFromSample)->Arg(1024)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
