#include <benchmark/benchmark.h>

#include "lmef/gan.hpp"
#include "lmef/manifold.hpp"
#include "lmef/pareto.hpp"
#include "lmef/problems.hpp"

using namespace lmef;

namespace {

std::vector<Vector> random_points(Rng& rng, std::size_t count, std::size_t dim, double hi = 1.0) {
    std::vector<Vector> out(count, Vector(dim));
    for (auto& p : out)
        for (auto& v : p) v = rng.uniform(0.0, hi);
    return out;
}

void BM_NondominatedSort(benchmark::State& state) {
    Rng rng(1);
    const auto pts = random_points(rng, static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(fast_nondominated_sort(pts));
}
BENCHMARK(BM_NondominatedSort)->Arg(100)->Arg(200)->Arg(1000);

void BM_Evaluate(benchmark::State& state) {
    Problem problem(static_cast<ProblemId>(state.range(0)), 2000, 2);
    Rng rng(2);
    Vector x(problem.n());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(problem.bounds().lower[i], problem.bounds().upper[i]);
    for (auto _ : state) benchmark::DoNotOptimize(problem.evaluate(x));
}
BENCHMARK(BM_Evaluate)->DenseRange(0, 8);

void BM_GanEpochs(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(3);
    const auto model = make_gan(Bounds{Vector(n, 0.0), Vector(n, 10.0)}, rng);
    const auto real = random_points(rng, 50, n, 10.0);
    GanTrainConfig config;
    config.epochs = 10;
    for (auto _ : state) benchmark::DoNotOptimize(train(model, real, config, rng));
}
BENCHMARK(BM_GanEpochs)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Pca(benchmark::State& state) {
    Rng rng(4);
    const auto data = random_points(rng, 100, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pca_fit(data, 1));
}
BENCHMARK(BM_Pca)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);

} // namespace
BENCHMARK_MAIN();
