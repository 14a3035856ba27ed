#include <benchmark/benchmark.h>

#include <vector>

#include "tailcal/diagnostics.hpp"
#include "tailcal/emos.hpp"
#include "tailcal/math.hpp"
#include "tailcal/random.hpp"
#include "tailcal/scoring.hpp"
#include "tailcal/simlab.hpp"

using namespace tailcal;

static void BM_GammaQuantile(benchmark::State& state) {
    Rng rng(1);
    for (auto _ : state)
        benchmark::DoNotOptimize(math::inv_gammp(4.0, rng.next()));
}
BENCHMARK(BM_GammaQuantile);

static void BM_GpdCdf(benchmark::State& state) {
    Dist g = Dist::gpd(1.0, 0.25);
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(g.cdf(x));
        x += 1e-6;
    }
}
BENCHMARK(BM_GpdCdf);

static void BM_TrioGeneration(benchmark::State& state) {
    auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto trio = simlab::gen_exponential_trio(n, 7, 0.25, 1.4);
        benchmark::DoNotOptimize(trio.streams[0].pairs.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TrioGeneration)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oN);

static void BM_CombinedRatioCurve(benchmark::State& state) {
    auto n = static_cast<std::size_t>(state.range(0));
    auto trio = simlab::gen_exponential_trio(n, 7, 0.25, 1.4);
    const auto& pairs = trio.streams[0].pairs;
    double t = observation_quantile(pairs, 0.9);
    auto grid = default_u_grid();
    for (auto _ : state) {
        auto curve = combined_ratio_curve(pairs, t, grid);
        benchmark::DoNotOptimize(curve.values.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CombinedRatioCurve)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oNLogN);

static void BM_CrpsQuadratureLogistic(benchmark::State& state) {
    Dist f = Dist::censored_below(Dist::logistic(1.2, 0.9), 0.0);
    double y = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(crps(f, y));
        y = y > 4.0 ? 0.0 : y + 0.37;
    }
}
BENCHMARK(BM_CrpsQuadratureLogistic);

static void BM_CrpsEnsembleClosedForm(benchmark::State& state) {
    Rng rng(3);
    std::vector<double> members(51);
    for (auto& m : members) m = rng.next() * 10.0;
    Dist f = Dist::ensemble(members);
    for (auto _ : state)
        benchmark::DoNotOptimize(crps(f, 5.0));
}
BENCHMARK(BM_CrpsEnsembleClosedForm);

static void BM_EmosObjective(benchmark::State& state) {
    Rng rng(5);
    std::vector<EmosRow> rows;
    for (int i = 0; i < 200; ++i) {
        double m = 1.0 + Dist::normal(0.0, 1.0).sample(rng);
        double s = 0.5 + rng.next();
        rows.push_back({m, s, std::max(0.0, Dist::logistic(m, 1.0).sample(rng))});
    }
    EmosModel model;
    for (auto _ : state)
        benchmark::DoNotOptimize(emos_objective(rows, model));
}
BENCHMARK(BM_EmosObjective);

BENCHMARK_MAIN();
