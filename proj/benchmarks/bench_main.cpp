#include "bhtlab/coefficients.hpp"
#include "bhtlab/counterexample.hpp"
#include "bhtlab/multiplier.hpp"
#include "bhtlab/paraproduct.hpp"
#include "bhtlab/whitney.hpp"

#include <benchmark/benchmark.h>

using namespace bhtlab;

namespace {

void BM_SpectralBht(benchmark::State& state)
{
    const Grid g(static_cast<std::size_t>(state.range(0)), 128.0, -64.0);
    RandomStream rs(1, 0);
    const auto f1 = random_gaussian_tones(g, rs);
    const auto f2 = random_gaussian_tones(g, rs);
    for (auto _ : state) benchmark::DoNotOptimize(apply_bilinear_multiplier(sign_symbol(), f1, f2));
}
BENCHMARK(BM_SpectralBht)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_PvQuadrature(benchmark::State& state)
{
    const Grid g = oracle_grid();
    RandomStream rs(1, 0);
    const auto f1 = random_gaussian_tones(g, rs);
    const auto f2 = random_gaussian_tones(g, rs);
    std::vector<double> points;
    for (int i = 0; i < state.range(0); ++i) points.push_back(-1.0 + 2.0 * i / static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(bht_timedomain(f1, f2, {}, points));
}
BENCHMARK(BM_PvQuadrature)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FamilySum(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const BumpPair bumps = make_bump_pair(counterexample_grid(n));
    const auto eps = rademacher_signs(n, 1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(family_sum(bumps, n, eps));
}
BENCHMARK(BM_FamilySum)->Arg(16)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_WhitneyEnumerate(benchmark::State& state)
{
    const WhitneyCover cover(static_cast<int>(state.range(0)), {1.0, 2.0});
    const auto window = cover.window_for_budget(20000);
    for (auto _ : state) benchmark::DoNotOptimize(cover.enumerate(window));
}
BENCHMARK(BM_WhitneyEnumerate)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_PartitionWeights(benchmark::State& state)
{
    const PartitionOfUnity partition({1.0, 2.0});
    for (auto _ : state) benchmark::DoNotOptimize(partition.weights(-0.4, 1.3));
}
BENCHMARK(BM_PartitionWeights)->Unit(benchmark::kMicrosecond);

void BM_FourierCoefficients(benchmark::State& state)
{
    const PartitionOfUnity partition({1.0, 2.0});
    const auto square = representative_square(1, 1.5, {1.0, 2.0});
    const LocalizedSymbol mq(exp_decay_symbol(1.0), complete_to_cube(square), partition);
    for (auto _ : state) benchmark::DoNotOptimize(fourier_coefficients(mq, {2, 2, 2}, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_FourierCoefficients)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ModelApply(benchmark::State& state)
{
    const auto family = model_family(2, 1);
    TileCollection coll = build_tiles(family, {-static_cast<double>(state.range(0)), static_cast<double>(state.range(0))});
    const Grid grid(required_model_samples(coll, kModelPeriod), kModelPeriod, -0.5 * kModelPeriod);
    const PacketBank bank(std::move(coll), grid);
    const auto f1 = random_packet_sum(bank, 1, 2.0, 1, 0);
    const auto f2 = random_packet_sum(bank, 2, 2.0, 1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(model_apply(bank, f1, f2));
}
BENCHMARK(BM_ModelApply)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
