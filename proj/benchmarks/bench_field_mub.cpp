#include <benchmark/benchmark.h>

#include "mubqkd/galois.hpp"
#include "mubqkd/mub.hpp"

using namespace mubqkd;

namespace {

const std::pair<int, int> kFields[] = {{2, 1}, {2, 2}, {2, 3}, {2, 4}, {3, 2}, {3, 3}};

void BM_FieldMul(benchmark::State& state) {
    const auto [p, n] = kFields[state.range(0)];
    const FieldCtx ctx(p, n);
    int a = 1, b = ctx.order() - 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ctx.mul(a, b));
        a = (a + 1) % ctx.order();
        b = (b * 7 + 3) % ctx.order();
    }
    state.SetLabel("d=" + std::to_string(ctx.order()));
}
BENCHMARK(BM_FieldMul)->DenseRange(0, 5);

void BM_BuildFamily(benchmark::State& state) {
    const auto [p, n] = kFields[state.range(0)];
    const FieldCtx ctx(p, n);
    for (auto _ : state) benchmark::DoNotOptimize(build_family(ctx, Construction::WoottersFields));
    state.SetLabel("d=" + std::to_string(ctx.order()));
}
BENCHMARK(BM_BuildFamily)->DenseRange(0, 5);

void BM_VerifyMub(benchmark::State& state) {
    const auto [p, n] = kFields[state.range(0)];
    const FieldCtx ctx(p, n);
    const MubFamily family = build_family(ctx, Construction::WoottersFields);
    for (auto _ : state) benchmark::DoNotOptimize(verify_mub(family));
    state.SetLabel("d=" + std::to_string(ctx.order()));
}
BENCHMARK(BM_VerifyMub)->DenseRange(0, 5);

}  // namespace

BENCHMARK_MAIN();
