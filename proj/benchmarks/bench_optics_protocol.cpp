#include <benchmark/benchmark.h>

#include "mubqkd/optics.hpp"
#include "mubqkd/protocol.hpp"

using namespace mubqkd;

namespace {

void BM_Propagate(benchmark::State& state) {
    const FieldCtx ctx(2, static_cast<int>(state.range(0)));
    const NetworkLayout layout =
        build_layout(ctx, Topology::TimeDivisionMultiplexed, SwitchMode::Passive);
    const TemporalState input = encode_state(ctx, 0, 0);
    for (auto _ : state) benchmark::DoNotOptimize(propagate(layout, input));
    state.SetLabel("d=" + std::to_string(ctx.order()));
}
BENCHMARK(BM_Propagate)->DenseRange(1, 4);

void BM_ExtractPovm(benchmark::State& state) {
    const FieldCtx ctx(2, static_cast<int>(state.range(0)));
    const NetworkLayout layout =
        build_layout(ctx, Topology::TimeDivisionMultiplexed, SwitchMode::Passive);
    for (auto _ : state) benchmark::DoNotOptimize(extract_povm(layout));
    state.SetLabel("d=" + std::to_string(ctx.order()));
}
BENCHMARK(BM_ExtractPovm)->DenseRange(1, 3);

void BM_ProtocolTrials(benchmark::State& state) {
    RunConfig config{FieldCtx(2, 2), state.range(0), 7, {}, MeasurementBackend::IdealPovm,
                     Topology::TimeDivisionMultiplexed, SwitchMode::Passive, 1};
    const ChannelModel channel = ChannelModel::depolarizing(0.1);
    for (auto _ : state) benchmark::DoNotOptimize(run_protocol(config, channel));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProtocolTrials)->Arg(10000)->Arg(100000);

void BM_ProtocolOpticsBackend(benchmark::State& state) {
    RunConfig config{FieldCtx(2, 2), state.range(0), 7, {}, MeasurementBackend::OpticsLayout,
                     Topology::TimeDivisionMultiplexed, SwitchMode::Passive, 1};
    const ChannelModel channel = ChannelModel::depolarizing(0.1);
    for (auto _ : state) benchmark::DoNotOptimize(run_protocol(config, channel));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ProtocolOpticsBackend)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
