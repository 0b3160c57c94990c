#include <benchmark/benchmark.h>

#include <vector>

#include "catoni/confseq.hpp"
#include "catoni/distributions.hpp"
#include "catoni/harness.hpp"

using namespace catoni;

namespace {

CsState make_state(std::int64_t t, const CsParams& params) {
    StreamRng rng(SeedSpec{7, 0});
    CsState state(params.alpha);
    for (std::int64_t i = 1; i <= t; ++i) {
        state.append(sample_one(DistKind::CenteredPareto18, rng), theta_cs(i, params));
    }
    return state;
}

void BM_Psi(benchmark::State& state) {
    const InfluenceSpec spec = InfluenceSpec::tight(0.5);
    double x = 0.37;
    double acc = 0.0;
    for (auto _ : state) {
        acc += psi(spec, x);
        x = -x;
    }
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_Psi);

void BM_Append(benchmark::State& state) {
    const CsParams params = CsParams::defaults(0.5, 5.0, 0.05);
    StreamRng rng(SeedSpec{7, 1});
    CsState cs(0.5);
    std::int64_t t = 0;
    for (auto _ : state) {
        cs.append(sample_one(DistKind::CenteredPareto18, rng), theta_cs(++t, params));
    }
    benchmark::DoNotOptimize(cs.sum_theta());
}
BENCHMARK(BM_Append);

void BM_Interval(benchmark::State& state) {
    const CsParams params = CsParams::defaults(0.5, 5.0, 0.05);
    const InfluenceSpec spec = InfluenceSpec::tight(0.5);
    const CsState cs = make_state(state.range(0), params);
    for (auto _ : state) {
        benchmark::DoNotOptimize(interval(cs, spec, params));
    }
}
BENCHMARK(BM_Interval)->Arg(100)->Arg(1000)->Arg(10000);

void BM_AnytimeCoveredPass(benchmark::State& state) {
    const CsParams params = CsParams::defaults(0.5, 5.0, 0.05);
    const auto xs = sample(DistKind::CenteredPareto18, SeedSpec{7, 2}, state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(anytime_covered(xs, Method::Improved, params, 0.0));
    }
}
BENCHMARK(BM_AnytimeCoveredPass)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
