#include <benchmark/benchmark.h>

#include "mirate/digamma.hpp"
#include "mirate/ksg.hpp"
#include "mirate/network.hpp"
#include "mirate/probe.hpp"
#include "mirate/rng.hpp"

namespace {

using namespace mirate;

SampleMatrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    CounterRng rng(seed);
    SampleMatrix m(rows, cols);
    for (double& v : m.values()) v = rng.normal();
    return m;
}

void BM_Digamma(benchmark::State& state) {
    double x = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(digamma(x));
        x = x < 100.0 ? x + 0.37 : 0.5;
    }
}
BENCHMARK(BM_Digamma);

// One per-epoch IHYLL estimate: N probe rows, d activation columns, labels as one column.
void BM_KsgMi(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    const auto x = add_jitter(gaussian(n, d, 1), kDefaultJitter, 2);
    const auto y = add_jitter(gaussian(n, 1, 3), kDefaultJitter, 4);
    for (auto _ : state) benchmark::DoNotOptimize(ksg_mi(x, y, 4).value);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KsgMi)
    ->ArgsProduct({{250, 500, 1000, 2000}, {1, 10}})
    ->Args({1000, 128})
    ->Args({1000, 784})
    ->Unit(benchmark::kMillisecond);

void BM_ForwardCapture(benchmark::State& state) {
    const Network net = init_network({{784, 256, 128, 10}, Activation::relu, 1});
    const auto batch = gaussian(static_cast<std::size_t>(state.range(0)), 784, 5);
    for (auto _ : state) benchmark::DoNotOptimize(forward(net, batch, true).logits.rows());
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardCapture)->Arg(32)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_LossAndGrad(benchmark::State& state) {
    const Network net = init_network({{784, 256, 128, 10}, Activation::relu, 1});
    const auto batch = gaussian(static_cast<std::size_t>(state.range(0)), 784, 6);
    std::vector<int> labels(batch.rows());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 10);
    for (auto _ : state) benchmark::DoNotOptimize(loss_and_grad(net, batch, labels).loss);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossAndGrad)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
