#include <benchmark/benchmark.h>

#include "storseismic/model/model.hpp"
#include "storseismic/numerics/ops.hpp"
#include "storseismic/seisgen/eikonal.hpp"
#include "storseismic/seisgen/grid_model.hpp"
#include "storseismic/seisgen/synthesis.hpp"

namespace {

using namespace storseismic;

Tensor<float> random_tensor(const Shape& shape, Rng& rng) {
  Tensor<float> t = Tensor<float>::zeros(shape);
  for (auto& x : t.mutable_data()) x = static_cast<float>(rng.normal());
  return t;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const auto a = random_tensor({n, n}, rng);
  const auto b = random_tensor({n, n}, rng);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128)->Arg(256);

ModelConfig desk_config() {
  ModelConfig c;
  c.hidden = 64;
  c.layers = 2;
  c.heads = 2;
  c.samples = 128;
  c.max_traces = 20;
  return c;
}

void BM_Forward(benchmark::State& state) {
  Rng rng(2);
  const Model model(desk_config(), rng);
  const auto batch = static_cast<std::size_t>(state.range(0));
  const auto x = random_tensor({batch, 20, 128}, rng);
  NoGradGuard guard;
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x).output);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(8);

void BM_ForwardBackward(benchmark::State& state) {
  Rng rng(3);
  Model model(desk_config(), rng, HeadKind::kReconstruction, HeadInit::kRandom);
  const auto batch = static_cast<std::size_t>(state.range(0));
  const auto x = random_tensor({batch, 20, 128}, rng);
  const auto y = random_tensor({batch, 20, 128}, rng);
  for (auto _ : state) {
    for (auto* p : model.parameters()) p->value.zero_grad();
    auto loss = mse_loss(model.forward(x).output, y);
    loss.backward();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_ForwardBackward)->Arg(8);

void BM_TravelTimes(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  const GridModel grid = random_grid_model(rng, GridModelBounds{.nx = n, .nz = n});
  for (auto _ : state) benchmark::DoNotOptimize(travel_times(grid, {n / 2, 0}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_TravelTimes)->Arg(101)->Arg(201);

void BM_Synthesis(benchmark::State& state) {
  const auto preset = generation_preset(state.range(0) ? "snist" : "desk");
  std::uint64_t index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_sample(preset, 5, index++));
}
BENCHMARK(BM_Synthesis)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
