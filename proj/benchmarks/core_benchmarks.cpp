#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "nnrepair/encoder.hpp"
#include "nnrepair/geometry.hpp"
#include "nnrepair/repair.hpp"
#include "nnrepair/smt/script.hpp"
#include "nnrepair/trainer.hpp"

namespace nr = nnrepair;

namespace {

nr::Network net_for(const std::vector<std::size_t>& topo) { return nr::init_network(topo, 42); }

void BM_Forward(benchmark::State& state) {
  const auto net = net_for({2, static_cast<std::size_t>(state.range(0)), 2});
  const std::vector<double> x{0.3, -1.7};
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(x));
  }
}
BENCHMARK(BM_Forward)->Arg(4)->Arg(10)->Arg(64);

void BM_ForwardExact(benchmark::State& state) {
  const auto net = net_for({2, 10, 10, 2});
  const auto x = nr::decimals_from_doubles(std::vector<double>{0.3, -1.7});
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward_exact(x));
  }
}
BENCHMARK(BM_ForwardExact);

// Building and printing the repair script for one free pair.
void BM_EmitRepair(benchmark::State& state) {
  const auto net = net_for({2, 10, 10, 2});
  nr::RobustnessProperty p;
  p.name = "p";
  p.center = {nr::Rational(1), nr::Rational(2)};
  p.delta = nr::Rational(1, 2);
  p.norm = nr::Norm::kL1;
  p.target_class = 0;
  const std::vector<nr::RobustnessProperty> props{p};
  const nr::WeightSelection free{nr::WeightId::weight(1, 0, 0), nr::WeightId::bias(3, 1)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(nr::smt::emit(nr::encode_repair(net, free, props)));
  }
}
BENCHMARK(BM_EmitRepair);

void BM_Voronoi(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-20, 20);
  std::vector<nr::Point2> gens(static_cast<std::size_t>(state.range(0)));
  for (auto& g : gens) {
    g = {u(rng), u(rng)};
  }
  const nr::Rect box{{-20, -20}, {20, 20}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(nr::voronoi_cells(gens, box));
  }
}
BENCHMARK(BM_Voronoi)->Arg(82)->Arg(153)->Arg(268);

void BM_Combinations(benchmark::State& state) {
  const auto net = net_for({2, 10, 10, 2});
  const auto ids = net.enumerate_weight_ids();
  const nr::SearchState empty;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nr::build_eligible_combinations(empty, 2, ids));
  }
}
BENCHMARK(BM_Combinations);

}  // namespace

BENCHMARK_MAIN();
