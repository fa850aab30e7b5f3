#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "vforge/perron.hpp"
#include "vforge/reduction.hpp"
#include "vforge/runner.hpp"
#include "vforge/task.hpp"

using namespace vforge;

namespace {

void BM_SignInBlock(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  ValuationFrame frame = ValuationFrame::with_default_weights({r});
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> coord(-1000, 1000);
  std::vector<std::vector<std::int64_t>> inputs(64, std::vector<std::int64_t>(r));
  for (auto& v : inputs)
    for (auto& c : v) c = coord(rng);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(frame.sign_in_block(1, inputs[k++ % inputs.size()]));
  }
}
BENCHMARK(BM_SignInBlock)->Arg(2)->Arg(3)->Arg(5);

void BM_Dominate(benchmark::State& state) {
  const std::int64_t e = state.range(0);
  Task task = parse_task("blocks: 3\nvars: x1@1 x2@1 x3@1\ntask: dominate\npoly a: x1\npoly b: x2\n");
  const Exponents m1{e, 0, 0}, m2{0, 1, e};
  for (auto _ : state) {
    Derivation d = dominate(task.initial_chart(), m1, m2);
    benchmark::DoNotOptimize(d.size());
  }
}
BENCHMARK(BM_Dominate)->Arg(3)->Arg(10)->Arg(30);

void BM_ExpandBinomial(benchmark::State& state) {
  Task task = parse_task("blocks: 1\nvars: x1@1 z@free\ntask: expand\nrelation z: z^2 - x1^2*(1 + x1)\n");
  const auto order = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    RootExpansion exp = expand_root(task.relations[0].poly, task.initial_chart(), 1, "z", {}, order);
    benchmark::DoNotOptimize(exp.series.size());
  }
}
BENCHMARK(BM_ExpandBinomial)->Arg(6)->Arg(12)->Arg(24);

void BM_RunAndVerify(benchmark::State& state) {
  const char* text = "blocks: 1\nvars: x1@1 z@free\ntask: expand\norder: 6\nrelation z: z^2 - x1^2*(1 + x1)\n";
  for (auto _ : state) {
    cli::RunResult r = cli::run_text(text);
    benchmark::DoNotOptimize(cli::verify_text(r.log, text).exit_code);
  }
}
BENCHMARK(BM_RunAndVerify);

}  // namespace
BENCHMARK_MAIN();
