#include <benchmark/benchmark.h>
#include <omp.h>

#include "msqn/kernels.hpp"
#include "msqn/random.hpp"

namespace {

using namespace msqn;

struct Data {
  RowMatrix a;
  Vector b;
  Vector x;
};

Data make_data(Index n, Index d) {
  Rng rng(11);
  Data data{gaussian_matrix(rng, n, d), gaussian_vector(rng, n), gaussian_vector(rng, d)};
  data.b = data.b.array().sign().matrix();
  return data;
}

template <LossAndGradient (*Kernel)(const RowMatrix&, const Vector&, Loss, const Vector&, bool)>
void run(benchmark::State& state, Loss loss) {
  const Data data = make_data(state.range(0), state.range(1));
  for (auto _ : state) {
    LossAndGradient r = Kernel(data.a, data.b, loss, data.x, true);
    benchmark::DoNotOptimize(r.value);
    benchmark::DoNotOptimize(r.gradient.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

void serial_square(benchmark::State& s) { run<regression_serial>(s, Loss::Square); }
void parallel_square(benchmark::State& s) { run<regression_parallel>(s, Loss::Square); }
void serial_logistic(benchmark::State& s) { run<regression_serial>(s, Loss::Logistic); }
void parallel_logistic(benchmark::State& s) { run<regression_parallel>(s, Loss::Logistic); }

void sizes(benchmark::internal::Benchmark* b) {
  b->Args({2000, 50})->Args({20000, 100})->Args({100000, 200})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(serial_square)->Apply(sizes);
BENCHMARK(parallel_square)->Apply(sizes);
BENCHMARK(serial_logistic)->Apply(sizes);
BENCHMARK(parallel_logistic)->Apply(sizes);

BENCHMARK_MAIN();
