// Serial reference condensing vs the OpenMP block kernel, across horizon lengths.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "thrustwalk/condense.hpp"

namespace {

using namespace thrustwalk;

struct Instance {
  std::vector<LinearModel> models;
  std::vector<StateVector> x_ref;
  StateVector x0;
  StateVector q_diag;
  InputVector r_diag;
};

Instance make_instance(int nh) {
  std::mt19937_64 rng(nh);
  std::uniform_real_distribution<double> u(-1, 1);
  Instance in;
  for (int k = 0; k < nh; ++k) {
    LinearModel m;
    m.A = Eigen::Matrix<double, kStateDim, kStateDim>::Identity();
    for (int i = 0; i < kStateDim; ++i) {
      for (int j = 0; j < kStateDim; ++j) m.A(i, j) += 0.05 * u(rng);
      for (int j = 0; j < kInputDim; ++j) m.B(i, j) = 0.1 * u(rng);
    }
    in.models.push_back(m);
    StateVector r;
    for (int i = 0; i < kStateDim; ++i) r[i] = u(rng);
    in.x_ref.push_back(r);
  }
  for (int i = 0; i < kStateDim; ++i) {
    in.x0[i] = u(rng);
    in.q_diag[i] = 1.0 + u(rng) * 0.5;
  }
  in.r_diag.setConstant(1e-4);
  return in;
}

void BM_CondenseReference(benchmark::State& state) {
  const Instance in = make_instance(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(condense_reference(in.models, in.x0, in.x_ref, in.q_diag, in.r_diag));
}

void BM_CondenseKernel(benchmark::State& state) {
  const Instance in = make_instance(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(condense(in.models, in.x0, in.x_ref, in.q_diag, in.r_diag));
}

BENCHMARK(BM_CondenseReference)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CondenseKernel)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
