// Serial reference vs OpenMP variant for each kernel. Thread count follows
// OMP_NUM_THREADS; on a single core the two should be on par.

#include <benchmark/benchmark.h>

#include <omp.h>

#include <cmath>
#include <random>

#include "qpgen/backend.hpp"
#include "qpgen/kernels.hpp"

using namespace qpgen;

namespace {

FourierSeries hermitian_series(int d, int k_max) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  FourierSeries s(d, d, k_max);
  for (int k = 0; k <= k_max; ++k)
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < d; ++i) s[k](i, j) = {n(rng), n(rng)};
  s[0] = (s[0] + s[0].adjoint()).eval() / 2.0;
  for (int k = 1; k <= k_max; ++k) s[-k] = s[k].adjoint();
  return s;
}

CMatrix random_matrix(int rows, int cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  CMatrix a(rows, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = {n(rng), n(rng)};
  return a;
}

template <bool Omp>
void BM_AssembleFloquet(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const int m_max = static_cast<int>(st.range(1));
  const auto s = hermitian_series(d, 2 * m_max);
  CMatrix out;
  for (auto _ : st) {
    if constexpr (Omp)
      kernels::assemble_floquet_omp(s, 5.0, m_max, out);
    else
      kernels::assemble_floquet_serial(s, 5.0, m_max, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Omp>
void BM_ApplyExtended(benchmark::State& st) {
  const int d = static_cast<int>(st.range(0));
  const int m_max = static_cast<int>(st.range(1));
  const auto s = hermitian_series(d, 2 * m_max);
  const CVector psi = random_matrix(d * (2 * m_max + 1), 1, 7).col(0);
  for (auto _ : st) {
    CVector w = Omp ? kernels::apply_extended_omp(s, m_max, psi)
                    : kernels::apply_extended_serial(s, m_max, psi);
    benchmark::DoNotOptimize(w.data());
  }
}

template <bool Omp>
void BM_OverlapAbs(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const CMatrix a = random_matrix(n, n / 4, 3), b = random_matrix(n, n, 4);
  for (auto _ : st) {
    RMatrix s = Omp ? kernels::overlap_abs_omp(a, b) : kernels::overlap_abs_serial(a, b);
    benchmark::DoNotOptimize(s.data());
  }
}

template <bool Omp>
void BM_MapIndexed(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  auto f = [](int i) {
    double acc = 0.0;
    for (int k = 1; k < 200; ++k) acc += std::sin(1e-3 * i * k) / k;
    return acc;
  };
  std::vector<double> out;
  for (auto _ : st) {
    if constexpr (Omp)
      kernels::map_indexed_omp(n, f, out);
    else
      kernels::map_indexed_serial(n, f, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_AssembleFloquet<false>)->Args({20, 15})->Args({99, 35})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleFloquet<true>)->Args({20, 15})->Args({99, 35})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyExtended<false>)->Args({20, 15})->Args({99, 35})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ApplyExtended<true>)->Args({20, 15})->Args({99, 35})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_OverlapAbs<false>)->Arg(620)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OverlapAbs<true>)->Arg(620)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MapIndexed<false>)->Arg(4096)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MapIndexed<true>)->Arg(4096)->Unit(benchmark::kMicrosecond);

int main(int argc, char** argv) {
  backend::ensure_blas_backend(argv);
  kernels::set_threads(omp_get_max_threads());
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
