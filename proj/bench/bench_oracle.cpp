#include <benchmark/benchmark.h>

#include "padint/oracle.hpp"

using namespace padint;

static void BM_oracle_serial(benchmark::State &st) {
    MPoly f = parse_poly("x*y").poly;
    for (auto _ : st) benchmark::DoNotOptimize(mu_table_serial(f, 5, static_cast<int>(st.range(0))));
}

static void BM_oracle_parallel(benchmark::State &st) {
    MPoly f = parse_poly("x*y").poly;
    for (auto _ : st) benchmark::DoNotOptimize(mu_table(f, 5, static_cast<int>(st.range(0))));
}

static void BM_oracle_serial_cubic(benchmark::State &st) {
    MPoly f = parse_poly("x^2 - y^3").poly;
    for (auto _ : st) benchmark::DoNotOptimize(mu_table_serial(f, 3, static_cast<int>(st.range(0))));
}

static void BM_oracle_parallel_cubic(benchmark::State &st) {
    MPoly f = parse_poly("x^2 - y^3").poly;
    for (auto _ : st) benchmark::DoNotOptimize(mu_table(f, 3, static_cast<int>(st.range(0))));
}

BENCHMARK(BM_oracle_serial)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_oracle_parallel)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_oracle_serial_cubic)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_oracle_parallel_cubic)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
