#include <benchmark/benchmark.h>

#include "padint/integrate.hpp"

using namespace padint;

static void run(benchmark::State &st, const char *src, bool serial) {
    ParsedPoly f = parse_poly(src);
    ZetaOptions opt;
    opt.serial = serial;
    int n = static_cast<int>(f.names.size());
    for (auto _ : st) benchmark::DoNotOptimize(zeta(f.poly, n, st.range(0), opt));
}

static void BM_zeta_serial(benchmark::State &st) { run(st, "x^2 - y", true); }
static void BM_zeta_parallel(benchmark::State &st) { run(st, "x^2 - y", false); }
static void BM_zeta_serial_cubic(benchmark::State &st) { run(st, "y^3 - y", true); }
static void BM_zeta_parallel_cubic(benchmark::State &st) { run(st, "y^3 - y", false); }

BENCHMARK(BM_zeta_serial)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_zeta_parallel)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_zeta_serial_cubic)->Arg(5)->Arg(13)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_zeta_parallel_cubic)->Arg(5)->Arg(13)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
