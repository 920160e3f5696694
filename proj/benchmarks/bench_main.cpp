// Own main: the distro's libbenchmark_main.a ships LTO bytecode tied to a
// different compiler build and fails to link.
#include <benchmark/benchmark.h>

BENCHMARK_MAIN();
