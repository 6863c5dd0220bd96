#include <benchmark/benchmark.h>

#include "muskat/diagnostics.hpp"
#include "muskat/evolution.hpp"
#include "muskat/fields.hpp"
#include "muskat/ops.hpp"
#include "muskat/spectral.hpp"
#include "muskat/weights.hpp"

using namespace muskat;

namespace {

RealField field(int n) { return random_family(Grid(n, 32.0), 1, 20240601)[0]; }

void BM_Transform(benchmark::State& st) {
    const RealField f = field(int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(inverse(transform(f)));
}
BENCHMARK(BM_Transform)->Arg(64)->Arg(128)->Arg(256);

void BM_Shift(benchmark::State& st) {
    const SpectralField F = transform(field(int(st.range(0))));
    for (auto _ : st) benchmark::DoNotOptimize(shift(F, {0.37, -1.2}));
}
BENCHMARK(BM_Shift)->Arg(64)->Arg(128)->Arg(256);

void BM_DealiasedProduct(benchmark::State& st) {
    const RealField f = field(int(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(dealiased_product(f, f));
}
BENCHMARK(BM_DealiasedProduct)->Arg(64)->Arg(128);

void BM_MuskatRhs(benchmark::State& st) {
    const RealField f = field(int(st.range(0)));
    const QuadratureSpec q = reference_quadrature();
    for (auto _ : st) benchmark::DoNotOptimize(muskat_rhs(f, q));
}
BENCHMARK(BM_MuskatRhs)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_MuskatRhsCutoff(benchmark::State& st) {
    const RealField f = field(int(st.range(0)));
    const QuadratureSpec q = reference_quadrature();
    for (auto _ : st) benchmark::DoNotOptimize(muskat_rhs_cutoff(f, 0.1, q));
}
BENCHMARK(BM_MuskatRhsCutoff)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_PhiTable(benchmark::State& st) {
    const Weight w = Weight::log_pow(0.375);
    for (auto _ : st) benchmark::DoNotOptimize(PhiTable(w, PhiTable::log_nodes(int(st.range(0)))));
}
BENCHMARK(BM_PhiTable)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_KernelMultiplier(benchmark::State& st) {
    KernelSpec k{DifferenceOrder::Second, 1.5, int(st.range(0)), Weight::log_pow(0.375)};
    for (auto _ : st) benchmark::DoNotOptimize(difference_kernel_multiplier(k, Vec2{1.3, 0.4}));
}
BENCHMARK(BM_KernelMultiplier)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Record(benchmark::State& st) {
    const Grid g(int(st.range(0)), 32.0);
    const RealField f = field(g.n);
    const auto phi = PhiTable::for_grid(Weight::log_pow(0.375), g);
    const RealField rhs(g);
    const QuadratureSpec q = reference_quadrature();
    for (auto _ : st) benchmark::DoNotOptimize(record(f, *phi, q, 0.0, &rhs));
}
BENCHMARK(BM_Record)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& st) {
    SimConfig c;
    c.grid = Grid(int(st.range(0)), 32.0);
    c.initial.kind = InitialData::Kind::Gaussian;
    c.initial.amplitude = 0.1;
    c.initial.width = 2.0;
    const SimState s = initial_state(c);
    for (auto _ : st) benchmark::DoNotOptimize(step(s, c));
}
BENCHMARK(BM_Step)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
