#include "fbnl/comparison_geometry.hpp"
#include "fbnl/energy_minimizer.hpp"
#include "fbnl/frac_quadrature.hpp"
#include "fbnl/functionals.hpp"
#include "fbnl/profile.hpp"
#include "fbnl/weighted_solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

using namespace fbnl;

namespace {

const Params kP = derive_exponents(0.5, 0.5);

std::shared_ptr<const Grid2D> square(int n, const Params& P = kP)
{
    return std::make_shared<const Grid2D>(build_grid(n, n, 1.0, 1.0, default_grading(P), P));
}

} // namespace

static void BM_ComputeA1(benchmark::State& state)
{
    const Params P = derive_exponents(0.3, 0.4);
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_A1(P));
}
BENCHMARK(BM_ComputeA1);

static void BM_SolveProfile(benchmark::State& state)
{
    const Params P = derive_exponents(0.35, 0.6);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_profile(P));
}
BENCHMARK(BM_SolveProfile)->Unit(benchmark::kMillisecond);

static void BM_FracLaplacianProfile(benchmark::State& state)
{
    SampledProfile sp;
    sp.x0 = -50.0;
    sp.dx = 1.0 / 32.0;
    for (int k = 0; k <= 100 * 32; ++k) {
        const double x = sp.x0 + k * sp.dx;
        sp.u.push_back(1.0 / (1.0 + x * x));
    }
    sp.left = {true, 1.0, -2.0};
    sp.right = {true, 1.0, -2.0};
    std::vector<double> xs;
    for (int k = 0; k < state.range(0); ++k)
        xs.push_back(-2.0 + 4.0 * k / state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(frac_laplacian_profile(sp, 0.4, xs));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FracLaplacianProfile)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_SolveDirichlet(benchmark::State& state)
{
    auto g = square(static_cast<int>(state.range(0)));
    BoundarySpec bc;
    bc.dirichlet = [](double x, double y) { return std::sin(3 * x) + y; };
    const SolverOptions opts{state.range(1) ? LinearMethod::Direct : LinearMethod::PCG, 1e-10,
                             200000};
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_mixed(g, bc, opts));
}
BENCHMARK(BM_SolveDirichlet)
    ->ArgsProduct({{64, 128, 256}, {0, 1}})
    ->ArgNames({"n", "direct"})
    ->Unit(benchmark::kMillisecond);

static void BM_MinimizeEnergy(benchmark::State& state)
{
    auto g = square(static_cast<int>(state.range(0)));
    const Profile prof = with_amplitude(solve_profile(kP), amplitude_A(kP).amplitude_A_flux);
    const MinimizeConfig cfg = default_minimize_config(1.0);
    auto data = [&](double x, double y) { return eval_halfplane(prof, x - 0.1, y); };
    for (auto _ : state)
        benchmark::DoNotOptimize(minimize_energy(g, data, cfg));
}
BENCHMARK(BM_MinimizeEnergy)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_Weiss(benchmark::State& state)
{
    auto g = square(static_cast<int>(state.range(0)));
    const Profile prof = solve_profile(kP);
    const Field u = sample_field(g, [&](double x, double y) { return eval_halfplane(prof, x, y); });
    for (auto _ : state)
        benchmark::DoNotOptimize(weiss(u, 0.0, 0.4));
}
BENCHMARK(BM_Weiss)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_RotationSweep(benchmark::State& state)
{
    const Params P = derive_exponents(0.5, 0.5, 2);
    auto prof = std::make_shared<const Profile>(solve_profile(kP));
    for (auto _ : state)
        benchmark::DoNotOptimize(rotation_sweep(P, prof, {20.0, 40.0, 80.0}));
}
BENCHMARK(BM_RotationSweep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
