#include <benchmark/benchmark.h>

#include <random>

#include "fk/chebyshev.hpp"
#include "fk/dense_eig.hpp"
#include "fk/linalg.hpp"
#include "fk/problems.hpp"
#include "fk/solvers.hpp"

namespace {

fk::Vector random_unit(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    fk::Vector v(n);
    for (double& x : v) x = u(rng);
    fk::normalize(v);
    return v;
}

void BM_Matvec(benchmark::State& state) {
    const fk::CsrMatrix a = fk::assemble_pde({fk::PdeCaseKind::CaseI, static_cast<int>(state.range(0))});
    const fk::Vector x = random_unit(a.n(), 1);
    fk::Vector y(a.n());
    for (auto _ : state) {
        a.multiply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nnz()));
}
BENCHMARK(BM_Matvec)->Arg(60)->Arg(200);

void BM_ChebyshevApply(benchmark::State& state) {
    const fk::CsrMatrix a = fk::assemble_pde({fk::PdeCaseKind::CaseI, 60});
    const fk::Vector x = random_unit(a.n(), 2);
    const fk::FilterSpec spec{fk::Ellipse{-3.0e5, 0.0, 2.9e5}, static_cast<int>(state.range(0)), -28.0};
    for (auto _ : state) {
        fk::MatvecCounter counter;
        benchmark::DoNotOptimize(fk::chebyshev_apply(a, x, spec, counter));
    }
}
BENCHMARK(BM_ChebyshevApply)->Arg(20)->Arg(60);

void BM_EigReal(benchmark::State& state) {
    const std::size_t k = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    fk::Matrix m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m(i, j) = u(rng);
    for (auto _ : state) benchmark::DoNotOptimize(fk::eig_real(m));
}
BENCHMARK(BM_EigReal)->Arg(20)->Arg(40)->Arg(60);

void BM_Mgs(benchmark::State& state) {
    const std::size_t n = 3600;
    const std::size_t k = static_cast<std::size_t>(state.range(0));
    fk::DenseColumns basis(n, k);
    for (std::size_t j = 0; j < k; ++j) basis.append(fk::mgs_orthonormalize(basis, random_unit(n, 10 + j)).v);
    const fk::Vector z = random_unit(n, 7);
    for (auto _ : state) benchmark::DoNotOptimize(fk::mgs_orthonormalize(basis, z));
}
BENCHMARK(BM_Mgs)->Arg(10)->Arg(40);

void BM_Solve(benchmark::State& state) {
    const fk::CsrMatrix a = fk::assemble_pde({fk::PdeCaseKind::CaseI, 20});
    fk::Vector v0(a.n(), 1.0);
    fk::SolverConfig config;
    config.method = static_cast<fk::Method>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fk::solve(a, config, v0));
    state.SetLabel(std::string(fk::to_string(config.method)));
}
BENCHMARK(BM_Solve)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
