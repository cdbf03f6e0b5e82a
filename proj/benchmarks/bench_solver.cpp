#include <random>

#include <benchmark/benchmark.h>

#include "circlepat/feasibility.hpp"
#include "circlepat/generators.hpp"
#include "circlepat/solver.hpp"

using namespace circlepat;

namespace
{

struct Problem
{
    WeightedCellGraph g;
    CurvatureTarget t;
};

Problem random_problem(std::size_t faces, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    generators::RandomGluingOptions opts;
    opts.num_faces = faces;
    opts.max_face_degree = 6;
    auto g = generators::random_polygon_gluing(rng, opts);
    std::uniform_real_distribution<double> split(0.1, 0.9);
    std::vector<double> T(g.num_faces(), 0.0);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        const double w = 2 * g.edge(e).theta * 0.7;
        const double s = split(rng);
        T[g.face_of({e, Orientation::Plus})] += s * w;
        T[g.face_of({e, Orientation::Minus})] += (1 - s) * w;
    }
    auto t = make_target(g, std::move(T));
    return {std::move(g), std::move(t)};
}

void BM_Solve(benchmark::State& state)
{
    const Problem p = random_problem(static_cast<std::size_t>(state.range(0)), 7);
    SolverOptions o;
    o.skip_feasibility = true;
    o.compute_omega = false;
    o.threads = static_cast<unsigned>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve(p.g, p.t, o));
    }
    state.counters["faces"] = static_cast<double>(p.g.num_faces());
}
BENCHMARK(BM_Solve)->Args({16, 1})->Args({128, 1})->Args({1024, 1})->Args({1024, 4})->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state)
{
    const Problem p = random_problem(static_cast<std::size_t>(state.range(0)), 8);
    const std::vector<double> K(p.g.num_faces(), 0.3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_gradient_hessian(p.g, K, p.t));
    }
}
BENCHMARK(BM_Assemble)->Arg(64)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_FeasibilityLP(benchmark::State& state)
{
    const Problem p = random_problem(static_cast<std::size_t>(state.range(0)), 9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(find_coherent_system(p.g, p.t));
    }
}
BENCHMARK(BM_FeasibilityLP)->Arg(8)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_ExhaustiveCheck(benchmark::State& state)
{
    const Problem p = random_problem(static_cast<std::size_t>(state.range(0)), 10);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exhaustive_subset_check(p.g, p.t, static_cast<unsigned>(state.range(1))));
    }
}
BENCHMARK(BM_ExhaustiveCheck)->Args({16, 1})->Args({16, 4})->Unit(benchmark::kMillisecond);

}  // namespace
