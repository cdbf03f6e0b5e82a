#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "circlepat/sphertrig.hpp"

using namespace circlepat;

namespace
{

struct Point
{
    double theta, K1, K2;
};

std::vector<Point> points(std::size_t n)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> th(0.05, kHalfPi);
    std::uniform_real_distribution<double> k(-6.0, 6.0);
    std::vector<Point> out(n);
    for (auto& p : out) {
        p = {th(rng), k(rng), k(rng)};
    }
    return out;
}

void BM_BigonFromK(benchmark::State& state)
{
    const auto pts = points(1024);
    std::size_t i = 0;
    for (auto _ : state) {
        const Point& p = pts[i++ & 1023];
        benchmark::DoNotOptimize(bigon_from_K(p.theta, p.K1, p.K2));
    }
}
BENCHMARK(BM_BigonFromK);

void BM_BigonJacobian(benchmark::State& state)
{
    std::vector<BigonShape> shapes;
    for (const Point& p : points(1024)) {
        shapes.push_back(bigon_from_K(p.theta, p.K1, p.K2));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bigon_jacobian(shapes[i++ & 1023]));
    }
}
BENCHMARK(BM_BigonJacobian);

void BM_PrimitiveValue(benchmark::State& state)
{
    const auto pts = points(64);
    std::size_t i = 0;
    for (auto _ : state) {
        const Point& p = pts[i++ & 63];
        benchmark::DoNotOptimize(primitive_value(p.theta, p.K1, p.K2));
    }
}
BENCHMARK(BM_PrimitiveValue);

void BM_BigonFromTotals(benchmark::State& state)
{
    std::vector<BigonShape> shapes;
    for (const Point& p : points(256)) {
        shapes.push_back(bigon_from_K(p.theta, p.K1, p.K2));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        const BigonShape& b = shapes[i++ & 255];
        benchmark::DoNotOptimize(bigon_from_totals(b.theta, b.T1, b.T2));
    }
}
BENCHMARK(BM_BigonFromTotals);

}  // namespace
