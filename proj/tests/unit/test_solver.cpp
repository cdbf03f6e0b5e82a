#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "circlepat/error.hpp"
#include "circlepat/generators.hpp"
#include "circlepat/solver.hpp"

using namespace circlepat;

namespace
{

const double kUnitSector = std::sqrt(2.0) * std::atan(std::sqrt(2.0));  // T1 of the right-angle bigon at K = 0

CurvatureTarget feasible_targets(const WeightedCellGraph& g, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> rho(0.2, 0.9);
    std::uniform_real_distribution<double> split(0.1, 0.9);
    std::vector<double> T(g.num_faces(), 0.0);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        const double w = 2 * g.edge(e).theta * rho(rng);
        const double s = split(rng);
        T[g.face_of({e, Orientation::Plus})] += s * w;
        T[g.face_of({e, Orientation::Minus})] += (1 - s) * w;
    }
    return make_target(g, T);
}

std::vector<double> random_K(std::size_t n, std::mt19937_64& rng, double range)
{
    std::uniform_real_distribution<double> u(-range, range);
    std::vector<double> K(n);
    for (auto& k : K) {
        k = u(rng);
    }
    return K;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

}  // namespace

TEST(Solver, TotalCurvaturesOfUnitBigons)
{
    const auto digon = total_curvatures(generators::digon_sphere(), {0.0, 0.0});
    EXPECT_NEAR(digon[0], 2 * kUnitSector, 1e-14);
    EXPECT_NEAR(digon[1], 2 * kUnitSector, 1e-14);
    const auto loop = total_curvatures(generators::loop_face(), {0.0});
    EXPECT_NEAR(loop[0], 2 * kUnitSector, 1e-14);
    const auto tet = total_curvatures(generators::tetrahedron(1.1), {0.3, 0.3, 0.3, 0.3});
    for (double t : tet) {
        EXPECT_NEAR(t, tet[0], 1e-14);
    }
}

TEST(Solver, GradientIsDerivativeOfPotential)
{
    std::mt19937_64 rng(31);
    const auto g = generators::digon_sphere(0.8, 1.3);
    const auto t = make_target(g, {1.0, 1.5});
    const double h = 1e-4;
    for (int i = 0; i < 10; ++i) {
        const auto K = random_K(2, rng, 2.0);
        const auto gh = assemble_gradient_hessian(g, K, t);
        for (std::size_t f = 0; f < 2; ++f) {
            auto Kp = K;
            auto Km = K;
            Kp[f] += h;
            Km[f] -= h;
            const double fd = (omega_value(g, Kp, t) - omega_value(g, Km, t)) / (2 * h);
            const double an = gh.gradient[static_cast<Eigen::Index>(f)];
            EXPECT_LT(std::abs(fd - an), 1e-5 * std::max(1.0, std::abs(an)));
        }
    }
}

TEST(Solver, HessianIsDerivativeOfGradient)
{
    std::mt19937_64 rng(32);
    const double h = 1e-6;
    for (const auto& g : {generators::digon_sphere(0.8, 1.3), generators::tetrahedron(1.2), generators::loop_face(0.9),
                          generators::one_vertex_torus(0.7, 1.1)}) {
        const auto t = feasible_targets(g, rng);
        for (int i = 0; i < 5; ++i) {
            const auto K = random_K(g.num_faces(), rng, 3.0);
            const auto gh = assemble_gradient_hessian(g, K, t);
            const Eigen::MatrixXd H(gh.hessian);
            EXPECT_LT((H - H.transpose()).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(H).info(), Eigen::Success);
            for (std::size_t f = 0; f < g.num_faces(); ++f) {
                auto Kp = K;
                auto Km = K;
                Kp[f] += h;
                Km[f] -= h;
                const Eigen::VectorXd col =
                    (assemble_gradient_hessian(g, Kp, t).gradient - assemble_gradient_hessian(g, Km, t).gradient) /
                    (2 * h);
                const auto j = static_cast<Eigen::Index>(f);
                for (Eigen::Index r = 0; r < col.size(); ++r) {
                    EXPECT_LT(std::abs(col[r] - H(r, j)), 1e-5 * std::max(1e-2, std::abs(H(r, j))));
                }
            }
        }
    }
}

TEST(Solver, RecoversUnitBigonPattern)
{
    const auto g = generators::digon_sphere();
    const SolveReport r = solve(g, make_target(g, {2 * kUnitSector, 2 * kUnitSector}));
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.K[0], 0.0, 1e-10);
    EXPECT_NEAR(r.K[1], 0.0, 1e-10);
    EXPECT_NEAR(r.radii[0], kPi / 4, 1e-10);
    EXPECT_NEAR(r.radii[1], kPi / 4, 1e-10);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.linear_solver, "dense-cholesky");
}

TEST(Solver, SymmetricTargetsGiveEqualRadii)
{
    const auto g = generators::digon_sphere();
    for (double c : {0.05, 0.5, 2.0, 3.0, 3.1}) {
        const SolveReport r = solve(g, make_target(g, {c, c}));
        ASSERT_TRUE(r.converged) << c;
        EXPECT_NEAR(r.K[0], r.K[1], 1e-9) << c;
        EXPECT_LE(r.final_residual, 1e-10);
    }
}

TEST(Solver, ResidualNeverIncreases)
{
    std::mt19937_64 rng(33);
    const auto g = generators::cube(1.2);
    const SolveReport r = solve(g, feasible_targets(g, rng));
    for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
        EXPECT_LE(r.residual_history[i], r.residual_history[i - 1]);
    }
}

TEST(Solver, ConvergesOnRandomGraphsAndRestartsAgree)
{
    std::mt19937_64 rng(34);
    for (int i = 0; i < 60; ++i) {
        generators::RandomGluingOptions opts;
        opts.num_faces = 1 + static_cast<std::size_t>(i % 12);
        const auto g = generators::random_polygon_gluing(rng, opts);
        const auto t = feasible_targets(g, rng);
        SolverOptions o;
        o.compute_omega = false;
        const SolveReport a = solve(g, t, o);
        ASSERT_TRUE(a.converged);
        EXPECT_LE(max_abs_diff(a.achieved_T, t.values), 1e-10);
        o.initial_K = random_K(g.num_faces(), rng, 2.0);
        const SolveReport b = solve(g, t, o);
        EXPECT_LE(max_abs_diff(a.K, b.K), 1e-7);
    }
}

TEST(Solver, IterativePathMatchesDense)
{
    std::mt19937_64 rng(35);
    const auto g = generators::cube(0.9);
    const auto t = feasible_targets(g, rng);
    SolverOptions o;
    const SolveReport dense = solve(g, t, o);
    o.dense_limit = 0;
    const SolveReport cg = solve(g, t, o);
    EXPECT_EQ(cg.linear_solver, "preconditioned-cg");
    EXPECT_LE(max_abs_diff(dense.K, cg.K), 1e-9);
}

TEST(Solver, ThreadCountDoesNotChangeResult)
{
    std::mt19937_64 rng(36);
    generators::RandomGluingOptions opts;
    opts.num_faces = 10;
    const auto g = generators::random_polygon_gluing(rng, opts);
    const auto t = feasible_targets(g, rng);
    SolverOptions o;
    const SolveReport one = solve(g, t, o);
    o.threads = 4;
    const SolveReport four = solve(g, t, o);
    EXPECT_EQ(one.K, four.K);
    EXPECT_EQ(one.achieved_T, four.achieved_T);
}

TEST(Solver, InfeasibleTargets)
{
    const auto g = generators::digon_sphere();
    const auto t = make_target(g, {2 * kPi, 0.1});
    EXPECT_THROW(solve(g, t), InfeasibleTargetsError);

    SolverOptions o;
    o.skip_feasibility = true;
    o.max_iterations = 200;
    o.compute_omega = false;
    try {
        solve(g, t, o);
        FAIL() << "expected no convergence";
    } catch (const SolverConvergenceError& e) {
        EXPECT_FALSE(e.report().converged);
        EXPECT_GT(e.report().final_residual, 1e-10);
        EXPECT_GT(std::max(std::abs(e.report().K[0]), std::abs(e.report().K[1])), 10.0);
    }
}

TEST(Solver, RejectsBadOptions)
{
    const auto g = generators::digon_sphere();
    const auto t = make_target(g, {1.0, 1.0});
    SolverOptions o;
    o.initial_K = std::vector<double>{0.0};
    EXPECT_THROW(solve(g, t, o), ValidationError);
    o.initial_K.reset();
    o.tolerance = 0.0;
    EXPECT_THROW(solve(g, t, o), DomainError);
    o.tolerance = 1e-10;
    o.max_iterations = 0;
    EXPECT_THROW(solve(g, t, o), DomainError);
    EXPECT_THROW(total_curvatures(g, {0.0, std::nan("")}), DomainError);
}
