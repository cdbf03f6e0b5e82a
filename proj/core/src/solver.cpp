#include "circlepat/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include "circlepat/sphertrig.hpp"
#include "parallel.hpp"

namespace circlepat
{
namespace
{

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 0x1p-30;
// squared Newton decrement d^T H d below which full steps may be taken on
// residual decrease alone
constexpr double kNewtonDecrement = 1e-2;

void check_K(const WeightedCellGraph& g, const std::vector<double>& K)
{
    if (K.size() != g.num_faces()) {
        throw ValidationError("expected " + std::to_string(g.num_faces()) + " coordinates, got " +
                              std::to_string(K.size()));
    }
    for (double k : K) {
        if (!std::isfinite(k)) {
            throw DomainError("coordinates must be finite");
        }
    }
}

struct EdgeEval
{
    std::size_t f_plus = 0;
    std::size_t f_minus = 0;
    BigonShape shape;
    BigonJacobian jac;
};

std::vector<EdgeEval> evaluate_edges(const WeightedCellGraph& g, const std::vector<double>& K, bool with_jacobian,
                                     unsigned threads)
{
    std::vector<EdgeEval> out(g.num_edges());
    detail::parallel_chunks(g.num_edges(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t e = begin; e < end; ++e) {
            EdgeEval& ev = out[e];
            ev.f_plus = g.face_of({e, Orientation::Plus});
            ev.f_minus = g.face_of({e, Orientation::Minus});
            ev.shape = bigon_from_K(g.edge(e).theta, K[ev.f_plus], K[ev.f_minus]);
            if (with_jacobian) {
                ev.jac = bigon_jacobian(ev.shape);
            }
        }
    });
    return out;
}

std::vector<double> face_totals(std::size_t num_faces, const std::vector<EdgeEval>& evals)
{
    std::vector<double> T(num_faces, 0.0);
    for (const EdgeEval& ev : evals) {
        T[ev.f_plus] += ev.shape.T1;
        T[ev.f_minus] += ev.shape.T2;
    }
    return T;
}

Eigen::SparseMatrix<double> hessian_from(std::size_t n, const std::vector<EdgeEval>& evals)
{
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(4 * evals.size());
    for (const EdgeEval& ev : evals) {
        triplets.emplace_back(ev.f_plus, ev.f_plus, ev.jac.dT1_dK1);
        triplets.emplace_back(ev.f_plus, ev.f_minus, ev.jac.dT1_dK2);
        triplets.emplace_back(ev.f_minus, ev.f_plus, ev.jac.dT2_dK1);
        triplets.emplace_back(ev.f_minus, ev.f_minus, ev.jac.dT2_dK2);
    }
    Eigen::SparseMatrix<double> H(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    H.setFromTriplets(triplets.begin(), triplets.end());
    return H;
}

double sup_norm(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

struct Iterate
{
    std::vector<double> K;
    std::vector<double> T;
    std::vector<double> grad;
    double residual = 0.0;
};

Iterate make_iterate(const WeightedCellGraph& g, std::vector<double> K, const CurvatureTarget& targets,
                     unsigned threads)
{
    Iterate it;
    it.K = std::move(K);
    it.T = face_totals(g.num_faces(), evaluate_edges(g, it.K, false, threads));
    it.grad.resize(it.T.size());
    for (std::size_t f = 0; f < it.T.size(); ++f) {
        it.grad[f] = it.T[f] - targets.values[f];
    }
    it.residual = sup_norm(it.grad);
    return it;
}

double dot(const std::vector<double>& a, const Eigen::VectorXd& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[static_cast<Eigen::Index>(i)];
    }
    return s;
}

struct LinearSolve
{
    Eigen::VectorXd x;
    bool ok = false;
};

LinearSolve newton_direction(const Eigen::SparseMatrix<double>& H, const Eigen::VectorXd& rhs, std::size_t dense_limit)
{
    LinearSolve out;
    if (static_cast<std::size_t>(H.rows()) <= dense_limit) {
        const Eigen::MatrixXd D(H);
        Eigen::LLT<Eigen::MatrixXd> llt(D);
        if (llt.info() == Eigen::Success) {
            out.x = llt.solve(rhs);
            out.ok = out.x.allFinite();
        }
        return out;
    }
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(1e-14);
    cg.setMaxIterations(std::max<Eigen::Index>(100, 10 * H.rows()));
    cg.compute(H);
    out.x = cg.solve(rhs);
    out.ok = out.x.allFinite() && (cg.info() == Eigen::Success || cg.info() == Eigen::NoConvergence);
    return out;
}

double condition_estimate(const Eigen::SparseMatrix<double>& H, std::size_t dense_limit)
{
    if (static_cast<std::size_t>(H.rows()) <= dense_limit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(H), Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        const auto& ev = es.eigenvalues();
        return ev.maxCoeff() / ev.minCoeff();
    }
    const Eigen::VectorXd d = H.diagonal();
    return d.maxCoeff() / d.minCoeff();
}

}  // namespace

std::vector<double> total_curvatures(const WeightedCellGraph& g, const std::vector<double>& K, unsigned threads)
{
    check_K(g, K);
    return face_totals(g.num_faces(), evaluate_edges(g, K, false, threads));
}

GradientHessian assemble_gradient_hessian(const WeightedCellGraph& g, const std::vector<double>& K,
                                          const CurvatureTarget& targets, unsigned threads)
{
    check_K(g, K);
    if (targets.values.size() != g.num_faces()) {
        throw ValidationError("target count does not match the number of faces");
    }
    const auto evals = evaluate_edges(g, K, true, threads);
    const auto T = face_totals(g.num_faces(), evals);
    GradientHessian out;
    out.gradient.resize(static_cast<Eigen::Index>(T.size()));
    for (std::size_t f = 0; f < T.size(); ++f) {
        out.gradient[static_cast<Eigen::Index>(f)] = T[f] - targets.values[f];
    }
    out.hessian = hessian_from(g.num_faces(), evals);
    return out;
}

double omega_value(const WeightedCellGraph& g, const std::vector<double>& K, const CurvatureTarget& targets)
{
    check_K(g, K);
    double omega = 0.0;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        omega += primitive_value(g.edge(e).theta, K[g.face_of({e, Orientation::Plus})],
                                 K[g.face_of({e, Orientation::Minus})]);
    }
    for (std::size_t f = 0; f < g.num_faces(); ++f) {
        omega -= targets.values.at(f) * K[f];
    }
    return omega;
}

SolveReport solve(const WeightedCellGraph& g, const CurvatureTarget& targets, const SolverOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    if (targets.values.size() != g.num_faces()) {
        throw ValidationError("target count does not match the number of faces");
    }
    if (!(options.tolerance > 0.0)) {
        throw DomainError("tolerance must be positive");
    }
    if (options.max_iterations < 1) {
        throw DomainError("max_iterations must be at least 1");
    }
    if (!options.skip_feasibility) {
        FeasibilityOptions fopts;
        fopts.threads = options.threads;
        FeasibilityReport fr = find_coherent_system(g, targets, fopts);
        if (!fr.feasible) {
            throw InfeasibleTargetsError("targets violate the subset condition", std::move(fr));
        }
    }

    const std::size_t n = g.num_faces();
    std::vector<double> K0 = options.initial_K.value_or(std::vector<double>(n, 0.0));
    check_K(g, K0);

    SolveReport report;
    report.linear_solver = n <= options.dense_limit ? "dense-cholesky" : "preconditioned-cg";
    Iterate cur = make_iterate(g, std::move(K0), targets, options.threads);
    report.residual_history.push_back(cur.residual);

    auto finish = [&](bool converged) {
        report.converged = converged;
        report.final_residual = cur.residual;
        report.achieved_T = cur.T;
        report.gradient = cur.grad;
        report.radii.resize(n);
        for (std::size_t f = 0; f < n; ++f) {
            report.radii[f] = std::atan(std::exp(-cur.K[f]));
        }
        const auto H = assemble_gradient_hessian(g, cur.K, targets, options.threads).hessian;
        report.condition_estimate = condition_estimate(H, options.dense_limit);
        report.omega = options.compute_omega ? omega_value(g, cur.K, targets)
                                             : std::numeric_limits<double>::quiet_NaN();
        report.K = std::move(cur.K);
        report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    auto fail = [&](const std::string& why) {
        finish(false);
        throw SolverConvergenceError(why, std::move(report));
    };

    while (cur.residual > options.tolerance) {
        if (report.iterations >= options.max_iterations) {
            fail("no convergence within " + std::to_string(options.max_iterations) + " iterations (residual " +
                 std::to_string(cur.residual) + ")");
        }
        const GradientHessian gh = assemble_gradient_hessian(g, cur.K, targets, options.threads);
        const LinearSolve ls = newton_direction(gh.hessian, -gh.gradient, options.dense_limit);
        if (!ls.ok) {
            fail("Newton system could not be solved");
        }
        const double slope0 = dot(cur.grad, ls.x);
        if (!(slope0 < 0.0)) {
            fail("Newton direction is not a descent direction");
        }

        // A step is accepted when the sup-norm residual does not grow and
        // the potential provably decreases: by convexity, the slope at the
        // trial point bounds the change. Close to the minimum the slope at
        // t = 1 is O(|d|^3) with either sign, so there a full step is also
        // taken when it halves the residual.
        const bool newton_regime = -slope0 <= kNewtonDecrement;
        double t = 1.0;
        for (;;) {
            std::vector<double> K(n);
            for (std::size_t f = 0; f < n; ++f) {
                K[f] = cur.K[f] + t * ls.x[static_cast<Eigen::Index>(f)];
            }
            bool finite = std::all_of(K.begin(), K.end(), [](double k) { return std::isfinite(k); });
            if (finite) {
                Iterate trial = make_iterate(g, std::move(K), targets, options.threads);
                const double slope = dot(trial.grad, ls.x);
                if (std::isfinite(trial.residual) && trial.residual <= cur.residual &&
                    (slope <= kArmijo * slope0 || (t == 1.0 && newton_regime && trial.residual <= 0.5 * cur.residual))) {
                    cur = std::move(trial);
                    break;
                }
            }
            t *= 0.5;
            if (t < kMinStep) {
                fail("line search step fell below 2^-30 (residual " + std::to_string(cur.residual) + ")");
            }
        }
        ++report.iterations;
        report.step_lengths.push_back(t);
        report.residual_history.push_back(cur.residual);
    }
    finish(true);
    return report;
}

}  // namespace circlepat
