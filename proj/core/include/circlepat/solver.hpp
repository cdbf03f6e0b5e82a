#pragma once

// Newton solver for the prescribed-total-curvature problem.
//
// Unknowns are K_f = log cot r_f, one per face. The potential
//     Omega(K) = sum_e Omega_theta_e(K_f(e+), K_f(e-)) - sum_f T_f K_f
// is strictly convex with gradient g_f = T(dD_f)(K) - T_f, so the pattern
// with the prescribed totals is its unique critical point.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "circlepat/cellgraph.hpp"
#include "circlepat/error.hpp"
#include "circlepat/feasibility.hpp"

namespace circlepat
{

/// T(dD_f) for every face: the sum over the sectors of f of the sector
/// totals of the bigon on the corresponding edge.
std::vector<double> total_curvatures(const WeightedCellGraph& g, const std::vector<double>& K, unsigned threads = 1);

struct GradientHessian
{
    Eigen::VectorXd gradient;
    Eigen::SparseMatrix<double> hessian;
};

/// Edge e contributes its 2x2 bigon Jacobian to rows and columns
/// (f(e+), f(e-)); when both sides lie on one face all four entries land
/// on that diagonal entry. Summation runs in edge order regardless of the
/// thread count.
GradientHessian assemble_gradient_hessian(const WeightedCellGraph& g, const std::vector<double>& K,
                                          const CurvatureTarget& targets, unsigned threads = 1);

/// Omega(K), using the quadrature-based bigon primitive. Diagnostic only.
double omega_value(const WeightedCellGraph& g, const std::vector<double>& K, const CurvatureTarget& targets);

struct SolverOptions
{
    double tolerance = 1e-10;  // sup-norm of the gradient
    int max_iterations = 100;
    std::optional<std::vector<double>> initial_K;  // default: all zero
    bool skip_feasibility = false;
    unsigned threads = 1;
    /// Dense Cholesky up to this many faces, preconditioned CG above.
    std::size_t dense_limit = 512;
    bool compute_omega = true;
};

struct SolveReport
{
    bool converged = false;
    std::vector<double> K;
    std::vector<double> radii;
    std::vector<double> achieved_T;
    std::vector<double> gradient;
    int iterations = 0;
    double final_residual = 0.0;
    std::vector<double> residual_history;  // one entry per iterate, starting point included
    std::vector<double> step_lengths;      // accepted damping factors
    double omega = 0.0;                    // NaN unless compute_omega
    /// lambda_max / lambda_min of the Hessian at the last iterate (dense
    /// path), or the ratio of extreme diagonal entries (CG path).
    double condition_estimate = 0.0;
    std::string linear_solver;
    double wall_time = 0.0;  // seconds
};

/// The feasibility gate failed; carries the LP report and certificate.
class InfeasibleTargetsError : public Error
{
public:
    InfeasibleTargetsError(std::string message, FeasibilityReport report)
        : Error(std::move(message)), report_{std::move(report)}
    {
    }
    [[nodiscard]] const FeasibilityReport& report() const noexcept { return report_; }

private:
    FeasibilityReport report_;
};

/// Iteration or step-size limit reached; carries the last state.
class SolverConvergenceError : public ConvergenceError
{
public:
    SolverConvergenceError(std::string message, SolveReport report)
        : ConvergenceError(std::move(message)), report_{std::move(report)}
    {
    }
    [[nodiscard]] const SolveReport& report() const noexcept { return report_; }

private:
    SolveReport report_;
};

/// Damped Newton from options.initial_K. Throws InfeasibleTargetsError when
/// the gate is on and the targets are infeasible, SolverConvergenceError on
/// failure to reach the tolerance.
SolveReport solve(const WeightedCellGraph& g, const CurvatureTarget& targets, const SolverOptions& options = {});

}  // namespace circlepat
