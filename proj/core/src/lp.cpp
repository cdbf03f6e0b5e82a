#include "circlepat/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace circlepat::lp
{

const char* to_string(Status s) noexcept
{
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::PivotLimit: return "pivot-limit";
    }
    return "unknown";
}

DenseProgram::DenseProgram(std::size_t num_vars) : num_vars_{num_vars}, objective_(num_vars, 0.0) {}

void DenseProgram::set_objective(std::vector<double> c)
{
    if (c.size() != num_vars_) {
        throw std::invalid_argument("objective size does not match the number of variables");
    }
    objective_ = std::move(c);
}

std::size_t DenseProgram::add_row(std::vector<double> coefficients, Sense sense, double rhs)
{
    if (coefficients.size() != num_vars_) {
        throw std::invalid_argument("row size does not match the number of variables");
    }
    rows_.push_back(Row{std::move(coefficients), sense, rhs});
    return rows_.size() - 1;
}

namespace
{

class Tableau
{
public:
    Tableau(std::size_t rows, std::size_t cols) : m_{rows}, n_{cols}, data_((rows + 1) * (cols + 1), 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data_[i * (n_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return data_[i * (n_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, n_); }
    double& cost(std::size_t j) { return at(m_, j); }  // reduced cost row

    void pivot(std::size_t r, std::size_t c)
    {
        const double p = at(r, c);
        for (std::size_t j = 0; j <= n_; ++j) {
            at(r, j) /= p;
        }
        at(r, c) = 1.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) {
                continue;
            }
            const double f = at(i, c);
            if (f == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j <= n_; ++j) {
                at(i, j) -= f * at(r, j);
            }
            at(i, c) = 0.0;
        }
    }

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<double> data_;
};

enum class RunResult
{
    Optimal,
    Unbounded,
    PivotLimit,
};

// Bland's rule: lowest-index improving column, lowest-index leaving basic
// variable among ratio ties.
RunResult run_simplex(Tableau& t, std::vector<std::size_t>& basis, const std::vector<char>& may_enter,
                      double tol, std::size_t& pivots, std::size_t max_pivots)
{
    for (;;) {
        std::size_t enter = t.cols();
        for (std::size_t j = 0; j < t.cols(); ++j) {
            if (may_enter[j] && t.cost(j) > tol) {
                enter = j;
                break;
            }
        }
        if (enter == t.cols()) {
            return RunResult::Optimal;
        }
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a > tol) {
                best = std::min(best, t.rhs(i) / a);
            }
        }
        std::size_t leave = t.rows();
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a > tol && t.rhs(i) / a <= best + tol && (leave == t.rows() || basis[i] < basis[leave])) {
                leave = i;
            }
        }
        if (leave == t.rows()) {
            return RunResult::Unbounded;
        }
        if (++pivots > max_pivots) {
            return RunResult::PivotLimit;
        }
        t.pivot(leave, enter);
        basis[leave] = enter;
    }
}

void load_costs(Tableau& t, const std::vector<double>& c, const std::vector<std::size_t>& basis)
{
    for (std::size_t j = 0; j <= t.cols(); ++j) {
        double z = 0.0;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            z += c[basis[i]] * t.at(i, j);
        }
        // cost row holds c_j - z_j; its rhs entry holds -objective
        t.cost(j) = (j < t.cols() ? c[j] : 0.0) - z;
    }
}

}  // namespace

Solution DenseProgram::maximize(double tol, std::size_t max_pivots) const
{
    const std::size_t m = rows_.size();
    const std::size_t n = num_vars_;

    // Normalise to rhs >= 0.
    std::vector<Sense> sense(m);
    std::vector<double> flip(m, 1.0);
    std::size_t num_slack = 0;
    std::size_t num_art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sense[i] = rows_[i].sense;
        if (rows_[i].rhs < 0.0) {
            flip[i] = -1.0;
            if (sense[i] == Sense::LessEqual) {
                sense[i] = Sense::GreaterEqual;
            } else if (sense[i] == Sense::GreaterEqual) {
                sense[i] = Sense::LessEqual;
            }
        }
        if (sense[i] != Sense::Equal) {
            ++num_slack;
        }
        if (sense[i] != Sense::LessEqual) {
            ++num_art;
        }
    }

    const std::size_t cols = n + num_slack + num_art;
    Tableau t(m, cols);
    std::vector<std::size_t> basis(m);
    std::vector<std::size_t> unit_column(m);  // column that starts as e_i
    std::vector<char> is_art(cols, 0);
    std::size_t next_slack = n;
    std::size_t next_art = n + num_slack;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            t.at(i, j) = flip[i] * rows_[i].a[j];
        }
        t.rhs(i) = flip[i] * rows_[i].rhs;
        if (sense[i] == Sense::LessEqual) {
            t.at(i, next_slack) = 1.0;
            basis[i] = unit_column[i] = next_slack++;
        } else {
            if (sense[i] == Sense::GreaterEqual) {
                t.at(i, next_slack++) = -1.0;
            }
            t.at(i, next_art) = 1.0;
            is_art[next_art] = 1;
            basis[i] = unit_column[i] = next_art++;
        }
    }

    Solution sol;
    std::vector<char> may_enter(cols, 1);
    for (std::size_t j = 0; j < cols; ++j) {
        may_enter[j] = is_art[j] ? 0 : 1;
    }

    if (num_art > 0) {
        std::vector<double> phase1(cols, 0.0);
        for (std::size_t j = 0; j < cols; ++j) {
            phase1[j] = is_art[j] ? -1.0 : 0.0;
        }
        load_costs(t, phase1, basis);
        const RunResult r = run_simplex(t, basis, may_enter, tol, sol.pivots, max_pivots);
        if (r == RunResult::PivotLimit) {
            sol.status = Status::PivotLimit;
            return sol;
        }
        double infeasibility = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (is_art[basis[i]]) {
                infeasibility += t.rhs(i);
            }
        }
        double scale = 1.0;
        for (const auto& row : rows_) {
            scale = std::max(scale, std::abs(row.rhs));
        }
        if (infeasibility > 1e3 * tol * scale) {
            sol.status = Status::Infeasible;
            return sol;
        }
        // Drive remaining zero-level artificials out of the basis.
        for (std::size_t i = 0; i < m; ++i) {
            if (!is_art[basis[i]]) {
                continue;
            }
            for (std::size_t j = 0; j < cols; ++j) {
                if (!is_art[j] && std::abs(t.at(i, j)) > tol) {
                    t.pivot(i, j);
                    basis[i] = j;
                    ++sol.pivots;
                    break;
                }
            }
        }
    }

    std::vector<double> c(cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        c[j] = objective_[j];
    }
    load_costs(t, c, basis);
    const RunResult r = run_simplex(t, basis, may_enter, tol, sol.pivots, max_pivots);
    if (r == RunResult::PivotLimit) {
        sol.status = Status::PivotLimit;
        return sol;
    }
    if (r == RunResult::Unbounded) {
        sol.status = Status::Unbounded;
        return sol;
    }

    sol.status = Status::Optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (basis[i] < n) {
            sol.x[basis[i]] = t.rhs(i);
        }
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sol.objective += objective_[j] * sol.x[j];
    }
    sol.duals.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        // reduced cost of the initial unit column is 0 - y_i
        sol.duals[i] = -flip[i] * t.cost(unit_column[i]);
    }
    return sol;
}

}  // namespace circlepat::lp
