#pragma once

// Dense two-phase tableau simplex with Bland's rule. Sized for desk-scale
// programs (a few hundred rows and columns).

#include <cstddef>
#include <vector>

namespace circlepat::lp
{

enum class Sense
{
    LessEqual,
    GreaterEqual,
    Equal,
};

enum class Status
{
    Optimal,
    Infeasible,
    Unbounded,
    PivotLimit,
};

const char* to_string(Status s) noexcept;

struct Solution
{
    Status status = Status::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    /// One multiplier per row, for the rows as given (sign convention of a
    /// maximisation: d objective / d rhs).
    std::vector<double> duals;
    std::size_t pivots = 0;
};

/// maximize c.x  subject to  rows,  x >= 0.
class DenseProgram
{
public:
    explicit DenseProgram(std::size_t num_vars);

    void set_objective(std::vector<double> c);
    std::size_t add_row(std::vector<double> coefficients, Sense sense, double rhs);

    [[nodiscard]] std::size_t num_vars() const noexcept { return num_vars_; }
    [[nodiscard]] std::size_t num_rows() const noexcept { return rows_.size(); }

    [[nodiscard]] Solution maximize(double tolerance = 1e-11, std::size_t max_pivots = 200000) const;

private:
    struct Row
    {
        std::vector<double> a;
        Sense sense;
        double rhs;
    };

    std::size_t num_vars_;
    std::vector<double> objective_;
    std::vector<Row> rows_;
};

}  // namespace circlepat::lp
