#pragma once

// Feasibility of prescribed total curvatures.
//
// Targets (T_f) are realisable iff for every nonempty set of faces F'
//     sum_{f in F'} T_f  <  sum_{e incident to F'} 2 theta_e,
// each incident edge counted once. Equivalently there is a coherent
// system: positive values on the 2|E| sides with
//     T(e+) + T(e-) < 2 theta_e   for every edge,
//     sum_{sides t on f} T(t) = T_f   for every face.
// find_coherent_system decides the second form by linear programming; the
// exhaustive subset check decides the first form directly.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "circlepat/cellgraph.hpp"

namespace circlepat
{

inline constexpr std::size_t kMaxExhaustiveFaces = 20;

struct CoherentSystem
{
    std::vector<double> values;  // indexed by side_index()
    /// Smallest margin over all strict inequalities (positivity of every
    /// value and 2 theta_e - T(e+) - T(e-) for every edge).
    double slack = 0.0;
};

struct InfeasibilityCertificate
{
    enum class Source
    {
        Dual,
        Exhaustive,
    };

    std::vector<std::size_t> faces;  // violating subset F'
    double margin = 0.0;             // sum T_f - sum 2 theta_e >= 0
    Source source = Source::Dual;
};

const char* to_string(InfeasibilityCertificate::Source s) noexcept;

struct FeasibilityOptions
{
    /// Feasible iff the optimal LP slack exceeds this.
    double slack_tolerance = 1e-10;
    /// Threads used by the exhaustive fallback.
    unsigned threads = 1;
};

struct FeasibilityReport
{
    bool feasible = false;
    double optimal_slack = 0.0;
    std::optional<CoherentSystem> system;               // when feasible
    std::optional<InfeasibilityCertificate> certificate;  // when infeasible and one was found
    std::size_t lp_pivots = 0;
};

/// Maximises s subject to  T(t) >= s,  T(e+) + T(e-) <= 2 theta_e - s,
/// face sums equal to the targets. Feasible iff the optimum s* is positive.
/// On infeasibility a violating subset is read off the optimal duals of the
/// face rows, falling back to exhaustive search for |F| <= 20. The subset
/// reported is then reduced until no single face can be dropped from it.
FeasibilityReport find_coherent_system(const WeightedCellGraph& g, const CurvatureTarget& targets,
                                       const FeasibilityOptions& options = {});

struct SubsetVerdict
{
    bool pass = false;
    std::vector<std::size_t> worst_subset;  // maximiser of the margin
    double worst_margin = 0.0;
    /// Violating subset with the fewest faces (ties: smallest bitmask);
    /// empty when the check passes.
    std::vector<std::size_t> smallest_violation;
    double smallest_violation_margin = 0.0;
    std::size_t subsets_checked = 0;
};

/// sum_{f in F'} T_f - sum_{e incident to F'} 2 theta_e.
double subset_margin(const WeightedCellGraph& g, const CurvatureTarget& targets,
                     std::span<const std::size_t> faces);

/// Enumerates every nonempty face subset. Throws SizeError for |F| > 20.
/// Ties in the margin go to the numerically smallest subset bitmask, so
/// the verdict does not depend on the thread count.
SubsetVerdict exhaustive_subset_check(const WeightedCellGraph& g, const CurvatureTarget& targets,
                                      unsigned threads = 1);

}  // namespace circlepat
