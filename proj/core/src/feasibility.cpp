#include "circlepat/feasibility.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <string>

#include "circlepat/error.hpp"
#include "circlepat/lp.hpp"
#include "parallel.hpp"

namespace circlepat
{
namespace
{

void check_sizes(const WeightedCellGraph& g, const CurvatureTarget& targets)
{
    if (targets.values.size() != g.num_faces()) {
        throw ValidationError("expected " + std::to_string(g.num_faces()) + " target values, got " +
                              std::to_string(targets.values.size()));
    }
}

// Sum of targets and sum of incident edge weights, each in ascending index
// order so that every caller rounds identically.
double margin_from_membership(const WeightedCellGraph& g, const CurvatureTarget& targets,
                              const std::vector<char>& member)
{
    double sum_t = 0.0;
    for (std::size_t f = 0; f < g.num_faces(); ++f) {
        if (member[f]) {
            sum_t += targets.values[f];
        }
    }
    double sum_w = 0.0;
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        const std::size_t fp = g.face_of({e, Orientation::Plus});
        const std::size_t fm = g.face_of({e, Orientation::Minus});
        if (member[fp] || member[fm]) {
            sum_w += 2.0 * g.edge(e).theta;
        }
    }
    return sum_t - sum_w;
}

double coherent_slack(const WeightedCellGraph& g, const std::vector<double>& values)
{
    double slack = std::numeric_limits<double>::infinity();
    for (double v : values) {
        slack = std::min(slack, v);
    }
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        slack = std::min(slack, 2.0 * g.edge(e).theta - values[2 * e] - values[2 * e + 1]);
    }
    return slack;
}

bool better_certificate(const InfeasibilityCertificate& a, const InfeasibilityCertificate& b)
{
    if (a.faces.size() != b.faces.size()) {
        return a.faces.size() < b.faces.size();
    }
    return a.margin > b.margin;
}

}  // namespace

const char* to_string(InfeasibilityCertificate::Source s) noexcept
{
    switch (s) {
        case InfeasibilityCertificate::Source::Dual: return "dual";
        case InfeasibilityCertificate::Source::Exhaustive: return "exhaustive";
    }
    return "unknown";
}

double subset_margin(const WeightedCellGraph& g, const CurvatureTarget& targets, std::span<const std::size_t> faces)
{
    check_sizes(g, targets);
    std::vector<char> member(g.num_faces(), 0);
    for (std::size_t f : faces) {
        member.at(f) = 1;
    }
    return margin_from_membership(g, targets, member);
}

SubsetVerdict exhaustive_subset_check(const WeightedCellGraph& g, const CurvatureTarget& targets, unsigned threads)
{
    check_sizes(g, targets);
    const std::size_t F = g.num_faces();
    if (F > kMaxExhaustiveFaces) {
        throw SizeError("exhaustive subset check supports at most " + std::to_string(kMaxExhaustiveFaces) +
                        " faces, graph has " + std::to_string(F));
    }
    std::vector<std::uint32_t> edge_mask(g.num_edges());
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        edge_mask[e] = (1u << g.face_of({e, Orientation::Plus})) | (1u << g.face_of({e, Orientation::Minus}));
    }

    struct Best
    {
        std::uint32_t worst = 0;
        double worst_margin = -std::numeric_limits<double>::infinity();
        std::uint32_t smallest = 0;  // 0: no violation seen
        double smallest_margin = 0.0;
    };

    const std::size_t count = (std::size_t{1} << F) - 1;
    std::vector<Best> best(detail::chunk_count(count, threads));
    detail::parallel_chunks(count, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Best b;
        for (std::size_t i = begin; i < end; ++i) {
            const auto mask = static_cast<std::uint32_t>(i + 1);
            double sum_t = 0.0;
            for (std::size_t f = 0; f < F; ++f) {
                if (mask & (1u << f)) {
                    sum_t += targets.values[f];
                }
            }
            double sum_w = 0.0;
            for (std::size_t e = 0; e < edge_mask.size(); ++e) {
                if (mask & edge_mask[e]) {
                    sum_w += 2.0 * g.edge(e).theta;
                }
            }
            const double margin = sum_t - sum_w;
            if (margin > b.worst_margin) {
                b.worst_margin = margin;
                b.worst = mask;
            }
            if (margin >= 0.0 && (b.smallest == 0 || std::popcount(mask) < std::popcount(b.smallest))) {
                b.smallest = mask;
                b.smallest_margin = margin;
            }
        }
        best[chunk] = b;
    });

    // Chunks cover increasing mask ranges, so strict comparisons keep the
    // smallest mask on ties.
    Best total;
    for (const Best& b : best) {
        if (b.worst_margin > total.worst_margin) {
            total.worst_margin = b.worst_margin;
            total.worst = b.worst;
        }
        if (b.smallest != 0 && (total.smallest == 0 || std::popcount(b.smallest) < std::popcount(total.smallest))) {
            total.smallest = b.smallest;
            total.smallest_margin = b.smallest_margin;
        }
    }

    auto faces_of = [F](std::uint32_t mask) {
        std::vector<std::size_t> out;
        for (std::size_t f = 0; f < F; ++f) {
            if (mask & (1u << f)) {
                out.push_back(f);
            }
        }
        return out;
    };

    SubsetVerdict v;
    v.subsets_checked = count;
    v.worst_margin = total.worst_margin;
    v.worst_subset = faces_of(total.worst);
    v.pass = total.worst_margin < 0.0;
    if (total.smallest != 0) {
        v.smallest_violation = faces_of(total.smallest);
        v.smallest_violation_margin = total.smallest_margin;
    }
    return v;
}

FeasibilityReport find_coherent_system(const WeightedCellGraph& g, const CurvatureTarget& targets,
                                       const FeasibilityOptions& options)
{
    check_sizes(g, targets);
    const std::size_t E = g.num_edges();
    const std::size_t F = g.num_faces();
    const std::size_t n_sides = 2 * E;
    // variables: side values, then s = s_pos - s_neg
    const std::size_t s_pos = n_sides;
    const std::size_t s_neg = n_sides + 1;
    lp::DenseProgram program(n_sides + 2);

    std::vector<double> c(n_sides + 2, 0.0);
    c[s_pos] = 1.0;
    c[s_neg] = -1.0;
    program.set_objective(c);

    for (std::size_t t = 0; t < n_sides; ++t) {
        std::vector<double> row(n_sides + 2, 0.0);
        row[t] = -1.0;
        row[s_pos] = 1.0;
        row[s_neg] = -1.0;
        program.add_row(std::move(row), lp::Sense::LessEqual, 0.0);
    }
    for (std::size_t e = 0; e < E; ++e) {
        std::vector<double> row(n_sides + 2, 0.0);
        row[2 * e] = 1.0;
        row[2 * e + 1] = 1.0;
        row[s_pos] = 1.0;
        row[s_neg] = -1.0;
        program.add_row(std::move(row), lp::Sense::LessEqual, 2.0 * g.edge(e).theta);
    }
    std::vector<std::size_t> face_row(F);
    for (std::size_t f = 0; f < F; ++f) {
        std::vector<double> row(n_sides + 2, 0.0);
        for (const Side& s : g.face(f).boundary) {
            row[side_index(s)] += 1.0;
        }
        face_row[f] = program.add_row(std::move(row), lp::Sense::Equal, targets.values[f]);
    }

    const lp::Solution sol = program.maximize();
    if (sol.status != lp::Status::Optimal) {
        throw Error(std::string("coherent system program did not reach an optimum: ") + lp::to_string(sol.status));
    }

    FeasibilityReport report;
    report.lp_pivots = sol.pivots;
    report.optimal_slack = sol.objective;
    report.feasible = sol.objective > options.slack_tolerance;

    if (report.feasible) {
        CoherentSystem sys;
        sys.values.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n_sides));
        sys.slack = coherent_slack(g, sys.values);
        report.system = std::move(sys);
        return report;
    }

    // Level sets of the face multipliers, from both ends.
    std::vector<double> y(F);
    for (std::size_t f = 0; f < F; ++f) {
        y[f] = sol.duals[face_row[f]];
    }
    std::vector<double> levels = y;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    std::optional<InfeasibilityCertificate> found;
    auto consider = [&](const std::vector<char>& member) {
        InfeasibilityCertificate cert;
        for (std::size_t f = 0; f < F; ++f) {
            if (member[f]) {
                cert.faces.push_back(f);
            }
        }
        if (cert.faces.empty()) {
            return;
        }
        cert.margin = margin_from_membership(g, targets, member);
        cert.source = InfeasibilityCertificate::Source::Dual;
        if (cert.margin >= 0.0 && (!found || better_certificate(cert, *found))) {
            found = std::move(cert);
        }
    };
    std::vector<char> member(F);
    for (double tau : levels) {
        for (std::size_t f = 0; f < F; ++f) {
            member[f] = y[f] >= tau ? 1 : 0;
        }
        consider(member);
        for (std::size_t f = 0; f < F; ++f) {
            member[f] = y[f] <= tau ? 1 : 0;
        }
        consider(member);
    }

    if (found) {
        // Drop faces while the subset keeps violating the condition.
        std::vector<char> keep(F, 0);
        for (std::size_t f : found->faces) {
            keep[f] = 1;
        }
        for (bool shrunk = true; shrunk && found->faces.size() > 1;) {
            shrunk = false;
            for (std::size_t f : found->faces) {
                keep[f] = 0;
                const double m = margin_from_membership(g, targets, keep);
                if (m >= 0.0) {
                    found->faces.erase(std::find(found->faces.begin(), found->faces.end(), f));
                    found->margin = m;
                    shrunk = true;
                    break;
                }
                keep[f] = 1;
            }
        }
    }
    if (!found && F <= kMaxExhaustiveFaces) {
        const SubsetVerdict v = exhaustive_subset_check(g, targets, options.threads);
        if (!v.pass) {
            found = InfeasibilityCertificate{v.smallest_violation, v.smallest_violation_margin,
                                             InfeasibilityCertificate::Source::Exhaustive};
        }
    }
    report.certificate = std::move(found);
    return report;
}

}  // namespace circlepat
