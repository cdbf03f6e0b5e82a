#include <gtest/gtest.h>

#include <random>

#include "circlepat/error.hpp"
#include "circlepat/feasibility.hpp"
#include "circlepat/generators.hpp"

using namespace circlepat;

namespace
{

// Targets from a random split of rho * 2 theta_e over the two sides of
// every edge: always feasible for rho < 1, often infeasible above.
CurvatureTarget random_targets(const WeightedCellGraph& g, std::mt19937_64& rng, double rho_lo, double rho_hi)
{
    std::uniform_real_distribution<double> rho(rho_lo, rho_hi);
    std::uniform_real_distribution<double> split(0.05, 0.95);
    std::vector<double> T(g.num_faces(), 0.0);
    const double r = rho(rng);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        const double w = 2 * g.edge(e).theta * r;
        const double s = split(rng);
        T[g.face_of({e, Orientation::Plus})] += s * w;
        T[g.face_of({e, Orientation::Minus})] += (1 - s) * w;
    }
    return make_target(g, T);
}

void expect_coherent(const WeightedCellGraph& g, const CurvatureTarget& t, const CoherentSystem& sys)
{
    ASSERT_EQ(sys.values.size(), 2 * g.num_edges());
    EXPECT_GT(sys.slack, 0.0);
    for (double v : sys.values) {
        EXPECT_GE(v, sys.slack);
    }
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        EXPECT_LE(sys.values[2 * e] + sys.values[2 * e + 1], 2 * g.edge(e).theta - sys.slack);
    }
    for (std::size_t f = 0; f < g.num_faces(); ++f) {
        double sum = 0.0;
        for (const Side& s : g.face(f).boundary) {
            sum += sys.values[side_index(s)];
        }
        EXPECT_NEAR(sum, t.values[f], 1e-12);
    }
}

}  // namespace

TEST(Feasibility, LoopFace)
{
    const auto g = generators::loop_face();
    const auto ok = make_target(g, {1.0});
    const FeasibilityReport r = find_coherent_system(g, ok);
    ASSERT_TRUE(r.feasible);
    expect_coherent(g, ok, *r.system);

    const auto bad = make_target(g, {kPi});
    const FeasibilityReport r2 = find_coherent_system(g, bad);
    EXPECT_FALSE(r2.feasible);
    EXPECT_LE(r2.optimal_slack, 1e-12);
    ASSERT_TRUE(r2.certificate.has_value());
    EXPECT_EQ(r2.certificate->faces, (std::vector<std::size_t>{0}));
    EXPECT_GE(r2.certificate->margin, 0.0);
}

TEST(Feasibility, DigonSymmetricTargets)
{
    const auto g = generators::digon_sphere();
    const auto t = make_target(g, {1.0, 1.0});
    const FeasibilityReport r = find_coherent_system(g, t);
    ASSERT_TRUE(r.feasible);
    // T(t) >= s with face sums 1 over two sides caps s at 1/2
    EXPECT_NEAR(r.optimal_slack, 0.5, 1e-12);
    expect_coherent(g, t, *r.system);
    EXPECT_NEAR(r.system->slack, 0.5, 1e-12);
    for (double v : r.system->values) {
        EXPECT_NEAR(v, 0.5, 1e-12);
    }

    const SubsetVerdict v = exhaustive_subset_check(g, t);
    EXPECT_TRUE(v.pass);
    EXPECT_EQ(v.subsets_checked, 3u);
    EXPECT_EQ(v.worst_subset, (std::vector<std::size_t>{0, 1}));
    EXPECT_NEAR(v.worst_margin, 2.0 - 2 * kPi, 1e-14);
    EXPECT_TRUE(v.smallest_violation.empty());
}

TEST(Feasibility, DigonEqualityIsAViolation)
{
    const auto g = generators::digon_sphere();
    const auto t = make_target(g, {2 * kPi, 0.1});
    const SubsetVerdict v = exhaustive_subset_check(g, t);
    EXPECT_FALSE(v.pass);
    EXPECT_EQ(v.smallest_violation, (std::vector<std::size_t>{0}));
    EXPECT_EQ(v.smallest_violation_margin, 0.0);
    EXPECT_EQ(v.worst_subset, (std::vector<std::size_t>{0, 1}));
    EXPECT_NEAR(v.worst_margin, 0.1, 1e-14);

    const FeasibilityReport r = find_coherent_system(g, t);
    EXPECT_FALSE(r.feasible);
    ASSERT_TRUE(r.certificate.has_value());
    EXPECT_EQ(r.certificate->faces, (std::vector<std::size_t>{0}));
}

TEST(Feasibility, SingleFaceReducesToItsEdges)
{
    const auto g = generators::one_vertex_torus(0.5, 0.7);
    const double bound = 2 * 0.5 + 2 * 0.7;
    EXPECT_TRUE(exhaustive_subset_check(g, make_target(g, {bound - 1e-9})).pass);
    EXPECT_FALSE(exhaustive_subset_check(g, make_target(g, {bound})).pass);
    EXPECT_TRUE(find_coherent_system(g, make_target(g, {bound - 1e-6})).feasible);
    EXPECT_FALSE(find_coherent_system(g, make_target(g, {bound + 1e-6})).feasible);
}

TEST(Feasibility, SubsetMarginCountsEdgesOnce)
{
    const auto g = generators::loop_face(1.0);
    const auto t = make_target(g, {0.5});
    const std::vector<std::size_t> all{0};
    EXPECT_DOUBLE_EQ(subset_margin(g, t, all), 0.5 - 2.0);
}

TEST(Feasibility, AgreesWithExhaustiveCheck)
{
    std::mt19937_64 rng(21);
    int feasible = 0;
    int infeasible = 0;
    for (int i = 0; i < 300; ++i) {
        generators::RandomGluingOptions opts;
        opts.num_faces = 1 + static_cast<std::size_t>(i % 8);
        const auto g = generators::random_polygon_gluing(rng, opts);
        const auto t = random_targets(g, rng, 0.4, 1.3);
        const FeasibilityReport r = find_coherent_system(g, t);
        const SubsetVerdict v = exhaustive_subset_check(g, t);
        ASSERT_EQ(r.feasible, v.pass) << serialize_graph(g, &t);
        if (r.feasible) {
            ++feasible;
            expect_coherent(g, t, *r.system);
        } else {
            ++infeasible;
            ASSERT_TRUE(r.certificate.has_value());
            const auto& faces = r.certificate->faces;
            EXPECT_GE(subset_margin(g, t, faces), 0.0);
            EXPECT_GE(faces.size(), v.smallest_violation.size());
            for (std::size_t drop = 0; faces.size() > 1 && drop < faces.size(); ++drop) {
                std::vector<std::size_t> rest = faces;
                rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(drop));
                EXPECT_LT(subset_margin(g, t, rest), 0.0);
            }
        }
    }
    EXPECT_GT(feasible, 50);
    EXPECT_GT(infeasible, 50);
}

TEST(Feasibility, ScalingDownPreservesFeasibility)
{
    std::mt19937_64 rng(22);
    for (int i = 0; i < 40; ++i) {
        generators::RandomGluingOptions opts;
        opts.num_faces = 2 + static_cast<std::size_t>(i % 6);
        const auto g = generators::random_polygon_gluing(rng, opts);
        const auto t = random_targets(g, rng, 0.3, 0.99);
        ASSERT_TRUE(find_coherent_system(g, t).feasible);
        for (double c : {0.9, 0.5, 0.01}) {
            std::vector<double> scaled = t.values;
            for (auto& x : scaled) {
                x *= c;
            }
            EXPECT_TRUE(find_coherent_system(g, make_target(g, scaled)).feasible);
        }
    }
}

TEST(Feasibility, ExhaustiveIndependentOfThreadCount)
{
    std::mt19937_64 rng(23);
    generators::RandomGluingOptions opts;
    opts.num_faces = 12;
    const auto g = generators::random_polygon_gluing(rng, opts);
    const auto t = random_targets(g, rng, 1.05, 1.2);
    const SubsetVerdict one = exhaustive_subset_check(g, t, 1);
    for (unsigned threads : {2u, 3u, 8u}) {
        const SubsetVerdict many = exhaustive_subset_check(g, t, threads);
        EXPECT_EQ(many.pass, one.pass);
        EXPECT_EQ(many.worst_subset, one.worst_subset);
        EXPECT_EQ(many.worst_margin, one.worst_margin);
        EXPECT_EQ(many.smallest_violation, one.smallest_violation);
    }
}

TEST(Feasibility, SizeLimit)
{
    std::mt19937_64 rng(24);
    generators::RandomGluingOptions opts;
    opts.num_faces = 21;
    opts.max_face_degree = 3;
    const auto g = generators::random_polygon_gluing(rng, opts);
    std::vector<double> t(g.num_faces(), 0.01);
    EXPECT_THROW(exhaustive_subset_check(g, make_target(g, t)), SizeError);
    EXPECT_TRUE(find_coherent_system(g, make_target(g, t)).feasible);
}

TEST(Feasibility, LargeInfeasibleUsesDualCertificate)
{
    std::mt19937_64 rng(25);
    generators::RandomGluingOptions opts;
    opts.num_faces = 24;
    const auto g = generators::random_polygon_gluing(rng, opts);
    std::vector<double> t(g.num_faces(), 0.01);
    t[3] = 2 * kPi * static_cast<double>(g.num_edges());
    const auto target = make_target(g, t);
    const FeasibilityReport r = find_coherent_system(g, target);
    EXPECT_FALSE(r.feasible);
    ASSERT_TRUE(r.certificate.has_value());
    EXPECT_EQ(r.certificate->source, InfeasibilityCertificate::Source::Dual);
    EXPECT_EQ(r.certificate->faces, (std::vector<std::size_t>{3}));
    EXPECT_GE(subset_margin(g, target, r.certificate->faces), 0.0);
}
