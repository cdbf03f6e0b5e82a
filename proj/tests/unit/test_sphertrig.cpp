#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "circlepat/error.hpp"
#include "circlepat/sphertrig.hpp"
#include "oracles/bigon_reference.hpp"

using namespace circlepat;

namespace
{

struct Sample
{
    double theta;
    double K1;
    double K2;
};

std::vector<Sample> random_samples(std::size_t n, double K_range, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> th(0.0, kHalfPi);
    std::uniform_real_distribution<double> k(-K_range, K_range);
    std::vector<Sample> out;
    for (std::size_t i = 0; i < n; ++i) {
        double t = th(rng);
        if (t == 0.0) {
            t = kHalfPi;
        }
        out.push_back({t, k(rng), k(rng)});
    }
    return out;
}

double rel_err(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace

TEST(Sphertrig, RightAngleUnitBigon)
{
    // two quarter-circle disks meeting at right angles: the triangle
    // (o1, v, o2) has legs pi/4 and a right angle at v
    const BigonShape b = bigon_from_K(kHalfPi, 0.0, 0.0);
    const double half = std::atan(std::sqrt(2.0));
    EXPECT_NEAR(b.r1, kPi / 4, 1e-15);
    EXPECT_NEAR(b.r3, kPi / 3, 1e-14);
    EXPECT_NEAR(b.alpha_half1, half, 1e-15);
    EXPECT_NEAR(b.alpha_half2, half, 1e-15);
    EXPECT_NEAR(b.T1, std::sqrt(2.0) * half, 1e-15);
    EXPECT_NEAR(b.T1, 1.3510217177120805, 1e-14);
    EXPECT_NEAR(b.area, kPi - 2 * std::sqrt(2.0) * half, 1e-14);
    EXPECT_NEAR(b.area, 0.4395492181656331, 1e-14);
    EXPECT_NEAR(b.ell1, 2 * half * std::sin(kPi / 4), 1e-15);
    EXPECT_DOUBLE_EQ(b.theta_prime, kPi - kHalfPi);
}

TEST(Sphertrig, AgreesWithIndependentCosineLawRoute)
{
    for (const Sample& s : random_samples(400, 8.0, 11)) {
        const BigonShape b = bigon_from_K(s.theta, s.K1, s.K2);
        const auto ref = oracle::reference_totals<oracle::Real50>(s.theta, s.K1, s.K2);
        EXPECT_NEAR(b.T1, static_cast<double>(ref.T1), 1e-11) << s.theta << " " << s.K1 << " " << s.K2;
        EXPECT_NEAR(b.T2, static_cast<double>(ref.T2), 1e-11);
        EXPECT_NEAR(b.alpha_half1, static_cast<double>(ref.alpha_half1), 1e-11);
        EXPECT_NEAR(b.alpha_half2, static_cast<double>(ref.alpha_half2), 1e-11);
        EXPECT_NEAR(b.r3, static_cast<double>(ref.r3), 1e-11);
    }
}

TEST(Sphertrig, TriangleIdentities)
{
    for (const Sample& s : random_samples(2000, 8.0, 12)) {
        const BigonShape b = bigon_from_K(s.theta, s.K1, s.K2);
        // cosine law at v
        const double cos_r3 = std::cos(b.r1) * std::cos(b.r2) - std::sin(b.r1) * std::sin(b.r2) * std::cos(s.theta);
        EXPECT_NEAR(std::cos(b.r3), cos_r3, 1e-12);
        EXPECT_GE(b.r3, std::abs(b.r1 - b.r2) - 1e-12);
        EXPECT_LE(b.r3, b.r1 + b.r2 + 1e-12);
        // sine law
        const double ratio = std::sin(b.theta_prime) / std::sin(b.r3);
        EXPECT_NEAR(std::sin(b.alpha_half1) / std::sin(b.r2), ratio, 1e-10 * std::max(1.0, ratio));
        EXPECT_NEAR(std::sin(b.alpha_half2) / std::sin(b.r1), ratio, 1e-10 * std::max(1.0, ratio));
        EXPECT_NEAR(b.area, 2 * s.theta - b.T1 - b.T2, 1e-15 + 4e-16 * 2 * s.theta);
        EXPECT_GT(b.area, 0.0);
        EXPECT_GT(b.T1, 0.0);
        EXPECT_GT(b.T2, 0.0);
    }
}

TEST(Sphertrig, SwappingCoordinatesSwapsSides)
{
    for (const Sample& s : random_samples(200, 8.0, 13)) {
        const BigonShape a = bigon_from_K(s.theta, s.K1, s.K2);
        const BigonShape b = bigon_from_K(s.theta, s.K2, s.K1);
        EXPECT_DOUBLE_EQ(a.T1, b.T2);
        EXPECT_DOUBLE_EQ(a.alpha_half1, b.alpha_half2);
        EXPECT_DOUBLE_EQ(a.area, b.area);
    }
}

TEST(Sphertrig, ExtremeCoordinatesStayFinite)
{
    for (double K1 : {-1e6, -700.0, -50.0, 0.0, 50.0, 700.0, 1e6}) {
        for (double K2 : {-1e6, -700.0, -50.0, 0.0, 50.0, 700.0, 1e6}) {
            const BigonShape b = bigon_from_K(0.7, K1, K2);
            EXPECT_TRUE(std::isfinite(b.T1) && std::isfinite(b.T2) && std::isfinite(b.area));
            EXPECT_GE(b.T1, 0.0);
            EXPECT_GE(b.T2, 0.0);
            EXPECT_LE(b.T1 + b.T2, 1.4 + 1e-12);
            const BigonJacobian j = bigon_jacobian(b);
            EXPECT_TRUE(std::isfinite(j.dT1_dK1) && std::isfinite(j.dT1_dK2) && std::isfinite(j.dT2_dK2));
        }
    }
}

TEST(Sphertrig, RejectsBadAngles)
{
    for (double t : {0.0, -0.1, kHalfPi + 1e-6, 3.0, std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::infinity()}) {
        EXPECT_THROW(check_bigon_angle(t), DomainError) << t;
        EXPECT_THROW(bigon_from_K(t, 0.0, 0.0), DomainError) << t;
    }
    EXPECT_NO_THROW(check_bigon_angle(kHalfPi));
    EXPECT_THROW(bigon_from_K(1.0, std::numeric_limits<double>::quiet_NaN(), 0.0), DomainError);
}

TEST(Sphertrig, JacobianMatchesHighPrecisionDifferences)
{
    for (const Sample& s : random_samples(200, 8.0, 14)) {
        const BigonJacobian j = bigon_jacobian(bigon_from_K(s.theta, s.K1, s.K2));
        const auto fd = oracle::reference_jacobian_fd(s.theta, s.K1, s.K2);
        EXPECT_LT(rel_err(j.dT1_dK1, fd[0]), 1e-6);
        EXPECT_LT(rel_err(j.dT1_dK2, fd[1]), 1e-6);
        EXPECT_LT(rel_err(j.dT2_dK1, fd[2]), 1e-6);
        EXPECT_LT(rel_err(j.dT2_dK2, fd[3]), 1e-6);
    }
}

TEST(Sphertrig, JacobianSymmetricPositiveDefinite)
{
    for (const Sample& s : random_samples(2000, 8.0, 15)) {
        const BigonJacobian j = bigon_jacobian(bigon_from_K(s.theta, s.K1, s.K2));
        EXPECT_NEAR(j.dT1_dK2, j.dT2_dK1, 1e-12 * std::max(1.0, std::abs(j.dT1_dK2)));
        EXPECT_LT(j.dT1_dK2, 0.0);
        EXPECT_GT(j.min_eigenvalue(), 0.0);
        EXPECT_GE(j.max_eigenvalue(), j.min_eigenvalue());
    }
}

TEST(Sphertrig, PrimitiveIsAPotential)
{
    EXPECT_EQ(primitive_value(1.0, 0.0, 0.0), 0.0);
    EXPECT_NEAR(primitive_value(1.0, 0.7, -0.3), primitive_value(1.0, -0.3, 0.7), 1e-12);

    // independent quadrature along the L-shaped path (0,0) -> (K1,0) -> (K1,K2)
    using boost::math::quadrature::gauss_kronrod;
    for (const Sample& s : random_samples(40, 4.0, 16)) {
        const double leg1 = gauss_kronrod<double, 31>::integrate(
            [&](double x) { return bigon_from_K(s.theta, x, 0.0).T1; }, 0.0, s.K1, 15, 1e-13);
        const double leg2 = gauss_kronrod<double, 31>::integrate(
            [&](double y) { return bigon_from_K(s.theta, s.K1, y).T2; }, 0.0, s.K2, 15, 1e-13);
        EXPECT_NEAR(primitive_value(s.theta, s.K1, s.K2), leg1 + leg2, 1e-8);
    }
}

TEST(Sphertrig, PrimitiveGradientIsTotals)
{
    const double h = 1e-4;
    for (const Sample& s : random_samples(20, 3.0, 17)) {
        const BigonShape b = bigon_from_K(s.theta, s.K1, s.K2);
        const double d1 =
            (primitive_value(s.theta, s.K1 + h, s.K2) - primitive_value(s.theta, s.K1 - h, s.K2)) / (2 * h);
        const double d2 =
            (primitive_value(s.theta, s.K1, s.K2 + h) - primitive_value(s.theta, s.K1, s.K2 - h)) / (2 * h);
        EXPECT_NEAR(d1, b.T1, 1e-6);
        EXPECT_NEAR(d2, b.T2, 1e-6);
    }
}

TEST(Sphertrig, TotalsRoundTrip)
{
    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> th(0.05, kHalfPi);
    std::uniform_real_distribution<double> k(-4.0, 4.0);
    for (int i = 0; i < 500; ++i) {
        const double theta = th(rng);
        const double K1 = k(rng);
        const double K2 = k(rng);
        const BigonShape b = bigon_from_K(theta, K1, K2);
        const BigonShape back = bigon_from_totals(theta, b.T1, b.T2);
        EXPECT_NEAR(back.K1, K1, 1e-9);
        EXPECT_NEAR(back.K2, K2, 1e-9);
    }
}

TEST(Sphertrig, TotalsOutsideTriangleRejected)
{
    EXPECT_THROW(bigon_from_totals(1.0, 1.0, 1.0), DomainError);
    EXPECT_THROW(bigon_from_totals(1.0, 1.5, 0.6), DomainError);
    EXPECT_THROW(bigon_from_totals(1.0, 0.0, 0.5), DomainError);
    EXPECT_THROW(bigon_from_totals(1.0, -0.1, 0.5), DomainError);
    EXPECT_NO_THROW(bigon_from_totals(1.0, 0.999, 0.999));
}
