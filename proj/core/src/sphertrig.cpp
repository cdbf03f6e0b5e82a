#include "circlepat/sphertrig.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <boost/math/quadrature/gauss.hpp>

#include "circlepat/error.hpp"

namespace circlepat
{
namespace
{

// Trigonometry of r = arctan(exp(-K)) kept in log form so that products
// like k_j * sin r_i stay finite for |K| far beyond the range of exp().
struct RadiusTrig
{
    double r;
    double sin;
    double cos;
    double log_sin;
    double log_cos;
};

RadiusTrig radius_trig(double K)
{
    const double t = std::exp(-std::abs(K));
    const double half_log = 0.5 * std::log1p(t * t);
    RadiusTrig out{};
    if (K >= 0.0) {
        out.r = std::atan(t);
        out.log_sin = -K - half_log;
        out.log_cos = -half_log;
    } else {
        out.r = kHalfPi - std::atan(t);
        out.log_sin = -half_log;
        out.log_cos = K - half_log;
    }
    out.sin = std::exp(out.log_sin);
    out.cos = std::exp(out.log_cos);
    return out;
}

void check_finite(double value, const char* name)
{
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << name << " must be finite, got " << value;
        throw DomainError(msg.str());
    }
}

// Half sector angle at o_i from the cotangent four-part formula in the
// triangle (o_i, v, o_j):  cot a'_i = (k_j sin r_i + cos r_i cos theta) / sin theta.
double half_sector_angle(const RadiusTrig& own, double K_other, double sin_theta,
                         double cos_theta)
{
    const double kj_sin_ri = std::exp(K_other + own.log_sin);
    return std::atan2(sin_theta, kj_sin_ri + own.cos * cos_theta);
}

double log_add_exp(double x, double y)
{
    if (x < y) {
        std::swap(x, y);
    }
    if (x == -std::numeric_limits<double>::infinity()) {
        return x;
    }
    return x + std::log1p(std::exp(y - x));
}

// log(sin^2 a'_i / sin theta), from sin a'_i = sin theta / hypot(sin theta, D)
// with D = k_j sin r_i + cos r_i cos theta kept in log form.
double log_sq_over_sin(const RadiusTrig& own, double K_other, double log_sin_theta, double log_cos_theta)
{
    const double log_D = log_add_exp(K_other + own.log_sin, own.log_cos + log_cos_theta);
    return log_sin_theta - log_add_exp(2.0 * log_sin_theta, 2.0 * log_D);
}

double sup_norm(const std::array<double, 2>& v)
{
    return std::max(std::abs(v[0]), std::abs(v[1]));
}

}  // namespace

double BigonJacobian::min_eigenvalue() const noexcept
{
    const double mean = 0.5 * (dT1_dK1 + dT2_dK2);
    const double off = 0.5 * (dT1_dK2 + dT2_dK1);
    const double half_gap = 0.5 * (dT1_dK1 - dT2_dK2);
    const double radius = std::hypot(half_gap, off);
    // mean - radius cancels badly when the matrix is nearly singular; use
    // det / lambda_max instead.
    const double lambda_max = mean + radius;
    const double det = dT1_dK1 * dT2_dK2 - off * off;
    return lambda_max > 0.0 ? det / lambda_max : mean - radius;
}

double BigonJacobian::max_eigenvalue() const noexcept
{
    const double mean = 0.5 * (dT1_dK1 + dT2_dK2);
    const double off = 0.5 * (dT1_dK2 + dT2_dK1);
    return mean + std::hypot(0.5 * (dT1_dK1 - dT2_dK2), off);
}

void check_bigon_angle(double theta)
{
    if (!std::isfinite(theta) || theta <= 0.0 || theta > kHalfPi) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "bigon angle must lie in (0, pi/2], got " << theta;
        throw DomainError(msg.str());
    }
}

BigonShape bigon_from_K(double theta, double K1, double K2)
{
    check_bigon_angle(theta);
    check_finite(K1, "K1");
    check_finite(K2, "K2");

    const RadiusTrig a = radius_trig(K1);
    const RadiusTrig b = radius_trig(K2);
    const double sin_theta = std::sin(theta);
    const double cos_theta = std::cos(theta);

    BigonShape s;
    s.theta = theta;
    s.theta_prime = kPi - theta;
    s.K1 = K1;
    s.K2 = K2;
    s.k1 = std::exp(K1);
    s.k2 = std::exp(K2);
    s.r1 = a.r;
    s.r2 = b.r;

    s.alpha_half1 = half_sector_angle(a, K2, sin_theta, cos_theta);
    s.alpha_half2 = half_sector_angle(b, K1, sin_theta, cos_theta);

    s.ell1 = 2.0 * s.alpha_half1 * a.sin;
    s.ell2 = 2.0 * s.alpha_half2 * b.sin;
    s.T1 = 2.0 * s.alpha_half1 * a.cos;
    s.T2 = 2.0 * s.alpha_half2 * b.cos;
    s.area = 2.0 * theta - (s.T1 + s.T2);

    // Cosine law for the side o1o2 opposite the angle pi - theta, in
    // half-angle form (accurate for small disks):
    // sin^2(r3/2) = sin^2((r1 - r2)/2) + sin r1 sin r2 cos^2(theta/2).
    const double half_diff = std::sin(0.5 * (a.r - b.r));
    const double half_theta = std::cos(0.5 * theta);
    const double h = half_diff * half_diff + a.sin * b.sin * half_theta * half_theta;
    s.r3 = 2.0 * std::asin(std::min(1.0, std::sqrt(h)));
    return s;
}

BigonJacobian bigon_jacobian(const BigonShape& b)
{
    check_bigon_angle(b.theta);
    const RadiusTrig one = radius_trig(b.K1);
    const RadiusTrig two = radius_trig(b.K2);
    const double cos_theta = std::cos(b.theta);
    const double log_sin_theta = std::log(std::sin(b.theta));
    const double log_cos_theta = std::log(cos_theta);  // -inf at a right angle
    const double L1 = log_sq_over_sin(one, b.K2, log_sin_theta, log_cos_theta);
    const double L2 = log_sq_over_sin(two, b.K1, log_sin_theta, log_cos_theta);

    // Off-diagonals: dT_i/dK_j = k_i k_j dl_i/dk_j with
    // dl_i/dk_j = -2 sin^2 r_i sin^2 a'_i / sin theta'.
    BigonJacobian j;
    j.dT1_dK2 = -2.0 * std::exp(b.K2 + one.log_sin + one.log_cos + L1);
    j.dT2_dK1 = -2.0 * std::exp(b.K1 + two.log_sin + two.log_cos + L2);

    // Diagonals: differentiate T_i = 2 a'_i cos r_i in r_i through the
    // cotangent formula, then chain with dr_i/dK_i = -sin r_i cos r_i.
    auto diagonal = [&](const RadiusTrig& own, double K_other, double alpha_half, double L) {
        const double coupling = std::exp(L + K_other + own.log_sin + 3.0 * own.log_cos)
                                - std::exp(L + 2.0 * own.log_sin + 2.0 * own.log_cos) * cos_theta;
        return 2.0 * coupling + 2.0 * alpha_half * std::exp(2.0 * own.log_sin + own.log_cos);
    };
    j.dT1_dK1 = diagonal(one, b.K2, b.alpha_half1, L1);
    j.dT2_dK2 = diagonal(two, b.K1, b.alpha_half2, L2);
    return j;
}

double primitive_value(double theta, double K1, double K2)
{
    check_bigon_angle(theta);
    check_finite(K1, "K1");
    check_finite(K2, "K2");
    if (K1 == 0.0 && K2 == 0.0) {
        return 0.0;
    }

    auto integrand = [&](double t) {
        const BigonShape s = bigon_from_K(theta, t * K1, t * K2);
        return s.T1 * K1 + s.T2 * K2;
    };
    using Rule = boost::math::quadrature::gauss<double, 16>;

    constexpr int kMaxDepth = 16;
    constexpr double kTolerance = 1e-10;
    double previous = Rule::integrate(integrand, 0.0, 1.0);
    for (int depth = 1; depth <= kMaxDepth; ++depth) {
        const long panels = 1L << depth;
        const double width = 1.0 / static_cast<double>(panels);
        double estimate = 0.0;
        for (long p = 0; p < panels; ++p) {
            const double lo = static_cast<double>(p) * width;
            estimate += Rule::integrate(integrand, lo, lo + width);
        }
        if (std::abs(estimate - previous) < kTolerance) {
            return estimate;
        }
        previous = estimate;
    }
    throw ConvergenceError("primitive_value: quadrature did not converge");
}

BigonShape bigon_from_totals(double theta, double T1, double T2,
                             const TotalsInversionOptions& options)
{
    check_bigon_angle(theta);
    check_finite(T1, "T1");
    check_finite(T2, "T2");
    if (!(T1 > 0.0 && T2 > 0.0 && T1 + T2 < 2.0 * theta)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "totals (" << T1 << ", " << T2 << ") outside the admissible triangle "
            << "T1, T2 > 0, T1 + T2 < 2*theta = " << 2.0 * theta;
        throw DomainError(msg.str());
    }

    constexpr double kArmijo = 1e-4;
    constexpr double kMinStep = 0x1p-30;

    double K1 = 0.0;
    double K2 = 0.0;
    BigonShape shape = bigon_from_K(theta, K1, K2);
    std::array<double, 2> residual{shape.T1 - T1, shape.T2 - T2};

    for (int it = 0; it < options.max_iterations; ++it) {
        const double res = sup_norm(residual);
        if (res <= options.tolerance) {
            break;
        }
        const BigonJacobian j = bigon_jacobian(shape);
        const double det = j.dT1_dK1 * j.dT2_dK2 - j.dT1_dK2 * j.dT2_dK1;
        const double d1 = -(j.dT2_dK2 * residual[0] - j.dT1_dK2 * residual[1]) / det;
        const double d2 = -(-j.dT2_dK1 * residual[0] + j.dT1_dK1 * residual[1]) / det;

        // (T - T_target) is the gradient of the strictly convex, proper
        // potential Omega_theta(K) - T_target . K. Along the Newton ray its
        // directional derivative is increasing, so slope(t) <= c slope(0)
        // certifies an Armijo decrease of the potential without evaluating it.
        const double slope0 = residual[0] * d1 + residual[1] * d2;
        bool accepted = false;
        for (double step = 1.0; step >= kMinStep; step *= 0.5) {
            const double n1 = K1 + step * d1;
            const double n2 = K2 + step * d2;
            if (!std::isfinite(n1) || !std::isfinite(n2)) {
                continue;
            }
            const BigonShape trial = bigon_from_K(theta, n1, n2);
            const std::array<double, 2> r{trial.T1 - T1, trial.T2 - T2};
            const double slope = r[0] * d1 + r[1] * d2;
            if (slope <= kArmijo * slope0) {
                K1 = n1;
                K2 = n2;
                shape = trial;
                residual = r;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            break;
        }
    }
    if (sup_norm(residual) <= options.tolerance) {
        // A couple of plain Newton steps drive the residual down to rounding
        // level, which is what limits the accuracy of K when the map is
        // badly conditioned.
        for (int polish = 0; polish < 3; ++polish) {
            const BigonJacobian j = bigon_jacobian(shape);
            const double det = j.dT1_dK1 * j.dT2_dK2 - j.dT1_dK2 * j.dT2_dK1;
            const double n1 = K1 - (j.dT2_dK2 * residual[0] - j.dT1_dK2 * residual[1]) / det;
            const double n2 = K2 - (-j.dT2_dK1 * residual[0] + j.dT1_dK1 * residual[1]) / det;
            if (!std::isfinite(n1) || !std::isfinite(n2)) {
                break;
            }
            const BigonShape trial = bigon_from_K(theta, n1, n2);
            const std::array<double, 2> r{trial.T1 - T1, trial.T2 - T2};
            if (!(sup_norm(r) < sup_norm(residual))) {
                break;
            }
            K1 = n1;
            K2 = n2;
            shape = trial;
            residual = r;
        }
        return shape;
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "bigon_from_totals: no convergence for theta=" << theta << " T=(" << T1 << ", " << T2
        << "), residual " << sup_norm(residual);
    throw ConvergenceError(msg.str());
}

}  // namespace circlepat
