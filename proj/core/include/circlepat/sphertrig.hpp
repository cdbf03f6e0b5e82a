#pragma once

// Trigonometry of a single spherical bigon.
//
// A bigon of angle theta is the intersection of two round disks D1, D2 of
// radii r1, r2 < pi/2 on the unit sphere. It is parametrised by the log
// geodesic curvatures K_i = log cot r_i of its two sides, which range over
// all of R^2. Everything else (sector half-angles, side lengths, total
// curvatures, area) is derived from (theta, K1, K2).

#include <numbers>

namespace circlepat
{

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// One spherical bigon with all of its derived quantities.
///
/// `alpha_half_i` is half of the angle at the centre of D_i subtended by
/// side i, i.e. the angle at o_i of the triangle (o1, v, o2) formed by the
/// two centres and a corner v of the bigon.
struct BigonShape
{
    double theta = 0.0;
    double theta_prime = 0.0;  // pi - theta, the triangle angle at v
    double K1 = 0.0;
    double K2 = 0.0;
    double k1 = 0.0;
    double k2 = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double r3 = 0.0;  // distance between the two disk centres
    double alpha_half1 = 0.0;
    double alpha_half2 = 0.0;
    double ell1 = 0.0;
    double ell2 = 0.0;
    double T1 = 0.0;
    double T2 = 0.0;
    double area = 0.0;
};

/// d(T1, T2) / d(K1, K2). Symmetric and positive definite.
struct BigonJacobian
{
    double dT1_dK1 = 0.0;
    double dT1_dK2 = 0.0;
    double dT2_dK1 = 0.0;
    double dT2_dK2 = 0.0;

    [[nodiscard]] double min_eigenvalue() const noexcept;
    [[nodiscard]] double max_eigenvalue() const noexcept;
};

/// Throws DomainError unless theta is a finite angle in (0, pi/2].
void check_bigon_angle(double theta);

/// The unique bigon of angle theta with log curvatures (K1, K2).
BigonShape bigon_from_K(double theta, double K1, double K2);

/// Closed-form Jacobian of the total curvatures at `b`.
BigonJacobian bigon_jacobian(const BigonShape& b);

/// Primitive of T1 dK1 + T2 dK2 based at the origin, evaluated along the
/// straight segment from (0, 0) to (K1, K2) by composite 16-point
/// Gauss-Legendre quadrature refined by panel bisection until two
/// successive estimates agree to 1e-10.
double primitive_value(double theta, double K1, double K2);

struct TotalsInversionOptions
{
    double tolerance = 1e-12;   // sup-norm of T(K) - T_target
    int max_iterations = 200;
};

/// Inverse of (K1, K2) -> (T1, T2): the unique bigon of angle theta whose
/// sides have total geodesic curvatures (T1, T2). The pair must lie in the
/// open triangle T1, T2 > 0, T1 + T2 < 2 theta.
BigonShape bigon_from_totals(double theta, double T1, double T2,
                             const TotalsInversionOptions& options = {});

}  // namespace circlepat
