#pragma once

// Test-only reference for bigon totals, independent of the library's
// cotangent-formula route: the centre distance r3 comes from the cosine
// law at the corner v, and the half sector angle at o_i from the cosine law
// for sides of the same triangle (o1, v, o2). Templated on the scalar so
// finite differences can be taken in 50-digit arithmetic.

#include <array>
#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace circlepat::oracle
{

using Real50 = boost::multiprecision::cpp_bin_float_50;

template <class Real>
struct ReferenceTotals
{
    Real T1;
    Real T2;
    Real alpha_half1;
    Real alpha_half2;
    Real r3;
};

template <class Real>
ReferenceTotals<Real> reference_totals(const Real& theta, const Real& K1, const Real& K2)
{
    using std::acos;
    using std::atan;
    using std::cos;
    using std::exp;
    using std::sin;
    const Real r1 = atan(exp(-K1));
    const Real r2 = atan(exp(-K2));
    const Real pi = acos(Real(-1));
    // side o1o2 is opposite the angle pi - theta at v
    const Real cos_r3 = cos(r1) * cos(r2) + sin(r1) * sin(r2) * cos(pi - theta);
    const Real r3 = acos(cos_r3);
    // angle at o1 is opposite the side o2v = r2
    const Real a1 = acos((cos(r2) - cos(r1) * cos(r3)) / (sin(r1) * sin(r3)));
    const Real a2 = acos((cos(r1) - cos(r2) * cos(r3)) / (sin(r2) * sin(r3)));
    return {2 * a1 * cos(r1), 2 * a2 * cos(r2), a1, a2, r3};
}

/// Central differences of the reference totals in 50-digit arithmetic.
/// Returns {dT1/dK1, dT1/dK2, dT2/dK1, dT2/dK2}.
inline std::array<double, 4> reference_jacobian_fd(double theta, double K1, double K2,
                                                   double step = 1e-5)
{
    const Real50 th(theta);
    const Real50 a(K1);
    const Real50 b(K2);
    const Real50 h(step);
    const auto p1 = reference_totals<Real50>(th, a + h, b);
    const auto m1 = reference_totals<Real50>(th, a - h, b);
    const auto p2 = reference_totals<Real50>(th, a, b + h);
    const auto m2 = reference_totals<Real50>(th, a, b - h);
    const Real50 two_h = 2 * h;
    return {static_cast<double>((p1.T1 - m1.T1) / two_h), static_cast<double>((p2.T1 - m2.T1) / two_h),
            static_cast<double>((p1.T2 - m1.T2) / two_h), static_cast<double>((p2.T2 - m2.T2) / two_h)};
}

}  // namespace circlepat::oracle
