#pragma once

#include "slabcgo/core.hpp"

namespace slabcgo {

namespace detail {

constexpr double euler_gamma = 0.57721566490153286060651209;

/// Ascending series for J0 and the log-companion sum entering Y0/K0:
///   J0(z)  = sum (-1)^m (z^2/4)^m / (m!)^2
///   S(z)   = sum (-1)^{m+1} Hm (z^2/4)^m / (m!)^2,  Hm = 1 + 1/2 + ... + 1/m
inline void j0_series(cplx z, cplx& j0, cplx& s) {
    const cplx q = -z * z * 0.25;
    cplx term = 1.0;
    j0 = 1.0;
    s = 0.0;
    double hm = 0.0;
    for (int m = 1; m <= 60; ++m) {
        term *= q / double(m * m);
        hm += 1.0 / m;
        j0 += term;
        s -= term * hm;
        if (std::abs(term) < 1e-18 * (std::abs(j0) + 1.0)) break;
    }
}

/// Hankel asymptotic expansion: H0^1(z) ~ sqrt(2/(pi z)) e^{i(z - pi/4)} sum a_m (i/z)^m
inline cplx h01_asymptotic(cplx z) {
    cplx sum = 1.0, term = 1.0;
    double prev = 1e300;
    for (int m = 1; m <= 24; ++m) {
        const double num = -double(2 * m - 1) * (2 * m - 1);
        term *= cplx(0, 1) * num / (8.0 * m * z);
        if (std::abs(term) > prev) break;  // divergent tail of the asymptotic series
        prev = std::abs(term);
        sum += term;
        if (std::abs(term) < 1e-16) break;
    }
    return std::sqrt(2.0 / (M_PI * z)) * std::exp(cplx(0, 1) * (z - M_PI / 4.0)) * sum;
}

/// K0 via its integral representation K0(y) = int_0^inf exp(-y cosh t) dt,
/// by trapezoid with double-exponential tail decay; machine accurate on the
/// whole interval of interest and free of the series/asymptotic cancellation.
inline double k0_real(double y) {
    const double h = 0.08;
    const double T = (y < 50.0) ? std::acosh(1.0 + 50.0 / y) : 3.5;
    const int n = int(T / h) + 2;
    double s = 0.5 * std::exp(-y);  // t = 0 term, half weight
    for (int i = 1; i <= n; ++i) s += std::exp(-y * std::cosh(i * h));
    return s * h;
}

}  // namespace detail

/// Hankel function of the first kind, order zero, for arguments in the closed
/// first quadrant (positive-real or positive-imaginary k_m r). Ascending series
/// below |z| = 11, Hankel asymptotic expansion beyond (the split point where
/// both branches agree to 1e-10); pure-imaginary arguments are routed through
/// K0 to avoid cancellation.
inline cplx hankel_h01(cplx z) {
    if (z == 0.0) throw std::domain_error("H0^1 has a logarithmic singularity at 0");
    if (std::abs(z.real()) < 1e-14 * std::abs(z)) {
        // H0^1(i y) = (2/(i pi)) K0(y)
        const double y = z.imag();
        if (y <= 0) throw std::domain_error("hankel_h01 expects arg(z) in [0, pi/2]");
        return cplx(0, -2.0 / M_PI) * detail::k0_real(y);
    }
    if (std::abs(z) <= 11.0) {
        cplx j0, s;
        detail::j0_series(z, j0, s);
        cplx y0 = (2.0 / M_PI) * ((std::log(z / 2.0) + detail::euler_gamma) * j0 + s);
        return j0 + cplx(0, 1) * y0;
    }
    return detail::h01_asymptotic(z);
}

}  // namespace slabcgo
