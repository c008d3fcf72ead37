#pragma once

#include "slabcgo/algebra.hpp"

namespace slabcgo {

enum class Scenario { same_plane, opposite_plane };

/// Orthonormal vectors attached to xi: eta1, eta2 (both orthogonal to xi and
/// to each other) and the f-frame (f1, f2, f3) with f3 = e3.
struct Frame {
    Vec3 eta1, eta2;
    Vec3 f1, f2, f3;
};

inline Frame build_frame(const Vec3& xi) {
    const double xp = std::hypot(xi.x, xi.y);
    if (xp <= 0) throw std::invalid_argument("build_frame requires |xi'| > 0");
    const double xn = norm(xi);
    Frame fr;
    fr.eta1 = Vec3{xi.y, -xi.x, 0} / xp;
    fr.eta2 = Vec3{-xi.x * xi.z, -xi.y * xi.z, xp * xp} / (xp * xn);
    fr.f2 = Vec3{xi.x, xi.y, 0} / xp;
    fr.f3 = Vec3{0, 0, 1};
    fr.f1 = cross(fr.f2, fr.f3);
    return fr;
}

/// Complex phase vectors zeta1, zeta2 with zeta.zeta = k^2 and
/// i zeta1 + conj(i zeta2) = i xi, for either data scenario.
struct PhasePair {
    Vec3 xi;
    Frame frame;
    double tau = 1;
    double k = 1;
    Scenario scenario = Scenario::same_plane;
    CVec3 zeta1, zeta2;
    CVec3 zeta_hat;    // eta2 + i eta1   (same-plane limit of zeta1/tau)
    CVec3 zeta_check;  // conj(zeta_hat)
    CVec3 zeta_tilde;  // eta1 - i eta2   (opposite-plane limit)

    Vec3 xi_dot() const { return {xi.x, xi.y, -xi.z}; }
    const CVec3& limit() const { return scenario == Scenario::same_plane ? zeta_hat : zeta_tilde; }
};

inline PhasePair build_phase(const Vec3& xi, double tau, double k, Scenario scen) {
    PhasePair pp;
    pp.xi = xi;
    pp.frame = build_frame(xi);
    pp.tau = tau;
    pp.k = k;
    pp.scenario = scen;
    const Vec3 n1 = pp.frame.eta1, n2 = pp.frame.eta2;
    const double x2 = dot(xi, xi);
    if (scen == Scenario::same_plane) {
        const double sa = std::sqrt(tau * tau + x2 / 4);
        const double sb = std::sqrt(tau * tau + k * k);
        pp.zeta1 = CVec3(xi * 0.5) + CVec3(n1) * cplx(0, sa) + CVec3(n2) * sb;
        pp.zeta2 = CVec3(-(xi * 0.5)) + CVec3(n1) * cplx(0, -sa) + CVec3(n2) * sb;
    } else {
        if (tau <= std::max(k, std::sqrt(x2) / 2))
            throw std::invalid_argument("opposite-plane phase needs tau > max(k, |xi|/2)");
        const double sa = std::sqrt(tau * tau - x2 / 4);
        const double sb = std::sqrt(tau * tau - k * k);
        pp.zeta1 = CVec3(xi * 0.5) + CVec3(n1) * sa + CVec3(n2) * cplx(0, -sb);
        pp.zeta2 = CVec3(-(xi * 0.5)) + CVec3(n1) * sa + CVec3(n2) * cplx(0, sb);
    }
    pp.zeta_hat = CVec3(n2) + CVec3(n1) * cplx(0, 1);
    pp.zeta_check = conj(pp.zeta_hat);
    pp.zeta_tilde = CVec3(n1) - CVec3(n2) * cplx(0, 1);
    return pp;
}

/// Residuals of the PhasePair contract, normalized as documented: the
/// quadratic identity is measured relative to |zeta|^2 (the magnitudes
/// entering the cancellation), the linear one absolutely.
struct PhaseInvariants {
    double zeta1_quad, zeta2_quad;  // |zeta.zeta - k^2| / |zeta|^2
    double sum_err;                 // max component |i z1 + conj(i z2) - i xi|
    double limit_gap;               // || zeta1/tau - limit ||
};

inline PhaseInvariants check_phase_invariants(const PhasePair& pp) {
    PhaseInvariants r;
    auto quad = [&](const CVec3& z) {
        return std::abs(dot(z, z) - cplx(pp.k * pp.k)) / (norm(z) * norm(z));
    };
    r.zeta1_quad = quad(pp.zeta1);
    r.zeta2_quad = quad(pp.zeta2);
    CVec3 s = pp.zeta1 * cplx(0, 1) + conj(pp.zeta2 * cplx(0, 1)) - CVec3(pp.xi) * cplx(0, 1);
    r.sum_err = std::max({std::abs(s.x), std::abs(s.y), std::abs(s.z)});
    r.limit_gap = norm(pp.zeta1 * cplx(1.0 / pp.tau) - pp.limit());
    return r;
}

/// Polarization choice for the leading amplitude.
struct AmplitudeSpec {
    CVec3 a, b;
};

/// Z0 = (1/tau)(zeta.a, k b, zeta.b, k a); bounded in tau.
inline Field8 build_Z0(const PhasePair& pp, const AmplitudeSpec& amp, int which) {
    const CVec3& z = (which == 1) ? pp.zeta1 : pp.zeta2;
    Field8 f;
    f.phi = dot(z, amp.a) / pp.tau;
    f.h = amp.b * cplx(pp.k / pp.tau);
    f.psi = dot(z, amp.b) / pp.tau;
    f.e = amp.a * cplx(pp.k / pp.tau);
    return f;
}

/// Large-tau limit of Z0 (the amplitude Mhat).
inline Field8 limit_M(const PhasePair& pp, const AmplitudeSpec& amp) {
    Field8 f;
    f.phi = dot(pp.limit(), amp.a);
    f.psi = dot(pp.limit(), amp.b);
    return f;
}

/// Scalar components of (-P(zeta) + k) Z0; both vanish identically for the
/// canonical Z0, which is the condition eliminating the scalar blocks of Y.
struct AdmissibilityResult {
    double res_phi, res_psi;
    bool pass;
};

inline AdmissibilityResult admissibility_check(const Field8& z0, const PhasePair& pp, int which,
                                               double tol = 1e-12) {
    const CVec3& z = (which == 1) ? pp.zeta1 : pp.zeta2;
    Field8 pz = symbol_P(z, z0);
    const double scale = std::max(norm(z0), 1e-300);
    AdmissibilityResult r;
    r.res_phi = std::abs(-pz.phi + pp.k * z0.phi) / scale;
    r.res_psi = std::abs(-pz.psi + pp.k * z0.psi) / scale;
    r.pass = r.res_phi <= tol && r.res_psi <= tol;
    return r;
}

/// Leading layers of Y = (P(i grad) + W^T) Z:
/// Y1 = -P(zeta) Z0,  Y0 = -P(zeta) Zm1 + W^T Z0.
inline std::pair<Field8, Field8> leading_Y(const Field8& z0, const Field8& z_minus1,
                                           const PhasePair& pp, int which,
                                           const MaterialProfile& mat, const Vec3& pos) {
    const CVec3& z = (which == 1) ? pp.zeta1 : pp.zeta2;
    Field8 y1 = -symbol_P(z, z0);
    Field8 y0 = -symbol_P(z, z_minus1) + apply_Wt(mat, pos, z0);
    return {y1, y0};
}

/// Exponents of the products of reflected opposite-plane solutions:
///   phi2 = i zeta1.x   + conj(i zeta2).xddot
///   phi3 = i zeta1.xdot + conj(i zeta2).x
///   phi4 = i zeta1.xdot + conj(i zeta2).xddot
/// in closed form; Re phi_j <= 0 throughout the slab.
inline cplx exponent_phi(int j, const Vec3& x, const PhasePair& pp, double L) {
    if (pp.scenario != Scenario::opposite_plane)
        throw std::invalid_argument("exponent_phi is an opposite-plane quantity");
    const double xp = std::hypot(pp.xi.x, pp.xi.y);
    const double xn = norm(pp.xi);
    const double t = std::sqrt(pp.tau * pp.tau - pp.k * pp.k);
    const double rate = 2.0 * t * xp / xn;
    const double x2f = (pp.xi.x * x.x + pp.xi.y * x.y) / xp;  // f2 . x
    switch (j) {
        case 2: return cplx(0, xp * x2f + pp.xi.z * L) - rate * (L - x.z);
        case 3: return cplx(0, xp * x2f) - rate * x.z;
        case 4: return cplx(0, dot(pp.xi_dot(), x) + pp.xi.z * L) - rate * L;
        default: throw std::invalid_argument("exponent_phi: j must be 2, 3 or 4");
    }
}

/// Direct evaluation of the same exponents from the zetas (the oracle route).
inline cplx exponent_phi_direct(int j, const Vec3& x, const PhasePair& pp, double L) {
    const Vec3 xd{x.x, x.y, -x.z};
    const Vec3 xdd{x.x, x.y, 2 * L - x.z};
    const CVec3 iz1 = pp.zeta1 * cplx(0, 1);
    const CVec3 ciz2 = conj(pp.zeta2 * cplx(0, 1));
    switch (j) {
        case 2: return dot(iz1, CVec3(x)) + dot(ciz2, CVec3(xdd));
        case 3: return dot(iz1, CVec3(xd)) + dot(ciz2, CVec3(x));
        case 4: return dot(iz1, CVec3(xd)) + dot(ciz2, CVec3(xdd));
        default: throw std::invalid_argument("exponent_phi_direct: j must be 2, 3 or 4");
    }
}

}  // namespace slabcgo
