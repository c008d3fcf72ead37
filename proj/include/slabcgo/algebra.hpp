#pragma once

#include "slabcgo/core.hpp"
#include "slabcgo/material.hpp"

namespace slabcgo {

/// First-order symbol of the augmented system, fixed so that
/// P(i grad)(e^{i zeta.x} c) = -e^{i zeta.x} symbol_P(zeta, c).
inline Field8 symbol_P(const CVec3& zeta, const Field8& u) {
    Field8 out;
    out.phi = dot(zeta, u.e);
    out.h = zeta * u.psi - cross(zeta, u.e);
    out.psi = dot(zeta, u.h);
    out.e = zeta * u.phi + cross(zeta, u.h);
    return out;
}

/// Zeroth-order coupling A(alpha, beta): V = omega diag(mu, gamma) - i A.
inline Field8 apply_A(const CVec3& alpha, const CVec3& beta, const Field8& u) {
    Field8 out;
    out.phi = dot(alpha, u.e);
    out.h = alpha * u.psi;
    out.psi = dot(beta, u.h);
    out.e = beta * u.phi;
    return out;
}

inline Field8 apply_V(const MaterialProfile& mat, const Vec3& x, const Field8& u) {
    auto m = mat.mu(x), g = mat.gamma(x);
    Field8 out;
    const cplx om = mat.omega;
    out.phi = om * m.value * u.phi - 1.0i * dot(g.grad_log, u.e);
    out.h = u.h * (om * m.value) - g.grad_log * (1.0i * u.psi);
    out.psi = -1.0i * dot(m.grad_log, u.h) + om * g.value * u.psi;
    out.e = m.grad_log * (-1.0i * u.phi) + u.e * (om * g.value);
    return out;
}

/// W(alpha, beta, kappa) applied to u; transpose swaps alpha and beta.
inline Field8 apply_W_impl(const CVec3& alpha, const CVec3& beta, cplx kappa, const Field8& u) {
    Field8 out;
    out.phi = kappa * u.phi - 0.5i * dot(alpha, u.e);
    out.h = u.h * kappa - alpha * (0.5i * u.psi) - cross(alpha, u.e) * 0.5i;
    out.psi = -0.5i * dot(beta, u.h) + kappa * u.psi;
    out.e = beta * (-0.5i * u.phi) + cross(beta, u.h) * 0.5i + u.e * kappa;
    return out;
}

inline Field8 apply_W(const MaterialProfile& mat, const Vec3& x, const Field8& u) {
    auto m = mat.mu(x), g = mat.gamma(x);
    cplx kap = mat.omega * std::sqrt(m.value * g.value);
    return apply_W_impl(g.grad_log, m.grad_log, kap, u);
}

inline Field8 apply_Wt(const MaterialProfile& mat, const Vec3& x, const Field8& u) {
    auto m = mat.mu(x), g = mat.gamma(x);
    cplx kap = mat.omega * std::sqrt(m.value * g.value);
    return apply_W_impl(m.grad_log, g.grad_log, kap, u);
}

/// Matrix forms, for tests and entrywise inspection.
inline BlockMatrix8 assemble_V(const MaterialProfile& mat, const Vec3& x) {
    auto m = mat.mu(x), g = mat.gamma(x);
    BlockMatrix8 M;
    const cplx om = mat.omega;
    M(0, 0) = om * m.value;
    for (int i = 0; i < 3; ++i) M(1 + i, 1 + i) = om * m.value;
    M(4, 4) = om * g.value;
    for (int i = 0; i < 3; ++i) M(5 + i, 5 + i) = om * g.value;
    put_row_block(M, 0, 5, g.grad_log, -1.0i);
    put_col_block(M, 1, 4, g.grad_log, -1.0i);
    put_row_block(M, 4, 1, m.grad_log, -1.0i);
    put_col_block(M, 5, 0, m.grad_log, -1.0i);
    return M;
}

inline BlockMatrix8 assemble_W(const MaterialProfile& mat, const Vec3& x) {
    auto m = mat.mu(x), g = mat.gamma(x);
    cplx kap = mat.omega * std::sqrt(m.value * g.value);
    const CVec3 a = g.grad_log, b = m.grad_log;
    BlockMatrix8 M;
    for (int i = 0; i < 8; ++i) M(i, i) = kap;
    put_row_block(M, 0, 5, a, -0.5i);
    put_col_block(M, 1, 4, a, -0.5i);
    put_cross_block(M, 1, 5, a, -0.5i);
    put_row_block(M, 4, 1, b, -0.5i);
    put_col_block(M, 5, 0, b, -0.5i);
    put_cross_block(M, 5, 1, b, 0.5i);
    return M;
}

/// Zeroth-order potential of the factorization
/// (P(i grad) - W)(P(i grad) + W^T) = -Laplace + Qtilde.
inline BlockMatrix8 assemble_Qtilde(const MaterialProfile& mat, const Vec3& x) {
    auto m = mat.mu(x), g = mat.gamma(x);
    cplx kap = mat.omega * std::sqrt(m.value * g.value);
    CVec3 gk = (m.grad_log + g.grad_log) * (0.5 * kap);
    cplx k2 = kap * kap;
    cplx aa = dot(g.grad_log, g.grad_log);
    cplx bb = dot(m.grad_log, m.grad_log);
    cplx lga = g.lap_log(), lmu = m.lap_log();

    BlockMatrix8 M;
    M(0, 0) = 0.5 * lga - k2 + 0.25 * aa;
    M(4, 4) = 0.5 * lmu - k2 + 0.25 * bb;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            M(1 + i, 1 + j) = g.hess_log[i][j] - (i == j ? 0.5 * lga + k2 - 0.25 * aa : cplx(0));
            M(5 + i, 5 + j) = m.hess_log[i][j] - (i == j ? 0.5 * lmu + k2 - 0.25 * bb : cplx(0));
        }
    put_row_block(M, 0, 5, gk, 2.0i);
    put_col_block(M, 1, 4, gk, 2.0i);
    put_row_block(M, 4, 1, gk, 2.0i);
    put_col_block(M, 5, 0, gk, 2.0i);
    return M;
}

inline Field8 apply_Qtilde(const MaterialProfile& mat, const Vec3& x, const Field8& u) {
    return assemble_Qtilde(mat, x).apply(u);
}

/// Q = k^2 + Qtilde; compactly supported for profiles constant outside B.
inline Field8 apply_Q(const MaterialProfile& mat, const Vec3& x, const Field8& u) {
    const double k = mat.k_background();
    return apply_Qtilde(mat, x, u) + u * cplx(k * k);
}

enum class RescaleDir { forward, inverse };

/// Y = diag(mu^{1/2}, gamma^{1/2}) X links (P - V)X = 0 with (P - W)Y = 0.
inline Field8 rescale(const Field8& u, const MaterialProfile& mat, const Vec3& x, RescaleDir dir) {
    cplx sm = std::sqrt(mat.mu_value(x));
    cplx sg = std::sqrt(mat.gamma_value(x));
    if (sm == 0.0 || sg == 0.0) throw std::domain_error("rescale: zero parameter");
    if (dir == RescaleDir::inverse) { sm = 1.0 / sm; sg = 1.0 / sg; }
    return {u.phi * sm, u.h * sm, u.psi * sg, u.e * sg};
}

}  // namespace slabcgo
