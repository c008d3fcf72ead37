#include <catch2/catch_amalgamated.hpp>

#include "slabcgo/spectral.hpp"

using namespace slabcgo;

namespace {

MaterialProfile gaussian_profile(double sigma = 0.3) {
    MaterialProfile mat(1.0, 1.0, 1.0);
    mat.mu_bumps.push_back({Bump::Kind::gaussian, {0, 0, 0}, sigma, 0.3});
    mat.gamma_bumps.push_back({Bump::Kind::gaussian, {0, 0, 0}, sigma, 0.2});
    return mat;
}

}  // namespace

TEST_CASE("apply_P spectral: constant field maps to zero") {
    PeriodicCell cell(4.0, 16);
    GridField f(cell.grid(), 8);
    for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = cplx(1.0, -0.5);
    SpectralOps ops(cell);
    GridField out = ops.apply_P(f, false);
    CHECK(out.max_abs() < 1e-12);
    CHECK(out.backend == "spectral");
}

TEST_CASE("apply_P spectral satisfies the symbol relation on plane waves") {
    PeriodicCell cell(4.0, 16);
    SpectralOps ops(cell);
    const Grid3 g = cell.grid();
    const double base = 2 * M_PI / cell.side;
    Vec3 kv{2 * base, -base, 3 * base};
    Field8 c{cplx(0.3, 1.0), {cplx(1, -1), 0.5, cplx(0, 2)}, cplx(-1, 0.2), {2.0, cplx(0, -1), 1.5}};
    GridField f(g, 8);
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                cplx ph = std::exp(cplx(0, dot(kv, g.pos(i, j, k))));
                f.set_field8(i, j, k, c * ph);
            }
    GridField out = ops.apply_P(f, false);
    Field8 expect = -symbol_P(CVec3(kv), c);
    double worst = 0;
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                cplx ph = std::exp(cplx(0, dot(kv, g.pos(i, j, k))));
                worst = std::max(worst, norm(out.field8(i, j, k) - expect * ph));
            }
    CHECK(worst < 1e-10);
}

TEST_CASE("apply_P_fd agrees with componentwise centered differences to O(h^2)") {
    PeriodicCell cell(4.0, 24);
    const Grid3 g = cell.grid();
    GridField f(g, 8);
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                Vec3 p = g.pos(i, j, k);
                Field8 u;
                for (int c = 0; c < 8; ++c)
                    u[c] = std::sin(0.7 * p.x + 0.2 * c) * std::cos(0.5 * p.y) * std::sin(0.9 * p.z + 0.1);
                f.set_field8(i, j, k, u);
            }
    GridField out = apply_P_fd(f);
    CHECK(out.backend == "fd2");
    // interior check of one block: out.phi = i div e
    int i = 10, j = 11, k = 9;
    cplx div_e = fd_d(f, 5, i, j, k, 0) + fd_d(f, 6, i, j, k, 1) + fd_d(f, 7, i, j, k, 2);
    CHECK(std::abs(out.field8(i, j, k).phi - cplx(0, 1) * div_e) < 1e-13);

    CHECK_THROWS(apply_P_fd(f, /*declared_wavelength=*/4 * cell.h() * 0.9));
}

TEST_CASE("factorization residual: constant parameters at machine level") {
    MaterialProfile mat(1.0, 1.0, 1.3);
    PeriodicCell cell(4.0, 16);
    auto rep = check_factorization(mat, cell, 2, 3u);
    CHECK(rep.max_rel_residual < 1e-10);
}

TEST_CASE("factorization residual: gaussian profile converges under refinement") {
    MaterialProfile mat = gaussian_profile();
    auto r16 = check_factorization(mat, PeriodicCell(4.0, 16), 2, 3u);
    auto r32 = check_factorization(mat, PeriodicCell(4.0, 32), 2, 3u);
    CHECK(r32.max_rel_residual < 1e-6);
    CHECK(r16.max_rel_residual / r32.max_rel_residual > 10.0);
}

TEST_CASE("grid-level rescaling equivalence via FD residuals") {
    // (P - W) applied to diag(mu^1/2, gamma^1/2) X equals diag(gamma^1/2, mu^1/2)
    // applied to (P - V) X up to the FD product-rule error, which must shrink
    // like O(h^2) under refinement.
    MaterialProfile mat = gaussian_profile(0.4);
    auto worst_for = [&](int n) {
        PeriodicCell cell(4.0, n);
        const Grid3 g = cell.grid();
        GridField X(g, 8), DX(g, 8);
        for (int i = 0; i < g.n[0]; ++i)
            for (int j = 0; j < g.n[1]; ++j)
                for (int k = 0; k < g.n[2]; ++k) {
                    Vec3 p = g.pos(i, j, k);
                    Field8 u;
                    for (int c = 0; c < 8; ++c)
                        u[c] = std::exp(cplx(0, 0.9 * p.x - 0.4 * p.y + 0.6 * p.z)) * (1.0 + 0.1 * c);
                    X.set_field8(i, j, k, u);
                    DX.set_field8(i, j, k, rescale(u, mat, p, RescaleDir::forward));
                }
        GridField PX = apply_P_fd(X), PDX = apply_P_fd(DX);
        double worst = 0;
        for (int i = 2; i < g.n[0] - 2; ++i)
            for (int j = 2; j < g.n[1] - 2; ++j)
                for (int k = 2; k < g.n[2] - 2; ++k) {
                    Vec3 p = g.pos(i, j, k);
                    Field8 rV = PX.field8(i, j, k) - apply_V(mat, p, X.field8(i, j, k));
                    cplx sm = std::sqrt(mat.mu_value(p)), sg = std::sqrt(mat.gamma_value(p));
                    Field8 lhs = PDX.field8(i, j, k) - apply_W(mat, p, DX.field8(i, j, k));
                    Field8 rhs{rV.phi * sg, rV.h * sg, rV.psi * sm, rV.e * sm};
                    worst = std::max(worst, norm(lhs - rhs));
                }
        return worst;
    };
    const double w32 = worst_for(32), w64 = worst_for(64);
    CHECK(w32 < 0.1);
    CHECK(w32 / w64 > 3.0);  // second-order convergence of the residual gap
}
