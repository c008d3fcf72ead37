#include <catch2/catch_amalgamated.hpp>

#include "slabcgo/faddeev.hpp"

using namespace slabcgo;

namespace {

MaterialProfile gaussian_profile(double amp_mu = 0.3, double amp_ga = 0.2) {
    MaterialProfile mat(1.0, 1.0, 1.0);
    mat.mu_bumps.push_back({Bump::Kind::gaussian, {0, 0, 0}, 0.3, amp_mu});
    mat.gamma_bumps.push_back({Bump::Kind::gaussian, {0, 0, 0}, 0.3, amp_ga});
    return mat;
}

}  // namespace

TEST_CASE("conjugated multiplier: offset lattice avoids the symbol zero set") {
    PeriodicCell cell(4.0, 16);
    SpectralOps ops(cell);
    auto pp = build_phase({0.9, 0.4, 0.3}, 8, 1.0, Scenario::same_plane);
    auto m = conjugated_multiplier(pp.zeta1, ops);
    CHECK(m.min_abs_den > 1e-8 * pp.tau);
    CHECK(m.min_abs_den > 0.1);  // recorded healthy margin at this configuration
}

TEST_CASE("multiplier inverts the conjugated operator spectrally") {
    PeriodicCell cell(4.0, 16);
    SpectralOps ops(cell);
    auto pp = build_phase({0.9, 0.4, 0.3}, 8, 1.0, Scenario::same_plane);
    auto m = conjugated_multiplier(pp.zeta1, ops);
    const Grid3 g = cell.grid();
    // compactly supported random-ish g
    GridField f(g, 8);
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                Vec3 p = g.pos(i, j, k);
                double r2 = dot(p, p);
                if (r2 < 1.0) {
                    Field8 u;
                    for (int c = 0; c < 8; ++c) u[c] = std::exp(-r2 * 3) * (0.3 + 0.1 * c) * cplx(1, 0.5);
                    f.set_field8(i, j, k, u);
                }
            }
    GridField sol = f;
    ops.apply_symbol_table(sol, m.table, true);
    GridField back = sol;
    ops.apply_symbol_table(back, m.den, true);
    CHECK(rel_l2_diff(back, f) < 1e-12);
}

TEST_CASE("corrector: zero potential gives zero corrector immediately") {
    MaterialProfile mat(1.0, 1.0, 1.0);  // no bumps: Q = 0
    PeriodicCell cell(4.0, 16);
    SpectralOps ops(cell);
    QField qf = build_Q_field(mat, cell);
    CHECK(qf.entries.empty());
    auto pp = build_phase({0.9, 0.4, 0.3}, 8, 1.0, Scenario::same_plane);
    AmplitudeSpec amp{pp.zeta_hat, pp.zeta_check};
    Field8 z0 = build_Z0(pp, amp, 1);
    auto res = solve_corrector(qf, pp.zeta1, z0, ops);
    CHECK(res.converged);
    CHECK(res.psi.max_abs() < 1e-14);
    CHECK(res.iterations <= 1);
}

TEST_CASE("corrector decay: ||zm1|| halves per tau doubling; zr decays faster") {
    MaterialProfile mat = gaussian_profile();
    PeriodicCell cell(4.0, 32);
    SpectralOps ops(cell);
    QField qf = build_Q_field(mat, cell);
    Vec3 xi{1.0, 0.5, 0.25};
    double prev_zm1 = 0, prev_ratio = 1e300;
    for (double tau : {8.0, 16.0, 32.0}) {
        auto pp = build_phase(xi, tau, 1.0, Scenario::same_plane);
        AmplitudeSpec amp{pp.zeta_hat, pp.zeta_check};
        Field8 z0 = build_Z0(pp, amp, 1);
        auto res = solve_corrector(qf, pp.zeta1, z0, ops);
        REQUIRE(res.converged);
        CHECK(res.residual < 1e-8);
        const double n1 = res.zm1.l2_norm(), nr = res.zr.l2_norm();
        if (prev_zm1 > 0) {
            CHECK(prev_zm1 / n1 > 1.5);
            CHECK(prev_zm1 / n1 < 2.6);
            CHECK(nr / n1 < prev_ratio);
        }
        prev_zm1 = n1;
        prev_ratio = nr / n1;
    }
}

TEST_CASE("limit_R residual: flagged cases and tau decrease") {
    PeriodicCell cell(4.0, 24);
    SpectralOps ops(cell);
    Vec3 xi{0.9, 0.4, 0.3};

    // zero potential: flagged absolute zero
    MaterialProfile empty(1.0, 1.0, 1.0);
    QField q0 = build_Q_field(empty, cell);
    auto pp8 = build_phase(xi, 8, 1.0, Scenario::same_plane);
    AmplitudeSpec amp{pp8.zeta_hat, pp8.zeta_check};
    Field8 z0 = build_Z0(pp8, amp, 1);
    auto r0 = solve_corrector(q0, pp8.zeta1, z0, ops);
    auto lr0 = limit_R_residual(r0, q0, pp8.zeta_hat, limit_M(pp8, amp), 8.0, ops);
    CHECK(lr0.absolute);
    CHECK(lr0.value < 1e-14);

    // zero amplitudes: Mhat = 0, flagged absolute
    MaterialProfile mat = gaussian_profile();
    QField qf = build_Q_field(mat, cell);
    AmplitudeSpec zero_amp{{}, {}};
    auto rz = solve_corrector(qf, pp8.zeta1, build_Z0(pp8, zero_amp, 1), ops);
    auto lrz = limit_R_residual(rz, qf, pp8.zeta_hat, limit_M(pp8, zero_amp), 8.0, ops);
    CHECK(lrz.absolute);
    CHECK(lrz.value < 1e-14);

    // gaussian profile: residual decreases from tau 32 to 64
    double prev = 1e300;
    for (double tau : {32.0, 64.0}) {
        auto pp = build_phase(xi, tau, 1.0, Scenario::same_plane);
        AmplitudeSpec a{pp.zeta_hat, pp.zeta_check};
        auto res = solve_corrector(qf, pp.zeta1, build_Z0(pp, a, 1), ops);
        auto lr = limit_R_residual(res, qf, pp.zeta_hat, limit_M(pp, a), tau, ops);
        CHECK_FALSE(lr.absolute);
        CHECK(lr.value < prev);
        prev = lr.value;
    }
}

TEST_CASE("build_full_Y: constant parameters reproduce the closed-form layer") {
    MaterialProfile mat(1.0, 1.0, 1.0);
    PeriodicCell cell(4.0, 16);
    SpectralOps ops(cell);
    QField qf = build_Q_field(mat, cell);
    auto pp = build_phase({0.9, 0.4, 0.3}, 8, 1.0, Scenario::same_plane);
    AmplitudeSpec amp{pp.zeta_hat, pp.zeta_check};
    Field8 z0 = build_Z0(pp, amp, 1);
    auto res = solve_corrector(qf, pp.zeta1, z0, ops);
    auto y = build_full_Y(res, pp, 1, z0, mat, ops);
    Field8 expect = -symbol_P(pp.zeta1, z0) + z0 * cplx(pp.k);
    double worst = 0;
    const Grid3 g = cell.grid();
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) worst = std::max(worst, norm(y.amp.field8(i, j, k) - expect));
    CHECK(worst < 1e-12);
    CHECK(y.maxwell_residual < 1e-12);
    // admissible Z0: scalar blocks of the total layer vanish identically
    CHECK(y.scalar_fraction < 1e-12);
}

TEST_CASE("build_full_Y: layer norms scale as O(tau) and O(1)") {
    MaterialProfile mat = gaussian_profile();
    PeriodicCell cell(4.0, 24);
    SpectralOps ops(cell);
    QField qf = build_Q_field(mat, cell);
    Vec3 xi{0.9, 0.4, 0.3};
    std::vector<double> y1n, y0n;
    for (double tau : {8.0, 16.0, 32.0}) {
        auto pp = build_phase(xi, tau, 1.0, Scenario::same_plane);
        AmplitudeSpec amp{pp.zeta_hat, pp.zeta_check};
        Field8 z0 = build_Z0(pp, amp, 1);
        auto res = solve_corrector(qf, pp.zeta1, z0, ops);
        // Y1 layer = -P(zeta) Z0 ~ tau; Y0 layer = -P(zeta) zm1 + W^T Z0 ~ 1
        y1n.push_back(norm(symbol_P(pp.zeta1, z0)));
        Vec3 origin{0, 0, 0};
        auto [y1, y0] = leading_Y(z0, res.zm1.field8(12, 12, 12), pp, 1, mat, origin);
        y0n.push_back(norm(y0));
    }
    CHECK(y1n[1] / y1n[0] > 1.7);
    CHECK(y1n[2] / y1n[1] > 1.7);
    CHECK(y0n[2] / y0n[0] < 2.0);  // bounded, no linear growth

    // scalar blocks of the full numerical Y drop below tolerance at large tau
    auto pp = build_phase(xi, 32.0, 1.0, Scenario::same_plane);
    AmplitudeSpec amp{pp.zeta_hat, pp.zeta_check};
    Field8 z0 = build_Z0(pp, amp, 1);
    auto res = solve_corrector(qf, pp.zeta1, z0, ops);
    auto y = build_full_Y(res, pp, 1, z0, mat, ops);
    CHECK(y.scalar_fraction < 1e-2);
}
