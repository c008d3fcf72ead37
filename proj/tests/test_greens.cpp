#include <catch2/catch_amalgamated.hpp>

#include "slabcgo/greens.hpp"

using namespace slabcgo;

TEST_CASE("ModeSpec branch and resonance guard") {
    ModeSpec spec(4.0, 1.0, 6);
    CHECK(spec.propagating(1));
    CHECK(spec.km(1).imag() == 0.0);
    CHECK(spec.km(1).real() == Catch::Approx(std::sqrt(16 - M_PI * M_PI)));
    CHECK_FALSE(spec.propagating(2));
    CHECK(spec.km(2).real() == 0.0);
    CHECK(spec.km(2).imag() > 0);  // evanescent branch decays
    CHECK_THROWS(ModeSpec(M_PI, 1.0, 3));  // k = pi/L resonance
}

TEST_CASE("phi_dirichlet vanishes on the planes and is symmetric") {
    ModeSpec spec(4.0, 1.0, 15);
    Vec3 y{0.2, -0.1, 0.6};
    CHECK(std::abs(phi_dirichlet({0.5, 0.3, 0.0}, y, spec)) < 1e-14);
    CHECK(std::abs(phi_dirichlet({0.5, 0.3, 1.0}, y, spec)) < 1e-14);
    Vec3 x{-0.3, 0.4, 0.45};
    CHECK(std::abs(phi_dirichlet(x, y, spec) - phi_dirichlet(y, x, spec)) < 1e-12);
    CHECK_THROWS(phi_dirichlet({0.2, -0.1, 0.3}, y, spec));  // x' = y'
}

TEST_CASE("psi_neumann has vanishing normal derivative on the planes") {
    ModeSpec spec(4.0, 1.0, 15);
    Vec3 y{0.1, 0.2, 0.55};
    const double d = 1e-6;
    for (double z0 : {0.0, 1.0}) {
        Vec3 xp{0.6, -0.2, z0 + (z0 == 0.0 ? d : -d)};
        Vec3 xp2{0.6, -0.2, z0 + (z0 == 0.0 ? 2 * d : -2 * d)};
        cplx g1 = (psi_neumann(xp, y, spec) - psi_neumann({0.6, -0.2, z0}, y, spec)) / d;
        // one-sided second-order estimate of the derivative at the plane
        cplx g2 = (psi_neumann(xp2, y, spec) - psi_neumann({0.6, -0.2, z0}, y, spec)) / (2 * d);
        cplx dz = 2.0 * g1 - g2;
        CHECK(std::abs(dz) < 1e-4 * std::abs(psi_neumann(xp, y, spec)) + 1e-8);
    }
    // with k < pi/L and M = 0, only the constant mode remains
    ModeSpec low(2.0, 1.0, 0);
    cplx v = psi_neumann({0.5, 0, 0.3}, {0, 0, 0.8}, low, true);
    cplx expect = cplx(0, 1.0 / 4.0) * hankel_h01(cplx(2.0) * std::hypot(0.5, 0.0));
    CHECK(std::abs(v - expect) < 1e-14);
    CHECK(std::abs(psi_neumann({0.5, 0, 0.3}, {0, 0, 0.8}, low, false)) < 1e-14);
}

TEST_CASE("mode sums converge: doubling M changes values within the tail bound") {
    ModeSpec s20(4.0, 1.0, 20), s40(4.0, 1.0, 40);
    Vec3 x{0.4, 0.1, 0.37}, y{-0.2, 0.3, 0.62};
    double tail = 0;
    cplx v20 = phi_dirichlet(x, y, s20, &tail);
    cplx v40 = phi_dirichlet(x, y, s40);
    CHECK(std::abs(v40 - v20) <= 2 * tail);
    CHECK(std::abs(v40 - v20) < 1e-10);  // evanescent tail decays fast at this separation
}

TEST_CASE("sine/cosine expansion: single mode, round trip, Parseval") {
    SlabGrid sg;
    sg.nt = 8; sg.t_lo = -1; sg.t_hi = 1; sg.nz = 32; sg.L = 1.0;
    GridField f(sg.grid(), 1);
    for (int i = 0; i < sg.nt; ++i)
        for (int j = 0; j < sg.nt; ++j)
            for (int k = 0; k <= sg.nz; ++k)
                f.at(0, i, j, k) = std::sin(M_PI * sg.tz(k)) * cplx(i + 1, j);
    ModeStack ms = sine_cosine_expand(f, 0, Parity::sine, 6, sg);
    for (int i = 0; i < sg.nt; ++i)
        for (int j = 0; j < sg.nt; ++j) {
            CHECK(std::abs(ms.coef[1][std::size_t(i) * sg.nt + j] - cplx(i + 1, j)) < 1e-12);
            for (int m = 2; m <= 6; ++m)
                CHECK(std::abs(ms.coef[m][std::size_t(i) * sg.nt + j]) < 1e-12);
        }
    // round trip at nodes
    double worst = 0;
    for (int k = 0; k <= sg.nz; ++k)
        worst = std::max(worst, std::abs(ms.synth(3, 2, sg.tz(k)) - f.at(0, 3, 2, k)));
    CHECK(worst < 1e-10);

    // Parseval: sum ||E_m||^2 = (2/L) ||f||^2 for a bandlimited sine series
    double lhs = 0;
    for (int m = 1; m <= 6; ++m)
        for (auto& c : ms.coef[m]) lhs += std::norm(c);
    double rhs = 0;
    for (int i = 0; i < sg.nt; ++i)
        for (int j = 0; j < sg.nt; ++j)
            for (int k = 0; k <= sg.nz; ++k) {
                double w = (k == 0 || k == sg.nz) ? 0.5 : 1.0;
                rhs += w * sg.hz() * std::norm(f.at(0, i, j, k));
            }
    CHECK(std::abs(lhs - 2.0 / sg.L * rhs) < 1e-10 * std::max(1.0, rhs));
}

TEST_CASE("manufactured scalar Helmholtz solve on the slab") {
    // u* = sin(pi z / L) b(x'), g = (-Lap - k^2) u*; recovery at criterion size
    const double L = 1.0, k = 4.0;
    ModeSpec spec(k, L, 20);
    SlabGrid sg;
    sg.nt = 64; sg.t_lo = -1.5; sg.t_hi = 1.5; sg.nz = 24; sg.L = L;
    auto b2 = [](double x, double y) {
        double r2 = (x * x + y * y) / 0.25;
        return r2 < 1 ? std::pow(1 - r2, 6) : 0.0;
    };
    auto lap_b2 = [&](double x, double y) {
        const double d = 1e-5;
        return (b2(x + d, y) + b2(x - d, y) + b2(x, y + d) + b2(x, y - d) - 4 * b2(x, y)) / (d * d);
    };
    GridField g(sg.grid(), 1), uref(sg.grid(), 1);
    for (int i = 0; i < sg.nt; ++i)
        for (int j = 0; j < sg.nt; ++j)
            for (int kk = 0; kk <= sg.nz; ++kk) {
                const double x = sg.tx(i), y = sg.tx(j), z = sg.tz(kk);
                const double sz = std::sin(M_PI * z / L);
                uref.at(0, i, j, kk) = sz * b2(x, y);
                g.at(0, i, j, kk) = sz * (-lap_b2(x, y) + ((M_PI / L) * (M_PI / L) - k * k) * b2(x, y));
            }
    HelmholtzReport rep;
    GridField u = solve_helmholtz_slab(g, SlabBC::dirichlet, spec, sg, &rep);
    CHECK(rel_l2_diff(u, uref) < 1e-2);
    // Dirichlet trace of the solution vanishes identically (sine synthesis)
    double tr = 0;
    for (int i = 0; i < sg.nt; ++i)
        for (int j = 0; j < sg.nt; ++j)
            tr = std::max({tr, std::abs(u.at(0, i, j, 0)), std::abs(u.at(0, i, j, sg.nz))});
    CHECK(tr < 1e-10);

    // zero source gives zero solution
    GridField zero(sg.grid(), 1);
    CHECK(solve_helmholtz_slab(zero, SlabBC::dirichlet, spec, sg).max_abs() < 1e-300);
}

TEST_CASE("radiation condition: outgoing passes, incoming fails") {
    ModeSpec spec(4.0, 1.0, 3);
    const double km = spec.km(1).real();
    std::vector<double> radii{4.0, 6.0, 9.0, 13.0, 20.0, 30.0};
    auto outgoing = [&](double r, double) { return hankel_h01(cplx(km * r, 0)); };
    auto incoming = [&](double r, double) { return std::conj(hankel_h01(cplx(km * r, 0))); };
    auto rep_out = check_radiation(outgoing, km, radii);
    CHECK(rep_out.pass);
    auto rep_in = check_radiation(incoming, km, radii);
    CHECK_FALSE(rep_in.pass);
    CHECK_THROWS(check_radiation(outgoing, km, {1.0, 2.0}));          // too few radii
    CHECK_THROWS(check_radiation(outgoing, -spec.km(2).imag(), radii));  // evanescent rejected
}
