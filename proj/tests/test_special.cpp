#include <catch2/catch_amalgamated.hpp>

#include "slabcgo/special.hpp"

using namespace slabcgo;

namespace {

// independent power-series oracle for J0 / Y0, written from the ascending
// series definitions, usable up to moderate |z| on the real axis
cplx j0_oracle(double x) {
    cplx q = -cplx(x * x) * 0.25, term = 1.0, s = 1.0;
    for (int m = 1; m <= 80; ++m) {
        term *= q / double(m * m);
        s += term;
    }
    return s;
}
cplx y0_oracle(double x) {
    const double eg = 0.57721566490153286060651209;
    cplx q = -cplx(x * x) * 0.25, term = 1.0, s = 0.0;
    double hm = 0;
    for (int m = 1; m <= 80; ++m) {
        term *= q / double(m * m);
        hm += 1.0 / m;
        s -= term * hm;
    }
    return (2.0 / M_PI) * ((std::log(x / 2.0) + eg) * j0_oracle(x) + s);
}

}  // namespace

TEST_CASE("H0^1 against frozen reference values on the real axis") {
    struct Ref { double x; cplx v; };
    // frozen from an independent special-function evaluation
    const Ref refs[] = {
        {0.001, cplx(0.9999997500000157, -4.471416611375924)},
        {0.01, cplx(0.9999750001562496, -3.0054556370836463)},
        {0.1, cplx(0.9975015620660401, -1.5342386513503667)},
        {0.5, cplx(0.9384698072408126, -0.44451873350670656)},
        {1.0, cplx(0.7651976865579664, 0.088256964215677)},
        {2.0, cplx(0.22389077914123567, 0.5103756726497453)},
        {4.0, cplx(-0.3971498098638474, -0.016940739325064992)},
        {7.9, cplx(0.19436184484127822, 0.20652094814437572)},
        {8.1, cplx(0.14751745404437766, 0.23809132870223482)},
        {12.0, cplx(0.04768931079683357, -0.2252373126343615)},
        {20.0, cplx(0.1670246643405832, 0.06264059680938386)},
        {35.0, cplx(-0.1268456827563126, 0.04579798719515564)},
        {50.0, cplx(0.05581232766925183, -0.0980649954700771)},
    };
    for (const auto& r : refs) {
        cplx v = hankel_h01(cplx(r.x, 0));
        CHECK(std::abs(v - r.v) <= 1e-10 * std::abs(r.v));
    }
}

TEST_CASE("H0^1 against frozen reference values on the imaginary axis") {
    struct Ref { double y; cplx v; };
    const Ref refs[] = {
        {0.01, cplx(0.0, -3.0056377454067995)},
        {0.1, cplx(0.0, -1.5451201300262054)},
        {1.0, cplx(0.0, -0.2680324820339885)},
        {3.0, cplx(0.0, -0.022115855374555692)},
        {8.0, cplx(0.0, -9.324614701746787e-05)},
        {9.5, cplx(0.0, -1.9135443879771107e-05)},
        {15.0, cplx(0.0, -6.251311080178379e-08)},
        {30.0, cplx(0.0, -1.3575773383773008e-14)},
        {50.0, cplx(0.0, -2.1709802166062555e-23)},
    };
    for (const auto& r : refs) {
        cplx v = hankel_h01(cplx(0, r.y));
        CHECK(std::abs(v - r.v) <= 1e-10 * std::abs(r.v));
    }
}

TEST_CASE("series and asymptotic branches agree with the power-series oracle") {
    for (double x : {0.3, 1.0, 2.5, 5.0, 7.5}) {
        cplx mine = hankel_h01(cplx(x, 0));
        cplx orc = j0_oracle(x) + cplx(0, 1) * y0_oracle(x);
        CHECK(std::abs(mine - orc) < 1e-12 * std::abs(orc));
    }
    // overlap of series and asymptotic branches around the split point
    for (double x : {10.8, 10.99, 11.01, 11.3}) {
        cplx s = hankel_h01(cplx(x, 0));
        cplx a = detail::h01_asymptotic(cplx(x, 0));
        cplx ser = j0_oracle(x) + cplx(0, 1) * y0_oracle(x);
        CHECK(std::abs(s - ser) < 1e-10);
        CHECK(std::abs(a - ser) < 1e-10);
    }
}

TEST_CASE("H0^1 asymptotic amplitude: |H0^1(x)| sqrt(pi x / 2) -> 1") {
    double v = std::abs(hankel_h01(cplx(50.0, 0))) * std::sqrt(M_PI * 50.0 / 2.0);
    CHECK(std::abs(v - 1.0) < 1e-3);
}

TEST_CASE("H0^1 rejects the origin and the lower half plane") {
    CHECK_THROWS(hankel_h01(cplx(0, 0)));
    CHECK_THROWS(hankel_h01(cplx(0, -1.0)));
}
