#pragma once

#include <functional>

#include "slabcgo/grid.hpp"
#include "slabcgo/material.hpp"

namespace slabcgo {

enum class Plane { gamma1, gamma2 };  // gamma1: x3 = L, gamma2: x3 = 0

/// Slab of width L with boundary planes, bounded box Omega_b inside the slab
/// and the cutoff radii used by the forward machinery.
struct SlabGeometry {
    double L = 1.0;
    Vec3 box_lo{-1, -1, 0};   // Omega_b
    Vec3 box_hi{1, 1, 1};
    double R = 0.5, Rp = 0.7, Rpp = 0.9;

    SlabGeometry() = default;
    SlabGeometry(double L_, Vec3 lo, Vec3 hi, double R_, double Rp_, double Rpp_)
        : L(L_), box_lo(lo), box_hi(hi), R(R_), Rp(Rp_), Rpp(Rpp_) {
        if (!(0 < R && R < Rp && Rp < Rpp)) throw std::invalid_argument("need 0 < R < R' < R''");
        if (box_lo.z < 0 || box_hi.z > L) throw std::invalid_argument("Omega_b must lie inside the slab");
    }

    Vec3 outward_normal(Plane p) const { return p == Plane::gamma1 ? Vec3{0, 0, 1} : Vec3{0, 0, -1}; }

    bool in_box(const Vec3& x) const {
        return x.x >= box_lo.x && x.x <= box_hi.x && x.y >= box_lo.y && x.y <= box_hi.y &&
               x.z >= box_lo.z && x.z <= box_hi.z;
    }
    /// O = Omega_b union its reflection across gamma2 (union interface).
    bool in_O(const Vec3& x) const {
        return in_box(x) || in_box({x.x, x.y, -x.z});
    }
};

inline Vec3 reflect_point(const Vec3& x, Plane p, double L = 0.0) {
    if (p == Plane::gamma2) return {x.x, x.y, -x.z};
    return {x.x, x.y, 2 * L - x.z};
}

/// Blockwise sign matrix diag(I4dot, -I4dot): phi -> -phi, H -> (H1, H2, -H3),
/// psi -> psi, E -> (-E1, -E2, E3).
inline Field8 reflect_signs(const Field8& f) {
    Field8 out;
    out.phi = -f.phi;
    out.h = {f.h.x, f.h.y, -f.h.z};
    out.psi = f.psi;
    out.e = {-f.e.x, -f.e.y, f.e.z};
    return out;
}

using Field8Fn = std::function<Field8(const Vec3&)>;

/// Xdot(x) = diag(I4dot, -I4dot) X(xdot(x)).
inline Field8Fn reflect_field8(const Field8Fn& f, Plane p, double L = 0.0) {
    return [f, p, L](const Vec3& x) { return reflect_signs(f(reflect_point(x, p, L))); };
}

/// nu x E restricted to the plane; returns the two nontrivial components
/// (the third vanishes identically). nu = e3 on gamma1, -e3 on gamma2.
inline std::array<cplx, 2> tangential_trace_point(const CVec3& e, Plane p) {
    // e3 x E = (-E2, E1, 0)
    if (p == Plane::gamma1) return {-e.y, e.x};
    return {e.y, -e.x};
}

/// Samples nu x E over a rectangular patch grid on the plane.
struct TraceField {
    std::vector<std::array<cplx, 2>> values;
    int nx = 0, ny = 0;
    double max_abs() const {
        double m = 0;
        for (auto& v : values) m = std::max({m, std::abs(v[0]), std::abs(v[1])});
        return m;
    }
};

inline TraceField tangential_trace(const std::function<CVec3(const Vec3&)>& e_field, Plane p,
                                   const SlabGeometry& geo, int nx, int ny) {
    TraceField tf;
    tf.nx = nx; tf.ny = ny;
    const double z = (p == Plane::gamma1) ? geo.L : 0.0;
    tf.values.reserve(std::size_t(nx) * ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            Vec3 x{geo.box_lo.x + (i + 0.5) * (geo.box_hi.x - geo.box_lo.x) / nx,
                   geo.box_lo.y + (j + 0.5) * (geo.box_hi.y - geo.box_lo.y) / ny, z};
            tf.values.push_back(tangential_trace_point(e_field(x), p));
        }
    return tf;
}

/// Samples mu and gamma at mirror pairs; passes iff the largest mismatch is
/// below tol (the reflection-invariance hypothesis of the uniqueness theorems).
inline bool check_parameter_symmetry(const MaterialProfile& mat, Plane p, double L,
                                     double extent = 2.0, int n = 7, double tol = 1e-12) {
    double worst = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Vec3 x{-extent + 2 * extent * i / (n - 1.0), -extent + 2 * extent * j / (n - 1.0),
                       -extent + 2 * extent * k / (n - 1.0)};
                Vec3 xr = reflect_point(x, p, L);
                worst = std::max(worst, std::abs(mat.mu_value(x) - mat.mu_value(xr)));
                worst = std::max(worst, std::abs(mat.gamma_value(x) - mat.gamma_value(xr)));
            }
    return worst <= tol;
}

}  // namespace slabcgo
