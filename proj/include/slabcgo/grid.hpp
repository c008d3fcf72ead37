#pragma once

#include <cassert>
#include <cstdint>
#include <string>
#include <vector>

#include "slabcgo/core.hpp"

namespace slabcgo {

/// Uniform node-registered grid: node (i,j,k) sits at x0 + (i*hx, j*hy, k*hz).
struct Grid3 {
    std::array<int, 3> n{0, 0, 0};
    Vec3 x0{};
    Vec3 h{};

    std::size_t npts() const { return std::size_t(n[0]) * n[1] * n[2]; }
    Vec3 pos(int i, int j, int k) const {
        return {x0.x + i * h.x, x0.y + j * h.y, x0.z + k * h.z};
    }
    double cell_volume() const { return h.x * h.y * h.z; }
};

/// Multi-component complex samples over a Grid3; immutable extent after
/// construction. Layout: ((i*ny + j)*nz + k)*ncomp + c.
struct GridField {
    Grid3 grid;
    int ncomp = 1;
    std::vector<cplx> data;
    std::string backend;  // which differentiation backend produced it, if any

    GridField() = default;
    GridField(const Grid3& g, int nc) : grid(g), ncomp(nc), data(g.npts() * nc, cplx(0)) {}

    std::size_t idx(int i, int j, int k) const {
        return (std::size_t(i) * grid.n[1] + j) * grid.n[2] + k;
    }
    cplx& at(int c, int i, int j, int k) { return data[idx(i, j, k) * ncomp + c]; }
    cplx at(int c, int i, int j, int k) const { return data[idx(i, j, k) * ncomp + c]; }

    Field8 field8(int i, int j, int k) const {
        assert(ncomp == 8);
        const cplx* p = &data[idx(i, j, k) * 8];
        return {p[0], {p[1], p[2], p[3]}, p[4], {p[5], p[6], p[7]}};
    }
    void set_field8(int i, int j, int k, const Field8& f) {
        assert(ncomp == 8);
        cplx* p = &data[idx(i, j, k) * 8];
        for (int c = 0; c < 8; ++c) p[c] = f[c];
    }
    CVec3 vec3(int i, int j, int k) const {
        assert(ncomp == 3);
        const cplx* p = &data[idx(i, j, k) * 3];
        return {p[0], p[1], p[2]};
    }
    void set_vec3(int i, int j, int k, const CVec3& v) {
        assert(ncomp == 3);
        cplx* p = &data[idx(i, j, k) * 3];
        p[0] = v.x; p[1] = v.y; p[2] = v.z;
    }

    double l2_norm() const {
        double s = 0;
        for (const auto& v : data) s += std::norm(v);
        return std::sqrt(s * grid.cell_volume());
    }
    double max_abs() const {
        double s = 0;
        for (const auto& v : data) s = std::max(s, std::abs(v));
        return s;
    }

    GridField& operator-=(const GridField& o) {
        for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
        return *this;
    }
    GridField& operator+=(const GridField& o) {
        for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
        return *this;
    }
    GridField& operator*=(cplx s) {
        for (auto& v : data) v *= s;
        return *this;
    }
};

inline double rel_l2_diff(const GridField& a, const GridField& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        num += std::norm(a.data[i] - b.data[i]);
        den += std::norm(b.data[i]);
    }
    return std::sqrt(num / std::max(den, 1e-300));
}

/// 2nd-order partial derivative sample (centered; one-sided at faces).
inline cplx fd_d(const GridField& f, int c, int i, int j, int k, int axis) {
    const auto& n = f.grid.n;
    const double h = f.grid.h[axis];
    int ii[3] = {i, j, k};
    auto at = [&](int s) {
        int q[3] = {ii[0], ii[1], ii[2]};
        q[axis] += s;
        return f.at(c, q[0], q[1], q[2]);
    };
    if (ii[axis] == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2 * h);
    if (ii[axis] == n[axis] - 1) return (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2 * h);
    return (at(1) - at(-1)) / (2 * h);
}

/// Trilinear interpolation of one component at an arbitrary point (clamped).
inline cplx interp_trilinear(const GridField& f, int c, const Vec3& p) {
    const Grid3& g = f.grid;
    double fx = (p.x - g.x0.x) / g.h.x, fy = (p.y - g.x0.y) / g.h.y, fz = (p.z - g.x0.z) / g.h.z;
    int i0 = std::min(std::max(int(std::floor(fx)), 0), g.n[0] - 2);
    int j0 = std::min(std::max(int(std::floor(fy)), 0), g.n[1] - 2);
    int k0 = std::min(std::max(int(std::floor(fz)), 0), g.n[2] - 2);
    double ax = fx - i0, ay = fy - j0, az = fz - k0;
    cplx v = 0;
    for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj)
            for (int dk = 0; dk < 2; ++dk) {
                double w = (di ? ax : 1 - ax) * (dj ? ay : 1 - ay) * (dk ? az : 1 - az);
                v += w * f.at(c, i0 + di, j0 + dj, k0 + dk);
            }
    return v;
}

}  // namespace slabcgo
