#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace slabcgo {

using cplx = std::complex<double>;
using namespace std::complex_literals;

/// Real 3-vector (positions, wave vectors, frame vectors).
struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Complex 3-vector. dot() is bilinear (no conjugation); callers conjugate explicitly.
struct CVec3 {
    cplx x = 0, y = 0, z = 0;

    CVec3() = default;
    CVec3(cplx a, cplx b, cplx c) : x(a), y(b), z(c) {}
    CVec3(const Vec3& v) : x(v.x), y(v.y), z(v.z) {}

    cplx& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    cplx operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    CVec3 operator+(const CVec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    CVec3 operator-(const CVec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    CVec3 operator*(cplx s) const { return {x * s, y * s, z * s}; }
    CVec3 operator-() const { return {-x, -y, -z}; }
};

inline CVec3 operator*(cplx s, const CVec3& v) { return v * s; }
inline cplx dot(const CVec3& a, const CVec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline CVec3 conj(const CVec3& a) { return {std::conj(a.x), std::conj(a.y), std::conj(a.z)}; }
inline double norm(const CVec3& a) { return std::sqrt(std::norm(a.x) + std::norm(a.y) + std::norm(a.z)); }
inline CVec3 cross(const CVec3& a, const CVec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// 8-component field value with (scalar, 3-vector, scalar, 3-vector) block layout.
/// A Maxwell candidate has phi == 0 and psi == 0.
struct Field8 {
    cplx phi{};
    CVec3 h{};
    cplx psi{};
    CVec3 e{};

    cplx operator[](int i) const {
        switch (i) {
            case 0: return phi;
            case 1: case 2: case 3: return h[i - 1];
            case 4: return psi;
            default: return e[i - 5];
        }
    }
    cplx& operator[](int i) {
        switch (i) {
            case 0: return phi;
            case 1: case 2: case 3: return h[i - 1];
            case 4: return psi;
            default: return e[i - 5];
        }
    }

    Field8 operator+(const Field8& o) const { return {phi + o.phi, h + o.h, psi + o.psi, e + o.e}; }
    Field8 operator-(const Field8& o) const { return {phi - o.phi, h - o.h, psi - o.psi, e - o.e}; }
    Field8 operator*(cplx s) const { return {phi * s, h * s, psi * s, e * s}; }
    Field8 operator-() const { return {-phi, -h, -psi, -e}; }

    bool is_maxwell_candidate(double tol = 0.0) const {
        return std::abs(phi) <= tol && std::abs(psi) <= tol;
    }
};

inline Field8 operator*(cplx s, const Field8& f) { return f * s; }
inline cplx dot(const Field8& a, const Field8& b) {
    return a.phi * b.phi + dot(a.h, b.h) + a.psi * b.psi + dot(a.e, b.e);
}
inline Field8 conj(const Field8& a) { return {std::conj(a.phi), conj(a.h), std::conj(a.psi), conj(a.e)}; }
inline double norm(const Field8& a) {
    return std::sqrt(std::norm(a.phi) + norm(a.h) * norm(a.h) + std::norm(a.psi) + norm(a.e) * norm(a.e));
}

/// 8x8 complex matrix honoring the (1,3,1,3) block partition.
struct BlockMatrix8 {
    std::array<std::array<cplx, 8>, 8> m{};

    cplx& operator()(int i, int j) { return m[i][j]; }
    cplx operator()(int i, int j) const { return m[i][j]; }

    Field8 apply(const Field8& u) const {
        Field8 out;
        for (int i = 0; i < 8; ++i) {
            cplx s = 0;
            for (int j = 0; j < 8; ++j) s += m[i][j] * u[j];
            out[i] = s;
        }
        return out;
    }

    BlockMatrix8 operator-(const BlockMatrix8& o) const {
        BlockMatrix8 r;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
        return r;
    }
    BlockMatrix8 operator+(const BlockMatrix8& o) const {
        BlockMatrix8 r;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
        return r;
    }

    BlockMatrix8 transposed() const {
        BlockMatrix8 r;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) r.m[i][j] = m[j][i];
        return r;
    }
};

/// Writes the 3x3 cross-product matrix of v (acting as v x .) into block (bi,bj).
inline void put_cross_block(BlockMatrix8& M, int bi, int bj, const CVec3& v, cplx scale) {
    // (v x w)_i = eps_ijk v_j w_k
    M(bi + 0, bj + 1) = -scale * v.z;
    M(bi + 0, bj + 2) = scale * v.y;
    M(bi + 1, bj + 0) = scale * v.z;
    M(bi + 1, bj + 2) = -scale * v.x;
    M(bi + 2, bj + 0) = -scale * v.y;
    M(bi + 2, bj + 1) = scale * v.x;
}

inline void put_col_block(BlockMatrix8& M, int bi, int j, const CVec3& v, cplx scale) {
    for (int i = 0; i < 3; ++i) M(bi + i, j) = scale * v[i];
}

inline void put_row_block(BlockMatrix8& M, int i, int bj, const CVec3& v, cplx scale) {
    for (int j = 0; j < 3; ++j) M(i, bj + j) = scale * v[j];
}

}  // namespace slabcgo
