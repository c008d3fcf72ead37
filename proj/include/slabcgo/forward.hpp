#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "slabcgo/greens.hpp"
#include "slabcgo/material.hpp"
#include "slabcgo/reflect.hpp"

namespace slabcgo {

/// Magnetic- and electric-equation sources (F1, F2), node-sampled.
struct SourcePair {
    GridField f1, f2;  // 3 components each, shared grid

    SourcePair() = default;
    explicit SourcePair(const Grid3& g) : f1(g, 3), f2(g, 3) {}

    SourcePair& operator+=(const SourcePair& o) { f1 += o.f1; f2 += o.f2; return *this; }
    SourcePair& operator-=(const SourcePair& o) { f1 -= o.f1; f2 -= o.f2; return *this; }
    double l2_norm() const {
        return std::sqrt(f1.l2_norm() * f1.l2_norm() + f2.l2_norm() * f2.l2_norm());
    }
};

/// C^2 radial cutoff: 1 on |x - c| <= R', 0 outside R''.
struct CutoffSpec {
    double R = 0.5, Rp = 0.7, Rpp = 0.95;
    Vec3 center{0, 0, 0.5};

    CutoffSpec() = default;
    CutoffSpec(double R_, double Rp_, double Rpp_, Vec3 c) : R(R_), Rp(Rp_), Rpp(Rpp_), center(c) {
        if (!(0 < R && R < Rp && Rp < Rpp)) throw std::invalid_argument("cutoff needs 0 < R < R' < R''");
    }

    static double smoothstep(double t) {  // quintic, C^2 at both ends
        if (t <= 0) return 0;
        if (t >= 1) return 1;
        return t * t * t * (10 + t * (-15 + 6 * t));
    }
    static double smoothstep_d(double t) {
        if (t <= 0 || t >= 1) return 0;
        return 30 * t * t * (1 - t) * (1 - t);
    }

    double phi(const Vec3& x) const {
        const double r = norm(x - center);
        return 1.0 - smoothstep((r - Rp) / (Rpp - Rp));
    }
    Vec3 grad_phi(const Vec3& x) const {
        const Vec3 d = x - center;
        const double r = norm(d);
        if (r <= Rp || r >= Rpp || r < 1e-14) return {};
        const double dp = -smoothstep_d((r - Rp) / (Rpp - Rp)) / (Rpp - Rp);
        return d * (dp / r);
    }
};

// ---------------------------------------------------------------------------
// grid calculus helpers (2nd-order centered, one-sided at faces)
// ---------------------------------------------------------------------------

inline GridField curl_fd(const GridField& f) {
    assert(f.ncomp == 3);
    GridField out(f.grid, 3);
    for (int i = 0; i < f.grid.n[0]; ++i)
        for (int j = 0; j < f.grid.n[1]; ++j)
            for (int k = 0; k < f.grid.n[2]; ++k) {
                CVec3 c{fd_d(f, 2, i, j, k, 1) - fd_d(f, 1, i, j, k, 2),
                        fd_d(f, 0, i, j, k, 2) - fd_d(f, 2, i, j, k, 0),
                        fd_d(f, 1, i, j, k, 0) - fd_d(f, 0, i, j, k, 1)};
                out.set_vec3(i, j, k, c);
            }
    out.backend = "fd2";
    return out;
}

inline GridField div_fd(const GridField& f) {
    assert(f.ncomp == 3);
    GridField out(f.grid, 1);
    for (int i = 0; i < f.grid.n[0]; ++i)
        for (int j = 0; j < f.grid.n[1]; ++j)
            for (int k = 0; k < f.grid.n[2]; ++k)
                out.at(0, i, j, k) =
                    fd_d(f, 0, i, j, k, 0) + fd_d(f, 1, i, j, k, 1) + fd_d(f, 2, i, j, k, 2);
    out.backend = "fd2";
    return out;
}

inline GridField grad_fd(const GridField& f) {
    assert(f.ncomp == 1);
    GridField out(f.grid, 3);
    for (int i = 0; i < f.grid.n[0]; ++i)
        for (int j = 0; j < f.grid.n[1]; ++j)
            for (int k = 0; k < f.grid.n[2]; ++k)
                out.set_vec3(i, j, k, {fd_d(f, 0, i, j, k, 0), fd_d(f, 0, i, j, k, 1), fd_d(f, 0, i, j, k, 2)});
    out.backend = "fd2";
    return out;
}

// ---------------------------------------------------------------------------
// trace lift and right-hand sides
// ---------------------------------------------------------------------------

using TangentialDatum = std::function<CVec3(double, double)>;  // (x, y) -> nu x E on Gamma1

/// E_o(x) = chi(x3) (f2(x'), -f1(x'), 0): nu x E_o reproduces the datum on
/// Gamma1 and vanishes on Gamma2; chi is 1 at x3 = L and 0 below L/2.
inline GridField trace_lift(const TangentialDatum& f, const SlabGrid& sg) {
    GridField out(sg.grid(), 3);
    for (int i = 0; i < sg.nt; ++i)
        for (int j = 0; j < sg.nt; ++j) {
            CVec3 d = f(sg.tx(i), sg.tx(j));
            if (std::abs(d.z) > 0)
                throw std::invalid_argument("trace_lift: datum must be tangential (zero x3 component)");
            for (int k = 0; k <= sg.nz; ++k) {
                const double chi = CutoffSpec::smoothstep((sg.tz(k) - sg.L / 2) / (sg.L / 2));
                out.set_vec3(i, j, k, CVec3{d.y, -d.x, 0} * chi);
            }
        }
    return out;
}

/// F1 = -curl E_o, F2 = -i omega gamma E_o.
inline SourcePair rhs_from_lift(const GridField& e_o, const MaterialProfile& mat, const SlabGrid& sg) {
    SourcePair src(e_o.grid);
    src.f1 = curl_fd(e_o);
    src.f1 *= cplx(-1.0);
    for (int i = 0; i < sg.nt; ++i)
        for (int j = 0; j < sg.nt; ++j)
            for (int k = 0; k <= sg.nz; ++k) {
                Vec3 p{sg.tx(i), sg.tx(j), sg.tz(k)};
                src.f2.set_vec3(i, j, k, e_o.vec3(i, j, k) * (-1.0i * mat.omega * mat.gamma_value(p)));
            }
    return src;
}

/// G = i omega mu0 F2 + curl F1 - (1/(i omega eps0)) grad div F2.
inline GridField helmholtz_rhs_G(const SourcePair& src, double omega, double mu0, double eps0) {
    GridField g = curl_fd(src.f1);
    GridField gd = grad_fd(div_fd(src.f2));
    const cplx a(0, omega * mu0);
    const cplx b = -1.0 / cplx(0, omega * eps0);
    for (std::size_t i = 0; i < g.data.size(); ++i)
        g.data[i] += a * src.f2.data[i] + b * gd.data[i];
    return g;
}

// ---------------------------------------------------------------------------
// constant-coefficient Maxwell solve in the slab (mode sums)
// ---------------------------------------------------------------------------

struct ConstantMaxwellSolution {
    SlabGrid sg;
    ModeSpec spec;
    double omega = 1, mu0 = 1, eps0 = 1;
    ModeStack Ex, Ey;        // sine stacks
    ModeStack Ez;            // cosine stack
    GridField Echeck;        // Neumann lift part of E3 (zero when the data vanish)
    GridField F1_nodes;      // kept for H recovery

    CVec3 E_at(const Vec3& p) const {
        auto interp = [&](const std::vector<cplx>& u, double x, double y) {
            double fx = (x - sg.tx(0)) / sg.ht(), fy = (y - sg.tx(0)) / sg.ht();
            int i0 = std::min(std::max(int(std::floor(fx)), 0), sg.nt - 2);
            int j0 = std::min(std::max(int(std::floor(fy)), 0), sg.nt - 2);
            double ax = fx - i0, ay = fy - j0;
            auto v = [&](int i, int j) { return u[std::size_t(i) * sg.nt + j]; };
            return (1 - ax) * (1 - ay) * v(i0, j0) + ax * (1 - ay) * v(i0 + 1, j0) +
                   (1 - ax) * ay * v(i0, j0 + 1) + ax * ay * v(i0 + 1, j0 + 1);
        };
        cplx ex = 0, ey = 0, ez = 0;
        for (int m = 1; m <= spec.M; ++m) {
            const double s = std::sin(m * M_PI * p.z / sg.L);
            ex += interp(Ex.coef[m], p.x, p.y) * s;
            ey += interp(Ey.coef[m], p.x, p.y) * s;
        }
        for (int m = 0; m <= spec.M; ++m)
            ez += interp(Ez.coef[m], p.x, p.y) * std::cos(m * M_PI * p.z / sg.L);
        // lift part of E3
        if (!Echeck.data.empty()) ez += interp_trilinear(Echeck, 0, p);
        return {ex, ey, ez};
    }

    GridField E_nodes() const {
        GridField out(sg.grid(), 3);
        for (int i = 0; i < sg.nt; ++i)
            for (int j = 0; j < sg.nt; ++j)
                for (int k = 0; k <= sg.nz; ++k) {
                    const double z = sg.tz(k);
                    cplx ez = Ez.synth(i, j, z);
                    if (!Echeck.data.empty()) ez += Echeck.at(0, i, j, k);
                    out.set_vec3(i, j, k, {Ex.synth(i, j, z), Ey.synth(i, j, z), ez});
                }
        out.backend = "mode-sum";
        return out;
    }

    /// H = (curl E - F1)/(i omega mu0); d/dz taken per mode (exact), transverse
    /// derivatives by centered differences of the mode coefficients.
    GridField H_nodes() const {
        GridField out(sg.grid(), 3);
        const double ht = sg.ht();
        auto ddx = [&](const std::vector<cplx>& u, int i, int j) {
            auto v = [&](int a, int b) { return u[std::size_t(a) * sg.nt + b]; };
            if (i == 0) return (-3.0 * v(0, j) + 4.0 * v(1, j) - v(2, j)) / (2 * ht);
            if (i == sg.nt - 1) return (3.0 * v(i, j) - 4.0 * v(i - 1, j) + v(i - 2, j)) / (2 * ht);
            return (v(i + 1, j) - v(i - 1, j)) / (2 * ht);
        };
        auto ddy = [&](const std::vector<cplx>& u, int i, int j) {
            auto v = [&](int a, int b) { return u[std::size_t(a) * sg.nt + b]; };
            if (j == 0) return (-3.0 * v(i, 0) + 4.0 * v(i, 1) - v(i, 2)) / (2 * ht);
            if (j == sg.nt - 1) return (3.0 * v(i, j) - 4.0 * v(i, j - 1) + v(i, j - 2)) / (2 * ht);
            return (v(i, j + 1) - v(i, j - 1)) / (2 * ht);
        };
        GridField curl(sg.grid(), 3);
        for (int i = 0; i < sg.nt; ++i)
            for (int j = 0; j < sg.nt; ++j)
                for (int k = 0; k <= sg.nz; ++k) {
                    const double z = sg.tz(k), L = sg.L;
                    cplx cx = 0, cy = 0, cz = 0;
                    for (int m = 1; m <= spec.M; ++m) {
                        const double s = std::sin(m * M_PI * z / L), c = std::cos(m * M_PI * z / L);
                        const double f = m * M_PI / L;
                        cx -= Ey.coef[m][std::size_t(i) * sg.nt + j] * f * c;  // -dz Ey
                        cy += Ex.coef[m][std::size_t(i) * sg.nt + j] * f * c;  // +dz Ex
                        cz += (ddx(Ey.coef[m], i, j) - ddy(Ex.coef[m], i, j)) * s;
                    }
                    for (int m = 0; m <= spec.M; ++m) {
                        const double c = std::cos(m * M_PI * z / L);
                        cx += ddy(Ez.coef[m], i, j) * c;
                        cy -= ddx(Ez.coef[m], i, j) * c;
                    }
                    curl.set_vec3(i, j, k, {cx, cy, cz});
                }
        if (!Echeck.data.empty()) {
            GridField lift_curl = curl_fd(lift_as_vec3());
            curl += lift_curl;
        }
        for (std::size_t t = 0; t < out.data.size(); ++t)
            out.data[t] = (curl.data[t] - F1_nodes.data[t]) / cplx(0, omega * mu0);
        out.backend = "mode-sum+fd2";
        return out;
    }

    /// Per-mode transverse field evaluated off-grid by direct kernel summation
    /// (used by the radiation-condition check on circles outside the box).
    std::function<cplx(double, double)> mode_evaluator(int m, int comp,
                                                       const GridField& G_nodes) const {
        // comp: 0 -> Ex (sine), 1 -> Ey (sine)
        const int nt = sg.nt;
        std::vector<cplx> gm(std::size_t(nt) * nt, cplx(0));
        const double hz = sg.hz();
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < nt; ++j) {
                cplx acc = 0;
                for (int k = 0; k <= sg.nz; ++k) {
                    const double w = (k == 0 || k == sg.nz) ? 0.5 * hz : hz;
                    acc += w * std::sin(m * M_PI * sg.tz(k) / sg.L) * G_nodes.at(comp, i, j, k);
                }
                gm[std::size_t(i) * nt + j] = acc * (2.0 / sg.L);
            }
        const cplx km = spec.km(m);
        const SlabGrid sgc = sg;
        return [gm, km, sgc, nt](double r, double theta) {
            const double x = r * std::cos(theta), y = r * std::sin(theta);
            cplx acc = 0;
            const double w = sgc.ht() * sgc.ht();
            for (int i = 0; i < nt; ++i)
                for (int j = 0; j < nt; ++j) {
                    const cplx gv = gm[std::size_t(i) * nt + j];
                    if (gv == 0.0) continue;
                    const double d = std::hypot(x - sgc.tx(i), y - sgc.tx(j));
                    acc += cplx(0, 0.25) * hankel_h01(km * d) * gv * w;
                }
            return acc;
        };
    }

  private:
    GridField lift_as_vec3() const {
        GridField v(sg.grid(), 3);
        for (int i = 0; i < sg.nt; ++i)
            for (int j = 0; j < sg.nt; ++j)
                for (int k = 0; k <= sg.nz; ++k) v.set_vec3(i, j, k, {0, 0, Echeck.at(0, i, j, k)});
        return v;
    }
};

/// Solves the constant-coefficient slab problem: components 1 and 2 through the
/// Dirichlet kernel, component 3 through a Neumann lift plus the cosine kernel.
inline ConstantMaxwellSolution solve_constant_maxwell(const SourcePair& src, const ModeSpec& spec,
                                                      const SlabGrid& sg, double omega, double mu0,
                                                      double eps0) {
    ConstantMaxwellSolution sol;
    sol.sg = sg;
    sol.spec = spec;
    sol.omega = omega;
    sol.mu0 = mu0;
    sol.eps0 = eps0;
    sol.F1_nodes = src.f1;

    GridField G = helmholtz_rhs_G(src, omega, mu0, eps0);

    // split components into scalar fields
    auto comp_field = [&](const GridField& f, int c) {
        GridField out(f.grid, 1);
        for (std::size_t t = 0; t < out.data.size(); ++t) out.data[t] = f.data[t * 3 + c];
        return out;
    };
    GridField G1 = comp_field(G, 0), G2 = comp_field(G, 1), G3 = comp_field(G, 2);

    sol.Ex = solve_helmholtz_slab_modes(G1, 0, SlabBC::dirichlet, spec, sg);
    sol.Ey = solve_helmholtz_slab_modes(G2, 0, SlabBC::dirichlet, spec, sg);

    // Neumann data for E3: d3 E3 = div F2 / (i omega eps0) on both planes
    GridField divf2 = div_fd(src.f2);
    bool has_data = false;
    GridField lift(sg.grid(), 1);
    for (int i = 0; i < sg.nt && !has_data; ++i)
        for (int j = 0; j < sg.nt && !has_data; ++j)
            if (std::abs(divf2.at(0, i, j, 0)) > 1e-14 || std::abs(divf2.at(0, i, j, sg.nz)) > 1e-14)
                has_data = true;
    if (has_data) {
        // Echeck(x) = chi_top(z) q_L(x') + chi_bot(z) q_0(x'), with d3 chi at the
        // matching plane equal to 1 and support away from the other plane
        const double L = sg.L;
        for (int i = 0; i < sg.nt; ++i)
            for (int j = 0; j < sg.nt; ++j) {
                cplx qL = divf2.at(0, i, j, sg.nz) / cplx(0, omega * eps0);
                cplx q0 = divf2.at(0, i, j, 0) / cplx(0, omega * eps0);
                for (int k = 0; k <= sg.nz; ++k) {
                    const double z = sg.tz(k);
                    const double ct = CutoffSpec::smoothstep((z - L / 2) / (L / 2)) * (z - L);
                    const double cb = CutoffSpec::smoothstep((L / 2 - z) / (L / 2)) * z;
                    lift.at(0, i, j, k) = ct * qL + cb * q0;
                }
            }
        sol.Echeck = lift;
        // rhs for the remainder: G3 + (Lap + k^2) Echeck
        GridField lap(sg.grid(), 1);
        const double k2 = spec.k * spec.k;
        for (int i = 0; i < sg.nt; ++i)
            for (int j = 0; j < sg.nt; ++j)
                for (int k = 0; k <= sg.nz; ++k) {
                    cplx l = 0;
                    // centered second differences, one-sided near faces
                    auto d2 = [&](int axis) {
                        int q[3] = {i, j, k};
                        const double h = lift.grid.h[axis];
                        const int n = lift.grid.n[axis];
                        auto at = [&](int s) {
                            int r[3] = {q[0], q[1], q[2]};
                            r[axis] += s;
                            return lift.at(0, r[0], r[1], r[2]);
                        };
                        if (q[axis] == 0) return (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
                        if (q[axis] == n - 1) return (2.0 * at(0) - 5.0 * at(-1) + 4.0 * at(-2) - at(-3)) / (h * h);
                        return (at(1) - 2.0 * at(0) + at(-1)) / (h * h);
                    };
                    l = d2(0) + d2(1) + d2(2);
                    G3.at(0, i, j, k) += l + k2 * lift.at(0, i, j, k);
                }
    }
    sol.Ez = solve_helmholtz_slab_modes(G3, 0, SlabBC::neumann, spec, sg);
    return sol;
}

// ---------------------------------------------------------------------------
// interior Yee (staggered-grid) solver with prescribed tangential E
// ---------------------------------------------------------------------------

class YeeSolver {
  public:
    // box [xa, xb] x [ya, yb] x [0, L] with (ncx, ncy, ncz) cells
    YeeSolver(double xa, double xb, double ya, double yb, double L, int ncx, int ncy, int ncz,
              double omega, const MaterialProfile& mat)
        : xa_(xa), ya_(ya), L_(L), ncx_(ncx), ncy_(ncy), ncz_(ncz),
          hx_((xb - xa) / ncx), hy_((yb - ya) / ncy), hz_(L / ncz), omega_(omega), mat_(&mat) {
        shapes_[0] = {ncx, ncy + 1, ncz + 1};
        shapes_[1] = {ncx + 1, ncy, ncz + 1};
        shapes_[2] = {ncx + 1, ncy + 1, ncz};
        offsets_[0] = 0;
        offsets_[1] = count(0);
        offsets_[2] = offsets_[1] + count(1);
        ntot_ = offsets_[2] + count(2);
        assemble();
    }

    std::size_t unknowns() const { return ntot_; }
    double inverse_norm_estimate() const { return inv_norm_est_; }

    Vec3 edge_pos(int c, int i, int j, int k) const {
        Vec3 p{xa_ + i * hx_, ya_ + j * hy_, k * hz_};
        if (c == 0) p.x += hx_ / 2;
        if (c == 1) p.y += hy_ / 2;
        if (c == 2) p.z += hz_ / 2;
        return p;
    }

    /// Solve with boundary tangential data bc(pos, comp) and node-sampled
    /// sources interpolated to edges/faces. Returns the edge coefficient vector.
    Eigen::VectorXcd solve(const std::function<cplx(const Vec3&, int)>& bc,
                           const std::function<CVec3(const Vec3&)>& F1,
                           const std::function<CVec3(const Vec3&)>& F2) const {
        Eigen::VectorXcd b(ntot_);
        for (int c = 0; c < 3; ++c) {
            const auto& s = shapes_[c];
            for (int i = 0; i < s[0]; ++i)
                for (int j = 0; j < s[1]; ++j)
                    for (int k = 0; k < s[2]; ++k) {
                        const std::size_t r = eidx(c, i, j, k);
                        const Vec3 p = edge_pos(c, i, j, k);
                        if (is_boundary_edge(c, i, j, k)) {
                            b[long(r)] = bc(p, c);
                        } else {
                            // i omega F2 + curl (mu^-1 F1) at the edge
                            cplx v = cplx(0, omega_) * F2(p)[c];
                            const int ia = (c + 1) % 3, ib = (c + 2) % 3;
                            const double d = 1e-3 * std::min({hx_, hy_, hz_});
                            auto m1f1 = [&](const Vec3& q) {
                                return F1(q) * (1.0 / mat_->mu_value(q));
                            };
                            Vec3 pa1 = p, pa2 = p, pb1 = p, pb2 = p;
                            pa1[ia] += d; pa2[ia] -= d;
                            pb1[ib] += d; pb2[ib] -= d;
                            v += (m1f1(pa1)[ib] - m1f1(pa2)[ib]) / (2 * d) -
                                 (m1f1(pb1)[ia] - m1f1(pb2)[ia]) / (2 * d);
                            b[long(r)] = v;
                        }
                    }
        }
        Eigen::VectorXcd x = lu_.solve(b);
        if (lu_.info() != Eigen::Success) throw std::runtime_error("interior solve failed");
        last_residual_ = (A_ * x - b).norm() / std::max(b.norm(), 1e-300);
        return x;
    }

    double last_residual() const { return last_residual_; }

    /// E at an arbitrary point by component-wise linear interpolation on the
    /// staggered arrays.
    CVec3 E_at(const Eigen::VectorXcd& x, const Vec3& p) const {
        CVec3 out;
        for (int c = 0; c < 3; ++c) out[c] = interp_edge(x, c, p);
        return out;
    }

    /// H recovered from the discrete magnetic equation at face centers, then
    /// interpolated: H = (curl_h E - F1)/(i omega mu).
    CVec3 H_at(const Eigen::VectorXcd& x, const std::function<CVec3(const Vec3&)>& F1,
               const Vec3& p) const {
        CVec3 out;
        for (int c = 0; c < 3; ++c) out[c] = interp_face(x, F1, c, p);
        return out;
    }

  private:
    double xa_, ya_, L_;
    int ncx_, ncy_, ncz_;
    double hx_, hy_, hz_;
    double omega_;
    const MaterialProfile* mat_;
    std::array<std::array<int, 3>, 3> shapes_;
    std::array<std::size_t, 3> offsets_;
    std::size_t ntot_ = 0;
    Eigen::SparseMatrix<cplx> A_;
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu_;
    double inv_norm_est_ = 0;
    mutable double last_residual_ = 0;

    std::size_t count(int c) const {
        return std::size_t(shapes_[c][0]) * shapes_[c][1] * shapes_[c][2];
    }
    std::size_t eidx(int c, int i, int j, int k) const {
        const auto& s = shapes_[c];
        return offsets_[c] + (std::size_t(i) * s[1] + j) * s[2] + k;
    }
    bool is_boundary_edge(int c, int i, int j, int k) const {
        const auto& s = shapes_[c];
        if (c == 0) return j == 0 || j == s[1] - 1 || k == 0 || k == s[2] - 1;
        if (c == 1) return i == 0 || i == s[0] - 1 || k == 0 || k == s[2] - 1;
        return i == 0 || i == s[0] - 1 || j == 0 || j == s[1] - 1;
    }
    Vec3 face_pos(int c, int i, int j, int k) const {
        Vec3 p{xa_ + i * hx_, ya_ + j * hy_, k * hz_};
        if (c == 0) { p.y += hy_ / 2; p.z += hz_ / 2; }
        if (c == 1) { p.x += hx_ / 2; p.z += hz_ / 2; }
        if (c == 2) { p.x += hx_ / 2; p.y += hy_ / 2; }
        return p;
    }

    void assemble() {
        std::vector<Eigen::Triplet<cplx>> trip;
        trip.reserve(13 * ntot_);
        const double hx = hx_, hy = hy_, hz = hz_;
        auto muinv = [&](int c, int i, int j, int k) {
            return 1.0 / mat_->mu_value(face_pos(c, i, j, k));
        };
        auto add = [&](std::size_t r, std::size_t c, cplx v) {
            trip.emplace_back(long(r), long(c), v);
        };
        for (int c = 0; c < 3; ++c) {
            const auto& s = shapes_[c];
            for (int i = 0; i < s[0]; ++i)
                for (int j = 0; j < s[1]; ++j)
                    for (int k = 0; k < s[2]; ++k) {
                        const std::size_t r = eidx(c, i, j, k);
                        if (is_boundary_edge(c, i, j, k)) {
                            add(r, r, 1.0);
                            continue;
                        }
                        if (c == 0) {
                            for (auto [jj, sgn] : {std::pair{j, 1.0}, {j - 1, -1.0}}) {
                                const cplx m = muinv(2, i, jj, k);
                                const double coef = sgn / hy;
                                add(r, eidx(1, i + 1, jj, k), coef * m / hx);
                                add(r, eidx(1, i, jj, k), -coef * m / hx);
                                add(r, eidx(0, i, jj + 1, k), -coef * m / hy);
                                add(r, eidx(0, i, jj, k), coef * m / hy);
                            }
                            for (auto [kk, sgn] : {std::pair{k, -1.0}, {k - 1, 1.0}}) {
                                const cplx m = muinv(1, i, j, kk);
                                const double coef = sgn / hz;
                                add(r, eidx(0, i, j, kk + 1), coef * m / hz);
                                add(r, eidx(0, i, j, kk), -coef * m / hz);
                                add(r, eidx(2, i + 1, j, kk), -coef * m / hx);
                                add(r, eidx(2, i, j, kk), coef * m / hx);
                            }
                        } else if (c == 1) {
                            for (auto [kk, sgn] : {std::pair{k, 1.0}, {k - 1, -1.0}}) {
                                const cplx m = muinv(0, i, j, kk);
                                const double coef = sgn / hz;
                                add(r, eidx(2, i, j + 1, kk), coef * m / hy);
                                add(r, eidx(2, i, j, kk), -coef * m / hy);
                                add(r, eidx(1, i, j, kk + 1), -coef * m / hz);
                                add(r, eidx(1, i, j, kk), coef * m / hz);
                            }
                            for (auto [ii, sgn] : {std::pair{i, -1.0}, {i - 1, 1.0}}) {
                                const cplx m = muinv(2, ii, j, k);
                                const double coef = sgn / hx;
                                add(r, eidx(1, ii + 1, j, k), coef * m / hx);
                                add(r, eidx(1, ii, j, k), -coef * m / hx);
                                add(r, eidx(0, ii, j + 1, k), -coef * m / hy);
                                add(r, eidx(0, ii, j, k), coef * m / hy);
                            }
                        } else {
                            for (auto [ii, sgn] : {std::pair{i, 1.0}, {i - 1, -1.0}}) {
                                const cplx m = muinv(1, ii, j, k);
                                const double coef = sgn / hx;
                                add(r, eidx(0, ii, j, k + 1), coef * m / hz);
                                add(r, eidx(0, ii, j, k), -coef * m / hz);
                                add(r, eidx(2, ii + 1, j, k), -coef * m / hx);
                                add(r, eidx(2, ii, j, k), coef * m / hx);
                            }
                            for (auto [jj, sgn] : {std::pair{j, -1.0}, {j - 1, 1.0}}) {
                                const cplx m = muinv(0, i, jj, k);
                                const double coef = sgn / hy;
                                add(r, eidx(2, i, jj + 1, k), coef * m / hy);
                                add(r, eidx(2, i, jj, k), -coef * m / hy);
                                add(r, eidx(1, i, jj, k + 1), -coef * m / hz);
                                add(r, eidx(1, i, jj, k), coef * m / hz);
                            }
                        }
                        const Vec3 p = edge_pos(c, i, j, k);
                        add(r, r, -omega_ * omega_ * mat_->gamma_value(p));
                    }
        }
        A_.resize(long(ntot_), long(ntot_));
        A_.setFromTriplets(trip.begin(), trip.end());
        A_.makeCompressed();
        lu_.compute(A_);
        if (lu_.info() != Eigen::Success)
            throw std::runtime_error("interior matrix factorization failed (omega near an eigenvalue?)");
        // crude inverse-norm probe: solve with a unit random vector; a huge
        // solution flags eigenvalue proximity of the discretized problem
        Eigen::VectorXcd probe = Eigen::VectorXcd::Random(long(ntot_));
        probe.normalize();
        inv_norm_est_ = lu_.solve(probe).norm();
    }

    cplx interp_edge(const Eigen::VectorXcd& x, int c, const Vec3& p) const {
        // fractional index in the staggered array of component c
        double fx = (p.x - xa_) / hx_, fy = (p.y - ya_) / hy_, fz = p.z / hz_;
        if (c == 0) fx -= 0.5;
        if (c == 1) fy -= 0.5;
        if (c == 2) fz -= 0.5;
        const auto& s = shapes_[c];
        int i0 = std::min(std::max(int(std::floor(fx)), 0), s[0] - 2);
        int j0 = std::min(std::max(int(std::floor(fy)), 0), s[1] - 2);
        int k0 = std::min(std::max(int(std::floor(fz)), 0), s[2] - 2);
        double ax = fx - i0, ay = fy - j0, az = fz - k0;
        cplx v = 0;
        for (int di = 0; di < 2; ++di)
            for (int dj = 0; dj < 2; ++dj)
                for (int dk = 0; dk < 2; ++dk)
                    v += (di ? ax : 1 - ax) * (dj ? ay : 1 - ay) * (dk ? az : 1 - az) *
                         x[long(eidx(c, i0 + di, j0 + dj, k0 + dk))];
        return v;
    }

    cplx face_H(const Eigen::VectorXcd& x, const std::function<CVec3(const Vec3&)>& F1, int c,
                int i, int j, int k) const {
        // curl E at the H-face minus F1, divided by i omega mu
        cplx curl;
        if (c == 0)
            curl = (x[long(eidx(2, i, j + 1, k))] - x[long(eidx(2, i, j, k))]) / hy_ -
                   (x[long(eidx(1, i, j, k + 1))] - x[long(eidx(1, i, j, k))]) / hz_;
        else if (c == 1)
            curl = (x[long(eidx(0, i, j, k + 1))] - x[long(eidx(0, i, j, k))]) / hz_ -
                   (x[long(eidx(2, i + 1, j, k))] - x[long(eidx(2, i, j, k))]) / hx_;
        else
            curl = (x[long(eidx(1, i + 1, j, k))] - x[long(eidx(1, i, j, k))]) / hx_ -
                   (x[long(eidx(0, i, j + 1, k))] - x[long(eidx(0, i, j, k))]) / hy_;
        const Vec3 p = face_pos(c, i, j, k);
        return (curl - F1(p)[c]) / (cplx(0, omega_) * mat_->mu_value(p));
    }

    cplx interp_face(const Eigen::VectorXcd& x, const std::function<CVec3(const Vec3&)>& F1, int c,
                     const Vec3& p) const {
        double fx = (p.x - xa_) / hx_, fy = (p.y - ya_) / hy_, fz = p.z / hz_;
        if (c != 0) fx -= 0.5;
        if (c != 1) fy -= 0.5;
        if (c != 2) fz -= 0.5;
        std::array<int, 3> fs;
        fs[0] = (c == 0) ? ncx_ + 1 : ncx_;
        fs[1] = (c == 1) ? ncy_ + 1 : ncy_;
        fs[2] = (c == 2) ? ncz_ + 1 : ncz_;
        int i0 = std::min(std::max(int(std::floor(fx)), 0), fs[0] - 2);
        int j0 = std::min(std::max(int(std::floor(fy)), 0), fs[1] - 2);
        int k0 = std::min(std::max(int(std::floor(fz)), 0), fs[2] - 2);
        double ax = fx - i0, ay = fy - j0, az = fz - k0;
        cplx v = 0;
        for (int di = 0; di < 2; ++di)
            for (int dj = 0; dj < 2; ++dj)
                for (int dk = 0; dk < 2; ++dk)
                    v += (di ? ax : 1 - ax) * (dj ? ay : 1 - ay) * (dk ? az : 1 - az) *
                         face_H(x, F1, c, i0 + di, j0 + dj, k0 + dk);
        return v;
    }
};

}  // namespace slabcgo
