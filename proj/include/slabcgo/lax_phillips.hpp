#pragma once

#include <memory>

#include "slabcgo/forward.hpp"

namespace slabcgo {

/// Kernel tables are pure functions of (ModeSpec, SlabGrid); cached so each
/// coupling iteration reuses them.
struct KernelTableCache {
    std::vector<KernelTable> per_mode;  // index m (0..M)

    KernelTableCache() = default;
    KernelTableCache(const ModeSpec& spec, const SlabGrid& sg) {
        per_mode.resize(spec.M + 1);
        for (int m = 0; m <= spec.M; ++m) per_mode[m] = make_kernel_table(spec.km(m), sg);
    }
};

inline ModeStack solve_helmholtz_slab_modes_cached(const GridField& g, int comp, SlabBC bc,
                                                   const ModeSpec& spec, const SlabGrid& sg,
                                                   const KernelTableCache& cache) {
    const Parity par = (bc == SlabBC::dirichlet) ? Parity::sine : Parity::cosine;
    ModeStack gm = sine_cosine_expand(g, comp, par, spec.M, sg);
    ModeStack um = gm;
    for (int m = (par == Parity::sine ? 1 : 0); m <= spec.M; ++m)
        um.coef[m] = convolve_table(cache.per_mode[m], gm.coef[m], sg.nt);
    return um;
}

/// Everything one coupling solve needs: material, sampling grid, cutoff, the
/// factorized interior solver and the cached transverse kernels.
struct ForwardSetup {
    MaterialProfile mat;
    SlabGrid sg;
    ModeSpec spec;
    CutoffSpec cutoff;
    std::shared_ptr<YeeSolver> yee;
    KernelTableCache tables;

    ForwardSetup(const MaterialProfile& m, const SlabGrid& grid, const ModeSpec& sp,
                 const CutoffSpec& cut, double yee_half, int yee_nt, int yee_nz)
        : mat(m), sg(grid), spec(sp), cutoff(cut), tables(sp, grid) {
        yee = std::make_shared<YeeSolver>(-yee_half, yee_half, -yee_half, yee_half, grid.L,
                                          yee_nt, yee_nt, yee_nz, m.omega, mat);
    }

    ConstantMaxwellSolution constant_solve(const SourcePair& src) const {
        ConstantMaxwellSolution sol;
        sol.sg = sg;
        sol.spec = spec;
        sol.omega = mat.omega;
        sol.mu0 = mat.mu0;
        sol.eps0 = mat.eps0;
        sol.F1_nodes = src.f1;
        GridField G = helmholtz_rhs_G(src, mat.omega, mat.mu0, mat.eps0);
        auto comp_field = [&](const GridField& f, int c) {
            GridField out(f.grid, 1);
            for (std::size_t t = 0; t < out.data.size(); ++t) out.data[t] = f.data[t * 3 + c];
            return out;
        };
        GridField G1 = comp_field(G, 0), G2 = comp_field(G, 1), G3 = comp_field(G, 2);
        sol.Ex = solve_helmholtz_slab_modes_cached(G1, 0, SlabBC::dirichlet, spec, sg, tables);
        sol.Ey = solve_helmholtz_slab_modes_cached(G2, 0, SlabBC::dirichlet, spec, sg, tables);
        GridField divf2 = div_fd(src.f2);
        double bdata = 0;
        for (int i = 0; i < sg.nt; ++i)
            for (int j = 0; j < sg.nt; ++j)
                bdata = std::max({bdata, std::abs(divf2.at(0, i, j, 0)), std::abs(divf2.at(0, i, j, sg.nz))});
        if (bdata > 1e-13) {
            // nonzero Neumann data: fall back to the uncached full path
            return solve_constant_maxwell(src, spec, sg, mat.omega, mat.mu0, mat.eps0);
        }
        sol.Ez = solve_helmholtz_slab_modes_cached(G3, 0, SlabBC::neumann, spec, sg, tables);
        return sol;
    }
};

/// K(F) = (grad phi x (E2 - E1), grad phi x (H2 - H1)) on the sampling grid.
inline SourcePair apply_K(const ForwardSetup& fs, const SourcePair& src) {
    ConstantMaxwellSolution sol = fs.constant_solve(src);

    auto F1fn = [&](const Vec3& p) {
        return CVec3{interp_trilinear(src.f1, 0, p), interp_trilinear(src.f1, 1, p),
                     interp_trilinear(src.f1, 2, p)};
    };
    auto F2fn = [&](const Vec3& p) {
        return CVec3{interp_trilinear(src.f2, 0, p), interp_trilinear(src.f2, 1, p),
                     interp_trilinear(src.f2, 2, p)};
    };
    auto bc = [&](const Vec3& p, int c) { return sol.E_at(p)[c]; };
    Eigen::VectorXcd e2 = fs.yee->solve(bc, F1fn, F2fn);

    GridField E1 = sol.E_nodes();
    GridField H1 = sol.H_nodes();

    SourcePair out(fs.sg.grid());
    for (int i = 0; i < fs.sg.nt; ++i)
        for (int j = 0; j < fs.sg.nt; ++j)
            for (int k = 0; k <= fs.sg.nz; ++k) {
                Vec3 p{fs.sg.tx(i), fs.sg.tx(j), fs.sg.tz(k)};
                Vec3 gp = fs.cutoff.grad_phi(p);
                if (gp.x == 0 && gp.y == 0 && gp.z == 0) continue;
                CVec3 dE = fs.yee->E_at(e2, p) - E1.vec3(i, j, k);
                CVec3 dH = fs.yee->H_at(e2, F1fn, p) - H1.vec3(i, j, k);
                out.f1.set_vec3(i, j, k, cross(CVec3(gp), dE));
                out.f2.set_vec3(i, j, k, cross(CVec3(gp), dH));
            }
    return out;
}

struct LaxPhillipsResult {
    SourcePair f_tilde;
    GridField E, H;                 // assembled fields on the sampling grid
    int iterations = 0;
    std::vector<double> residual_history;
    double maxwell_residual = 0;    // of the assembled pair against the input sources
    double trace_gamma2 = 0;        // tangential E on Gamma2 (should vanish)
    bool converged = false;
};

/// GMRES (full memory) on the stacked source vector for (I + K) F~ = F,
/// warm-started at F~ = F since K is small.
inline LaxPhillipsResult solve_lax_phillips(const ForwardSetup& fs, const SourcePair& F,
                                            double tol = 1e-8, int max_iter = 25) {
    const std::size_t n = F.f1.data.size();
    auto pack = [&](const SourcePair& s) {
        Eigen::VectorXcd v(2 * n);
        for (std::size_t i = 0; i < n; ++i) { v[long(i)] = s.f1.data[i]; v[long(n + i)] = s.f2.data[i]; }
        return v;
    };
    auto unpack = [&](const Eigen::VectorXcd& v) {
        SourcePair s(F.f1.grid);
        for (std::size_t i = 0; i < n; ++i) { s.f1.data[i] = v[long(i)]; s.f2.data[i] = v[long(n + i)]; }
        return s;
    };
    auto apply_IK = [&](const Eigen::VectorXcd& v) {
        SourcePair s = unpack(v);
        SourcePair k = apply_K(fs, s);
        return v + pack(k);
    };

    LaxPhillipsResult res;
    Eigen::VectorXcd b = pack(F);
    Eigen::VectorXcd x = b;  // warm start
    Eigen::VectorXcd r = b - apply_IK(x);
    const double bnorm = std::max(b.norm(), 1e-300);
    double rnorm = r.norm();
    res.residual_history.push_back(rnorm / bnorm);

    std::vector<Eigen::VectorXcd> V;
    std::vector<std::vector<cplx>> Hm;  // Hessenberg columns
    std::vector<cplx> cs, sn, gvec;
    if (rnorm / bnorm > tol) {
        V.push_back(r / rnorm);
        gvec.push_back(rnorm);
        for (int it = 0; it < max_iter; ++it) {
            Eigen::VectorXcd w = apply_IK(V[it]);
            std::vector<cplx> h(it + 2, cplx(0));
            for (int i = 0; i <= it; ++i) {
                h[i] = V[i].dot(w);  // conjugate dot
                w -= h[i] * V[i];
            }
            h[it + 1] = w.norm();
            if (std::abs(h[it + 1]) < 1e-300) {
                Hm.push_back(h);
                res.iterations = it + 1;
                break;
            }
            V.push_back(w / h[it + 1]);
            // apply accumulated Givens rotations
            for (int i = 0; i < it; ++i) {
                cplx t = std::conj(cs[i]) * h[i] + std::conj(sn[i]) * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            double dn = std::sqrt(std::norm(h[it]) + std::norm(h[it + 1]));
            cs.push_back(h[it] / dn);
            sn.push_back(h[it + 1] / dn);
            h[it] = std::conj(cs[it]) * h[it] + std::conj(sn[it]) * h[it + 1];
            h[it + 1] = 0;
            Hm.push_back(h);
            gvec.push_back(-sn[it] * gvec[it]);
            gvec[it] = std::conj(cs[it]) * gvec[it];
            const double rn = std::abs(gvec[it + 1]);
            res.residual_history.push_back(rn / bnorm);
            res.iterations = it + 1;
            if (rn / bnorm <= tol) break;
        }
        // back-substitution for the least-squares coefficients
        const int m = res.iterations;
        std::vector<cplx> y(m);
        for (int i = m - 1; i >= 0; --i) {
            cplx s = gvec[i];
            for (int j = i + 1; j < m; ++j) s -= Hm[j][i] * y[j];
            y[i] = s / Hm[i][i];
        }
        for (int i = 0; i < m; ++i) x += y[i] * V[i];
    }
    res.converged = res.residual_history.back() <= tol;
    res.f_tilde = unpack(x);

    // assembled fields E = E1 - phi (E1 - E2), H likewise
    ConstantMaxwellSolution sol = fs.constant_solve(res.f_tilde);
    auto F1fn = [&](const Vec3& p) {
        return CVec3{interp_trilinear(res.f_tilde.f1, 0, p), interp_trilinear(res.f_tilde.f1, 1, p),
                     interp_trilinear(res.f_tilde.f1, 2, p)};
    };
    auto F2fn = [&](const Vec3& p) {
        return CVec3{interp_trilinear(res.f_tilde.f2, 0, p), interp_trilinear(res.f_tilde.f2, 1, p),
                     interp_trilinear(res.f_tilde.f2, 2, p)};
    };
    auto bc = [&](const Vec3& p, int c) { return sol.E_at(p)[c]; };
    Eigen::VectorXcd e2 = fs.yee->solve(bc, F1fn, F2fn);

    res.E = sol.E_nodes();
    res.H = sol.H_nodes();
    for (int i = 0; i < fs.sg.nt; ++i)
        for (int j = 0; j < fs.sg.nt; ++j)
            for (int k = 0; k <= fs.sg.nz; ++k) {
                Vec3 p{fs.sg.tx(i), fs.sg.tx(j), fs.sg.tz(k)};
                const double ph = fs.cutoff.phi(p);
                if (ph == 0.0) continue;
                CVec3 e1 = res.E.vec3(i, j, k), h1 = res.H.vec3(i, j, k);
                CVec3 e2v = fs.yee->E_at(e2, p), h2v = fs.yee->H_at(e2, F1fn, p);
                res.E.set_vec3(i, j, k, e1 - (e1 - e2v) * ph);
                res.H.set_vec3(i, j, k, h1 - (h1 - h2v) * ph);
            }

    // Maxwell residual of the assembled pair against the original sources
    GridField cE = curl_fd(res.E), cH = curl_fd(res.H);
    double num = 0, den = 0;
    for (int i = 2; i < fs.sg.nt - 2; ++i)
        for (int j = 2; j < fs.sg.nt - 2; ++j)
            for (int k = 1; k < fs.sg.nz; ++k) {
                Vec3 p{fs.sg.tx(i), fs.sg.tx(j), fs.sg.tz(k)};
                CVec3 r1 = cE.vec3(i, j, k) - res.H.vec3(i, j, k) * cplx(0, fs.mat.omega * 1.0) * fs.mat.mu_value(p) -
                           F.f1.vec3(i, j, k);
                CVec3 r2 = cH.vec3(i, j, k) + res.E.vec3(i, j, k) * cplx(0, fs.mat.omega) * fs.mat.gamma_value(p) -
                           F.f2.vec3(i, j, k);
                num += norm(r1) * norm(r1) + norm(r2) * norm(r2);
                CVec3 s1 = F.f1.vec3(i, j, k), s2 = F.f2.vec3(i, j, k);
                den += norm(s1) * norm(s1) + norm(s2) * norm(s2) +
                       std::norm(fs.mat.omega) * (norm(res.E.vec3(i, j, k)) * norm(res.E.vec3(i, j, k)) +
                                                  norm(res.H.vec3(i, j, k)) * norm(res.H.vec3(i, j, k)));
            }
    res.maxwell_residual = std::sqrt(num / std::max(den, 1e-300));

    double tr = 0;
    for (int i = 0; i < fs.sg.nt; ++i)
        for (int j = 0; j < fs.sg.nt; ++j) {
            CVec3 e = res.E.vec3(i, j, 0);
            tr = std::max({tr, std::abs(e.x), std::abs(e.y)});
        }
    res.trace_gamma2 = tr;
    return res;
}

}  // namespace slabcgo
