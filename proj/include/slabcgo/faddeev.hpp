#pragma once

#include "slabcgo/phase.hpp"
#include "slabcgo/spectral.hpp"

namespace slabcgo {

/// Q = k^2 + Qtilde cached at the support nodes only (it vanishes elsewhere).
struct QField {
    Grid3 grid;
    std::vector<std::pair<std::size_t, BlockMatrix8>> entries;

    void apply(const GridField& in, GridField& out) const {
        std::fill(out.data.begin(), out.data.end(), cplx(0));
        for (const auto& [idx, Q] : entries) {
            const cplx* p = &in.data[idx * 8];
            Field8 u{p[0], {p[1], p[2], p[3]}, p[4], {p[5], p[6], p[7]}};
            Field8 v = Q.apply(u);
            cplx* o = &out.data[idx * 8];
            for (int c = 0; c < 8; ++c) o[c] = v[c];
        }
    }
    void apply_const(const Field8& u, GridField& out) const {
        std::fill(out.data.begin(), out.data.end(), cplx(0));
        for (const auto& [idx, Q] : entries) {
            Field8 v = Q.apply(u);
            cplx* o = &out.data[idx * 8];
            for (int c = 0; c < 8; ++c) o[c] = v[c];
        }
    }
};

inline QField build_Q_field(const MaterialProfile& mat, const PeriodicCell& cell) {
    QField qf;
    qf.grid = cell.grid();
    const double k = mat.k_background();
    Vec3 lo, hi;
    mat.support_box(lo, hi);
    for (int i = 0; i < qf.grid.n[0]; ++i)
        for (int j = 0; j < qf.grid.n[1]; ++j)
            for (int kk = 0; kk < qf.grid.n[2]; ++kk) {
                Vec3 p = qf.grid.pos(i, j, kk);
                if (p.x < lo.x || p.x > hi.x || p.y < lo.y || p.y > hi.y || p.z < lo.z || p.z > hi.z)
                    continue;
                BlockMatrix8 Q = assemble_Qtilde(mat, p);
                for (int c = 0; c < 8; ++c) Q(c, c) += k * k;
                double mag = 0;
                for (int a = 0; a < 8; ++a)
                    for (int b = 0; b < 8; ++b) mag += std::norm(Q(a, b));
                const std::size_t idx = (std::size_t(i) * qf.grid.n[1] + j) * qf.grid.n[2] + kk;
                if (mag > 1e-28) qf.entries.push_back({idx, Q});
            }
    return qf;
}

/// Fourier multiplier 1/(|kappa|^2 + 2 zeta.kappa) on the offset dual lattice.
struct ConjugatedMultiplier {
    std::vector<cplx> table;   // multiplier values per dual node
    std::vector<cplx> den;     // denominators (the conjugated symbol itself)
    double min_abs_den = 0;
};

inline ConjugatedMultiplier conjugated_multiplier(const CVec3& zeta, const SpectralOps& ops,
                                                  double reject_threshold_scale = 1e-8) {
    ConjugatedMultiplier m;
    const auto& g = ops.grid();
    m.table.resize(g.npts());
    m.den.resize(g.npts());
    double mind = 1e300;
    std::size_t t = 0;
    for (int a = 0; a < g.n[0]; ++a)
        for (int b = 0; b < g.n[1]; ++b)
            for (int c = 0; c < g.n[2]; ++c, ++t) {
                Vec3 kv = ops.kappa(a, b, c, true);
                cplx d = dot(kv, kv) + 2.0 * dot(zeta, CVec3(kv));
                m.den[t] = d;
                m.table[t] = 1.0 / d;
                mind = std::min(mind, std::abs(d));
            }
    m.min_abs_den = mind;
    const double tau_scale = norm(zeta) / std::sqrt(2.0);
    if (mind < reject_threshold_scale * tau_scale)
        throw std::runtime_error("conjugated multiplier: dual lattice hits the symbol zero set; "
                                 "choose a different offset or jitter the cell size");
    return m;
}

/// Corrector psi = Z_{-1} + Z_r of the conjugated Schroedinger equation,
/// obtained by fixed-point iteration of psi = -m(D) (Q (Z0 + psi)).
struct CorrectorResult {
    GridField psi;   // full corrector
    GridField zm1;   // first Born term
    GridField zr;    // psi - zm1
    int iterations = 0;
    double residual = 0;       // relative residual of the conjugated equation
    double min_abs_den = 0;
    bool converged = false;
    std::vector<double> history;
};

inline CorrectorResult solve_corrector(const QField& qf, const CVec3& zeta, const Field8& z0,
                                       const SpectralOps& ops, double tol = 1e-8, int max_iter = 200) {
    const Grid3 g = ops.grid();
    ConjugatedMultiplier mult = conjugated_multiplier(zeta, ops);

    CorrectorResult res;
    res.min_abs_den = mult.min_abs_den;

    GridField work(g, 8);
    qf.apply_const(z0, work);
    ops.apply_symbol_table(work, mult.table, true);
    work *= cplx(-1.0);
    res.zm1 = work;

    GridField psi = res.zm1;
    GridField total(g, 8);
    for (int it = 1; it <= max_iter; ++it) {
        // total = Z0 + psi
        for (std::size_t i = 0; i < g.npts(); ++i)
            for (int c = 0; c < 8; ++c) total.data[i * 8 + c] = z0[c] + psi.data[i * 8 + c];
        qf.apply(total, work);
        ops.apply_symbol_table(work, mult.table, true);
        work *= cplx(-1.0);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < work.data.size(); ++i) {
            num += std::norm(work.data[i] - psi.data[i]);
            den += std::norm(work.data[i]);
        }
        psi = work;
        res.iterations = it;
        const double upd = std::sqrt(num / std::max(den, 1e-300));
        res.history.push_back(upd);
        if (upd < tol) { res.converged = true; break; }
    }
    // equation residual: (-Lap - 2 i zeta.grad) psi + Q (Z0 + psi), spectrally
    for (std::size_t i = 0; i < g.npts(); ++i)
        for (int c = 0; c < 8; ++c) total.data[i * 8 + c] = z0[c] + psi.data[i * 8 + c];
    GridField qtot(g, 8);
    qf.apply(total, qtot);
    GridField lhs = psi;
    ops.apply_symbol_table(lhs, mult.den, true);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < lhs.data.size(); ++i) {
        num += std::norm(lhs.data[i] + qtot.data[i]);
        den += std::norm(qtot.data[i]);
    }
    res.residual = std::sqrt(num / std::max(den, 1e-300));
    res.psi = psi;
    res.zr = psi;
    res.zr -= res.zm1;
    return res;
}

/// || 2 i (zhat.grad)(tau zm1) - Q Mhat || / || Q Mhat ||, the finite-tau
/// residual of the transport identity satisfied by Rhat = lim tau Zm1.
struct LimitRResidual {
    double value = 0;
    bool absolute = false;  // true when ||Q Mhat|| = 0
};

inline LimitRResidual limit_R_residual(const CorrectorResult& res, const QField& qf,
                                       const CVec3& zeta_hat, const Field8& m_hat,
                                       double tau, const SpectralOps& ops) {
    const Grid3 g = ops.grid();
    GridField d = res.zm1;
    d *= cplx(tau);
    ops.apply_symbol(d, [&](const Vec3& kv) { return 2.0i * (cplx(0, 1) * dot(zeta_hat, CVec3(kv))); }, true);
    GridField qm(g, 8);
    qf.apply_const(m_hat, qm);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < d.data.size(); ++i) {
        num += std::norm(d.data[i] - qm.data[i]);
        den += std::norm(qm.data[i]);
    }
    LimitRResidual out;
    if (den < 1e-280) {
        out.absolute = true;
        out.value = std::sqrt(num * g.cell_volume());
    } else {
        out.value = std::sqrt(num / den);
    }
    return out;
}

/// Phase-stripped full first-order field Y = (P(i grad) + W^T) Z, stored as
/// e^{-i zeta.x} Y; also reports the relative residual of (P - W) Y = 0 and
/// the mass fraction carried by the scalar blocks.
struct FullYResult {
    GridField amp;          // 8-component amplitude, phase-stripped
    double maxwell_residual = 0;
    double scalar_fraction = 0;
};

inline FullYResult build_full_Y(const CorrectorResult& res, const PhasePair& pp, int which,
                                const Field8& z0, const MaterialProfile& mat, const SpectralOps& ops) {
    const Grid3 g = ops.grid();
    const CVec3& zeta = (which == 1) ? pp.zeta1 : pp.zeta2;

    GridField amp = ops.apply_P(res.psi, true);  // P(i grad) psi ; P of the constant Z0 is 0
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                Vec3 p = g.pos(i, j, k);
                Field8 tot = res.psi.field8(i, j, k);
                for (int c = 0; c < 8; ++c) tot[c] += z0[c];
                Field8 v = amp.field8(i, j, k) - symbol_P(zeta, tot) + apply_Wt(mat, p, tot);
                amp.set_field8(i, j, k, v);
            }

    FullYResult out;
    // residual of (P(i grad) - W) Y in phase-stripped form:
    //   P(i grad)(amp - C) - P(zeta) amp - W amp, with C the constant layer.
    const double kbg = mat.k_background();
    Field8 C = -symbol_P(zeta, z0) + z0 * cplx(kbg);
    GridField var = amp;
    for (std::size_t i = 0; i < g.npts(); ++i)
        for (int c = 0; c < 8; ++c) var.data[i * 8 + c] -= C[c];
    GridField r = ops.apply_P(var, true);
    double num = 0, den = 0, scal = 0, tot2 = 0;
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                Vec3 p = g.pos(i, j, k);
                Field8 a = amp.field8(i, j, k);
                Field8 rv = r.field8(i, j, k) - symbol_P(zeta, a) - apply_W(mat, p, a);
                num += norm(rv) * norm(rv);
                den += norm(a) * norm(a);
                scal += std::norm(a.phi) + std::norm(a.psi);
                tot2 += norm(a) * norm(a);
            }
    out.maxwell_residual = std::sqrt(num / std::max(den, 1e-300)) / (norm(zeta) + kbg);
    out.scalar_fraction = std::sqrt(scal / std::max(tot2, 1e-300));
    out.amp = std::move(amp);
    return out;
}

}  // namespace slabcgo
