#pragma once

#include <functional>
#include <memory>
#include <random>

#include "slabcgo/algebra.hpp"
#include "slabcgo/fft.hpp"

namespace slabcgo {

/// Cubic periodic cell centered at the origin with node-registered grid
/// (node j at -S/2 + j h). The dual lattice used by shifted-symbol operations
/// is offset by half a dual spacing per axis to stay off symbol zero sets.
struct PeriodicCell {
    double side = 4.0;
    int n = 32;

    PeriodicCell() = default;
    PeriodicCell(double side_, int n_) : side(side_), n(n_) {
        if (n < 16) throw std::invalid_argument("cell needs at least 16 points per axis");
    }

    double h() const { return side / n; }
    Grid3 grid() const {
        Grid3 g;
        g.n = {n, n, n};
        g.h = {h(), h(), h()};
        g.x0 = {-side / 2, -side / 2, -side / 2};
        return g;
    }
    Vec3 dual_shift() const {
        const double d = M_PI / side;  // half of the dual spacing 2*pi/side
        return {d, d, d};
    }
};

/// Spectral workhorse bound to one cell; owns the FFT plan and cached phases.
class SpectralOps {
  public:
    explicit SpectralOps(const PeriodicCell& cell)
        : cell_(cell), g_(cell.grid()), fft_(std::make_unique<Fft3>(g_.n)) {
        freqs_ = fourier_freqs(cell.n, cell.h());
        const Vec3 dk = cell.dual_shift();
        shift_phase_.resize(g_.npts());
        for (int i = 0; i < g_.n[0]; ++i)
            for (int j = 0; j < g_.n[1]; ++j)
                for (int k = 0; k < g_.n[2]; ++k) {
                    Vec3 p = g_.pos(i, j, k);
                    shift_phase_[(std::size_t(i) * g_.n[1] + j) * g_.n[2] + k] =
                        std::exp(cplx(0, -(dk.x * p.x + dk.y * p.y + dk.z * p.z)));
                }
    }

    const PeriodicCell& cell() const { return cell_; }
    const Grid3& grid() const { return g_; }
    const std::vector<double>& freqs() const { return freqs_; }

    /// kappa vector at dual index (a,b,c), optionally shifted.
    Vec3 kappa(int a, int b, int c, bool shifted) const {
        Vec3 k{freqs_[a], freqs_[b], freqs_[c]};
        if (shifted) k = k + cell_.dual_shift();
        return k;
    }

    /// out_c(x) = IFFT[ sym(kappa) FFT[in_c] ] per component; `shifted` moves
    /// the whole computation to the offset dual lattice.
    void apply_symbol(GridField& f, const std::function<cplx(const Vec3&)>& sym, bool shifted) const {
        std::vector<cplx> table(g_.npts());
        std::size_t t = 0;
        for (int a = 0; a < g_.n[0]; ++a)
            for (int b = 0; b < g_.n[1]; ++b)
                for (int c = 0; c < g_.n[2]; ++c) table[t++] = sym(kappa(a, b, c, shifted));
        apply_symbol_table(f, table, shifted);
    }

    void apply_symbol_table(GridField& f, const std::vector<cplx>& table, bool shifted) const {
        const std::size_t np = g_.npts();
        for (int c = 0; c < f.ncomp; ++c) {
            cplx* buf = fft_->buffer();
            if (shifted)
                for (std::size_t i = 0; i < np; ++i) buf[i] = f.data[i * f.ncomp + c] * shift_phase_[i];
            else
                for (std::size_t i = 0; i < np; ++i) buf[i] = f.data[i * f.ncomp + c];
            fft_->forward();
            for (std::size_t i = 0; i < np; ++i) buf[i] *= table[i];
            fft_->inverse();
            if (shifted)
                for (std::size_t i = 0; i < np; ++i) f.data[i * f.ncomp + c] = buf[i] * std::conj(shift_phase_[i]);
            else
                for (std::size_t i = 0; i < np; ++i) f.data[i * f.ncomp + c] = buf[i];
        }
    }

    /// Spectral partial derivative d/dx_axis of every component.
    void derivative(GridField& f, int axis, bool shifted) const {
        apply_symbol(f, [axis](const Vec3& k) { return cplx(0, k[axis]); }, shifted);
    }

    GridField laplacian(const GridField& f, bool shifted) const {
        GridField out = f;
        apply_symbol(out, [](const Vec3& k) { return cplx(-dot(k, k), 0); }, shifted);
        out.backend = "spectral";
        return out;
    }

    /// P(i grad) on an 8-component field, realized in Fourier space.
    GridField apply_P(const GridField& f, bool shifted) const {
        assert(f.ncomp == 8);
        const std::size_t np = g_.npts();
        // forward-transform all eight components
        std::vector<std::vector<cplx>> hat(8, std::vector<cplx>(np));
        for (int c = 0; c < 8; ++c) {
            cplx* buf = fft_->buffer();
            if (shifted)
                for (std::size_t i = 0; i < np; ++i) buf[i] = f.data[i * 8 + c] * shift_phase_[i];
            else
                for (std::size_t i = 0; i < np; ++i) buf[i] = f.data[i * 8 + c];
            fft_->forward();
            std::copy(fft_->buffer(), fft_->buffer() + np, hat[c].begin());
        }
        // combine: P(i grad) e^{i kappa x} c = -e^{i kappa x} P(kappa) c
        GridField out(g_, 8);
        std::vector<std::vector<cplx>> ohat(8, std::vector<cplx>(np));
        std::size_t t = 0;
        for (int a = 0; a < g_.n[0]; ++a)
            for (int b = 0; b < g_.n[1]; ++b)
                for (int c = 0; c < g_.n[2]; ++c, ++t) {
                    const Vec3 kv = kappa(a, b, c, shifted);
                    Field8 u;
                    for (int q = 0; q < 8; ++q) u[q] = hat[q][t];
                    Field8 pu = symbol_P(CVec3(kv), u) * cplx(-1.0);
                    for (int q = 0; q < 8; ++q) ohat[q][t] = pu[q];
                }
        for (int c = 0; c < 8; ++c) {
            cplx* buf = fft_->buffer();
            std::copy(ohat[c].begin(), ohat[c].end(), buf);
            fft_->inverse();
            if (shifted)
                for (std::size_t i = 0; i < np; ++i) out.data[i * 8 + c] = buf[i] * std::conj(shift_phase_[i]);
            else
                for (std::size_t i = 0; i < np; ++i) out.data[i * 8 + c] = buf[i];
        }
        out.backend = "spectral";
        return out;
    }

  private:
    PeriodicCell cell_;
    Grid3 g_;
    std::unique_ptr<Fft3> fft_;
    std::vector<double> freqs_;
    std::vector<cplx> shift_phase_;
};

/// P(i grad) by 2nd-order centered differences on a bounded box (one-sided
/// 2nd-order stencils at faces). Rejects grids coarser than 4 points per
/// declared wavelength.
GridField apply_P_fd(const GridField& f, double declared_wavelength = 0.0);

inline GridField apply_P_fd(const GridField& f, double declared_wavelength) {
    assert(f.ncomp == 8);
    for (int a = 0; a < 3; ++a) {
        if (declared_wavelength > 0 && f.grid.h[a] > declared_wavelength / 4.0)
            throw std::invalid_argument("grid too coarse for declared wavelength");
        if (f.grid.n[a] < 3) throw std::invalid_argument("grid too small for centered differences");
    }
    GridField out(f.grid, 8);
    const cplx I(0, 1);
    for (int i = 0; i < f.grid.n[0]; ++i)
        for (int j = 0; j < f.grid.n[1]; ++j)
            for (int k = 0; k < f.grid.n[2]; ++k) {
                CVec3 grad_phi{fd_d(f, 0, i, j, k, 0), fd_d(f, 0, i, j, k, 1), fd_d(f, 0, i, j, k, 2)};
                CVec3 grad_psi{fd_d(f, 4, i, j, k, 0), fd_d(f, 4, i, j, k, 1), fd_d(f, 4, i, j, k, 2)};
                cplx div_h = fd_d(f, 1, i, j, k, 0) + fd_d(f, 2, i, j, k, 1) + fd_d(f, 3, i, j, k, 2);
                cplx div_e = fd_d(f, 5, i, j, k, 0) + fd_d(f, 6, i, j, k, 1) + fd_d(f, 7, i, j, k, 2);
                CVec3 curl_h{fd_d(f, 3, i, j, k, 1) - fd_d(f, 2, i, j, k, 2),
                             fd_d(f, 1, i, j, k, 2) - fd_d(f, 3, i, j, k, 0),
                             fd_d(f, 2, i, j, k, 0) - fd_d(f, 1, i, j, k, 1)};
                CVec3 curl_e{fd_d(f, 7, i, j, k, 1) - fd_d(f, 6, i, j, k, 2),
                             fd_d(f, 5, i, j, k, 2) - fd_d(f, 7, i, j, k, 0),
                             fd_d(f, 6, i, j, k, 0) - fd_d(f, 5, i, j, k, 1)};
                Field8 o;
                o.phi = I * div_e;
                o.h = (grad_psi - curl_e) * I;
                o.psi = I * div_h;
                o.e = (grad_phi + curl_h) * I;
                out.set_field8(i, j, k, o);
            }
    out.backend = "fd2";
    return out;
}

/// Smooth random periodic 8-field: a few low-order Fourier modes per component.
inline GridField random_trig_field8(const PeriodicCell& cell, int max_mode, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> mode(-max_mode, max_mode);
    std::normal_distribution<double> amp(0.0, 1.0);
    Grid3 g = cell.grid();
    GridField f(g, 8);
    const double base = 2.0 * M_PI / cell.side;
    for (int c = 0; c < 8; ++c) {
        for (int t = 0; t < 4; ++t) {
            Vec3 kv{base * mode(rng), base * mode(rng), base * mode(rng)};
            cplx a(amp(rng), amp(rng));
            for (int i = 0; i < g.n[0]; ++i)
                for (int j = 0; j < g.n[1]; ++j)
                    for (int k = 0; k < g.n[2]; ++k) {
                        Vec3 p = g.pos(i, j, k);
                        f.at(c, i, j, k) += a * std::exp(cplx(0, dot(kv, p)));
                    }
        }
    }
    return f;
}

/// Residual report for the factorization
/// (P(i grad) - W)(P(i grad) + W^T) u = (-Laplace + Qtilde) u.
struct FactorizationReport {
    int grid_n = 0;
    std::string backend = "spectral";
    double max_rel_residual = 0;
    std::array<double, 4> per_block_residuals{};  // phi, H, psi, E blocks
};

inline FactorizationReport check_factorization(const MaterialProfile& mat, const PeriodicCell& cell,
                                               int n_samples = 3, std::uint64_t seed = 11u) {
    SpectralOps ops(cell);
    const Grid3 g = cell.grid();
    // cache pointwise W / Wt / Qtilde action inputs
    FactorizationReport rep;
    rep.grid_n = cell.n;
    for (int s = 0; s < n_samples; ++s) {
        GridField u = random_trig_field8(cell, 2, seed + 7 * s);
        GridField pu = ops.apply_P(u, false);
        GridField inner = pu;  // (P + W^T) u
        for (int i = 0; i < g.n[0]; ++i)
            for (int j = 0; j < g.n[1]; ++j)
                for (int k = 0; k < g.n[2]; ++k) {
                    Vec3 p = g.pos(i, j, k);
                    inner.set_field8(i, j, k, inner.field8(i, j, k) + apply_Wt(mat, p, u.field8(i, j, k)));
                }
        GridField lhs = ops.apply_P(inner, false);
        for (int i = 0; i < g.n[0]; ++i)
            for (int j = 0; j < g.n[1]; ++j)
                for (int k = 0; k < g.n[2]; ++k) {
                    Vec3 p = g.pos(i, j, k);
                    lhs.set_field8(i, j, k, lhs.field8(i, j, k) - apply_W(mat, p, inner.field8(i, j, k)));
                }
        GridField rhs = ops.laplacian(u, false);
        rhs *= cplx(-1.0);
        for (int i = 0; i < g.n[0]; ++i)
            for (int j = 0; j < g.n[1]; ++j)
                for (int k = 0; k < g.n[2]; ++k) {
                    Vec3 p = g.pos(i, j, k);
                    rhs.set_field8(i, j, k, rhs.field8(i, j, k) + apply_Qtilde(mat, p, u.field8(i, j, k)));
                }
        double num = 0, den = 0;
        std::array<double, 4> bnum{}, bden{};
        auto block_of = [](int c) { return c == 0 ? 0 : (c < 4 ? 1 : (c == 4 ? 2 : 3)); };
        for (std::size_t i = 0; i < lhs.data.size(); ++i) {
            const double d2 = std::norm(lhs.data[i] - rhs.data[i]);
            const double r2 = std::norm(rhs.data[i]);
            num += d2; den += r2;
            int b = block_of(int(i % 8));
            bnum[b] += d2; bden[b] += r2;
        }
        rep.max_rel_residual = std::max(rep.max_rel_residual, std::sqrt(num / std::max(den, 1e-300)));
        for (int b = 0; b < 4; ++b)
            rep.per_block_residuals[b] = std::max(rep.per_block_residuals[b],
                                                  std::sqrt(bnum[b] / std::max(bden[b], 1e-300)));
    }
    return rep;
}

}  // namespace slabcgo
