#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slabcgo/core.hpp"

namespace slabcgo {

/// Radial bump shapes used to build material profiles. Both kinds have
/// closed-form first and second radial derivatives and exactly compact
/// support (gaussians are truncated where the tail is below 1e-14).
struct Bump {
    enum class Kind { gaussian, poly };
    Kind kind = Kind::gaussian;
    Vec3 center{};
    double width = 0.3;     // sigma for gaussian, support radius for poly
    cplx amplitude = 0.1;   // relative to the background value
    int poly_order = 5;     // exponent p in (1 - s^2)^p

    double support_radius() const {
        return kind == Kind::gaussian ? 8.0 * width : width;
    }

    // f(r), f'(r), f''(r) of the unit-amplitude shape
    void radial(double r, double& f, double& fp, double& fpp) const {
        if (kind == Kind::gaussian) {
            if (r >= support_radius()) { f = fp = fpp = 0; return; }
            const double s2 = width * width;
            f = std::exp(-r * r / (2 * s2));
            fp = -r / s2 * f;
            fpp = (r * r / (s2 * s2) - 1.0 / s2) * f;
        } else {
            const double R = width;
            if (r >= R) { f = fp = fpp = 0; return; }
            const double s = r / R;
            const double one = 1 - s * s;
            const int p = poly_order;
            double powm2 = std::pow(one, p - 2);
            f = powm2 * one * one;
            fp = -2.0 * p * s * powm2 * one / R;
            fpp = (-2.0 * p * powm2 * one + 4.0 * p * (p - 1) * s * s * powm2) / (R * R);
        }
    }
};

/// Scalar field value with gradient and hessian (of the log of the parameter).
struct LogDerivs {
    cplx value;      // parameter value itself
    CVec3 grad_log;  // grad log(value)
    std::array<std::array<cplx, 3>, 3> hess_log;  // hessian of log(value)
    cplx lap_log() const { return hess_log[0][0] + hess_log[1][1] + hess_log[2][2]; }
};

namespace detail {

// background * (1 + sum of bumps); returns value/grad/hess of the sum itself
inline void bump_sum(const std::vector<Bump>& bumps, const Vec3& x, cplx& f, CVec3& g,
                     std::array<std::array<cplx, 3>, 3>& H) {
    f = 0; g = {};
    for (auto& r : H) r = {};
    for (const auto& b : bumps) {
        const Vec3 d = x - b.center;
        const double r = norm(d);
        double fr, fpr, fppr;
        b.radial(r, fr, fpr, fppr);
        if (fr == 0 && fpr == 0 && fppr == 0) continue;
        f += b.amplitude * fr;
        if (r > 1e-12) {
            const Vec3 rhat = d / r;
            for (int i = 0; i < 3; ++i) g[i] += b.amplitude * fpr * rhat[i];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double t = (fppr - fpr / r) * rhat[i] * rhat[j] + (i == j ? fpr / r : 0.0);
                    H[i][j] += b.amplitude * t;
                }
        } else {
            for (int i = 0; i < 3; ++i) H[i][i] += b.amplitude * fppr;
        }
    }
}

}  // namespace detail

/// Material parameters mu, gamma = eps + i sigma/omega over R^3: constant
/// backgrounds plus compactly supported bumps. Exposes analytic value,
/// grad log and hessian log for both parameters, plus kappa and its gradient.
class MaterialProfile {
  public:
    double mu0 = 1.0;
    double eps0 = 1.0;
    double omega = 1.0;
    std::vector<Bump> mu_bumps;
    std::vector<Bump> gamma_bumps;
    bool conjugate_gamma = false;  // evaluate with conj(gamma) (the "checked" potentials)

    MaterialProfile() = default;
    MaterialProfile(double mu0_, double eps0_, double omega_) : mu0(mu0_), eps0(eps0_), omega(omega_) {
        if (omega <= 0 || mu0 <= 0 || eps0 <= 0) throw std::invalid_argument("backgrounds and omega must be positive");
    }

    double k_background() const { return omega * std::sqrt(mu0 * eps0); }

    MaterialProfile conjugated() const {
        MaterialProfile p = *this;
        p.conjugate_gamma = !p.conjugate_gamma;
        return p;
    }

    LogDerivs mu(const Vec3& x) const {
        cplx f; CVec3 g; std::array<std::array<cplx, 3>, 3> H;
        detail::bump_sum(mu_bumps, x, f, g, H);
        return finish(mu0, f, g, H, false);
    }

    LogDerivs gamma(const Vec3& x) const {
        cplx f; CVec3 g; std::array<std::array<cplx, 3>, 3> H;
        detail::bump_sum(gamma_bumps, x, f, g, H);
        return finish(eps0, f, g, H, conjugate_gamma);
    }

    cplx mu_value(const Vec3& x) const { return mu(x).value; }
    cplx gamma_value(const Vec3& x) const { return gamma(x).value; }

    cplx kappa(const Vec3& x) const {
        return omega * std::sqrt(mu_value(x) * gamma_value(x));
    }
    /// grad kappa = (kappa/2)(alpha + beta)
    CVec3 grad_kappa(const Vec3& x) const {
        auto m = mu(x); auto g = gamma(x);
        cplx kap = omega * std::sqrt(m.value * g.value);
        CVec3 s = m.grad_log + g.grad_log;
        return s * (kap * 0.5);
    }

    /// Axis-aligned support box of all bumps.
    void support_box(Vec3& lo, Vec3& hi) const {
        lo = {1e30, 1e30, 1e30}; hi = {-1e30, -1e30, -1e30};
        auto acc = [&](const std::vector<Bump>& bs) {
            for (const auto& b : bs) {
                const double R = b.support_radius();
                for (int i = 0; i < 3; ++i) {
                    lo[i] = std::min(lo[i], b.center[i] - R);
                    hi[i] = std::max(hi[i], b.center[i] + R);
                }
            }
        };
        acc(mu_bumps); acc(gamma_bumps);
        if (lo.x > hi.x) { lo = {}; hi = {}; }
    }

    /// Re(gamma) > 0 everywhere requires |amplitude| sum < 1 in the worst case;
    /// a cheap sampled check at bump centers and midpoints.
    void validate() const {
        for (const auto& b : gamma_bumps) {
            cplx g = gamma_value(b.center);
            if (g.real() <= 0) throw std::invalid_argument("Re(gamma) must stay positive");
            if (g.real() < 0 && g.imag() != 0) throw std::invalid_argument("gamma crosses the negative real axis");
        }
        for (const auto& b : mu_bumps) {
            if (mu_value(b.center).real() <= 0) throw std::invalid_argument("Re(mu) must stay positive");
        }
    }

  private:
    static LogDerivs finish(double bg, cplx f, const CVec3& g,
                            const std::array<std::array<cplx, 3>, 3>& H, bool conj_it) {
        LogDerivs out;
        cplx val = bg * (1.0 + f);
        CVec3 gv = g * cplx(bg);
        // log derivatives: grad log v = grad v / v ; hess log = hess v / v - (grad v)(grad v)^T / v^2
        out.value = val;
        for (int i = 0; i < 3; ++i) out.grad_log[i] = gv[i] / val;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                out.hess_log[i][j] = cplx(bg) * H[i][j] / val - gv[i] * gv[j] / (val * val);
        if (conj_it) {
            out.value = std::conj(out.value);
            out.grad_log = conj(out.grad_log);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) out.hess_log[i][j] = std::conj(out.hess_log[i][j]);
        }
        return out;
    }
};

/// A pair of profiles sharing omega, backgrounds and support, as used by the
/// integral-identity machinery. Derived tilde/hat combinations per position.
struct TwoProfiles {
    MaterialProfile mat1, mat2;

    struct Combo {
        cplx mu_t, ga_t;   // omega (p2 - p1)/sqrt(p1 p2)
        cplx mu_h, ga_h;   // omega (p2 + p1)/sqrt(p1 p2)
        CVec3 grad_mu_t, grad_mu_h, grad_ga_t, grad_ga_h;
        cplx kap1, kap2;
    };

    Combo at(const Vec3& x) const {
        Combo c;
        auto m1 = mat1.mu(x), m2 = mat2.mu(x);
        auto g1 = mat1.gamma(x), g2 = mat2.gamma(x);
        const double om = mat1.omega;
        cplx sm = std::sqrt(m1.value * m2.value), sg = std::sqrt(g1.value * g2.value);
        c.mu_t = om * (m2.value - m1.value) / sm;
        c.ga_t = om * (g2.value - g1.value) / sg;
        c.mu_h = om * (m2.value + m1.value) / sm;
        c.ga_h = om * (g2.value + g1.value) / sg;
        CVec3 db = m2.grad_log - m1.grad_log;  // beta2 - beta1
        CVec3 da = g2.grad_log - g1.grad_log;  // alpha2 - alpha1
        c.grad_mu_t = db * (0.5 * c.mu_h);
        c.grad_mu_h = db * (0.5 * c.mu_t);
        c.grad_ga_t = da * (0.5 * c.ga_h);
        c.grad_ga_h = da * (0.5 * c.ga_t);
        c.kap1 = om * std::sqrt(m1.value * g1.value);
        c.kap2 = om * std::sqrt(m2.value * g2.value);
        return c;
    }
};

}  // namespace slabcgo
