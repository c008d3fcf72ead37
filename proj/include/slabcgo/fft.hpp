#pragma once

#include <fftw3.h>

#include <mutex>

#include "slabcgo/grid.hpp"

namespace slabcgo {

/// Thin in-place 3D complex FFT on a private buffer. FFTW plan creation is
/// serialized; execution on the owned buffer is single-threaded by design
/// (deterministic output ordering).
class Fft3 {
  public:
    explicit Fft3(std::array<int, 3> n) : n_(n), buf_(std::size_t(n[0]) * n[1] * n[2]) {
        static std::mutex plan_mutex;
        std::lock_guard<std::mutex> lock(plan_mutex);
        auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
        fwd_ = fftw_plan_dft_3d(n[0], n[1], n[2], p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_3d(n[0], n[1], n[2], p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft3() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    Fft3(const Fft3&) = delete;
    Fft3& operator=(const Fft3&) = delete;

    std::size_t size() const { return buf_.size(); }
    cplx* buffer() { return buf_.data(); }

    void forward() { fftw_execute(fwd_); }
    void inverse() {
        fftw_execute(bwd_);
        const double s = 1.0 / double(buf_.size());
        for (auto& v : buf_) v *= s;
    }

  private:
    std::array<int, 3> n_;
    std::vector<cplx> buf_;
    fftw_plan fwd_, bwd_;
};


/// Batched 1D FFT along the fastest (z) axis of a (nx*ny, nz) layout.
class FftZ {
  public:
    FftZ(int howmany, int nz) : nz_(nz), buf_(std::size_t(howmany) * nz) {
        static std::mutex plan_mutex;
        std::lock_guard<std::mutex> lock(plan_mutex);
        auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
        int n[] = {nz};
        plan_ = fftw_plan_many_dft(1, n, howmany, p, nullptr, 1, nz, p, nullptr, 1, nz,
                                   FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~FftZ() { fftw_destroy_plan(plan_); }
    FftZ(const FftZ&) = delete;
    FftZ& operator=(const FftZ&) = delete;

    cplx* buffer() { return buf_.data(); }
    void forward() { fftw_execute(plan_); }
    int nz() const { return nz_; }

  private:
    int nz_;
    std::vector<cplx> buf_;
    fftw_plan plan_;
};

/// 2 pi fftfreq for one axis: frequencies kappa_m = 2 pi m / (n h), m wrapped to [-n/2, n/2).
inline std::vector<double> fourier_freqs(int n, double h) {
    std::vector<double> k(n);
    const double base = 2.0 * M_PI / (n * h);
    for (int m = 0; m < n; ++m) {
        int mm = (m <= (n - 1) / 2) ? m : m - n;
        k[m] = base * mm;
    }
    return k;
}

}  // namespace slabcgo
