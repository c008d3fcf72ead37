#pragma once

#include <vector>

#include "slabcgo/core.hpp"

namespace slabcgo {

/// Least-squares line fit on log-log data with the coefficient of determination.
struct SlopeFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

inline SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_loglog: need >= 2 points");
    const int n = int(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx(n), ly(n);
    for (int i = 0; i < n; ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
    }
    SlopeFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0, mean = sy / n;
    for (int i = 0; i < n; ++i) {
        double pred = f.slope * lx[i] + f.intercept;
        ss_res += (ly[i] - pred) * (ly[i] - pred);
        ss_tot += (ly[i] - mean) * (ly[i] - mean);
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

/// Strictly decreasing over the last `count` steps (the asymptotic window).
inline bool decreasing_tail(const std::vector<double>& v, int count) {
    if (int(v.size()) < count + 1) return false;
    for (std::size_t i = v.size() - count; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

}  // namespace slabcgo
