#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace idstore {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares of y against (x, 1). Callers must ensure at least
/// two distinct x values.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = static_cast<double>(n) * sxx - sx * sx;
    LineFit f;
    f.slope = (static_cast<double>(n) * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / static_cast<double>(n);
    return f;
}

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;   // unbiased
    std::size_t n = 0;
};

inline MeanVar mean_var(std::span<const double> xs) {
    MeanVar mv;
    mv.n = xs.size();
    if (mv.n == 0) return mv;
    double s = 0;
    for (double v : xs) s += v;
    mv.mean = s / static_cast<double>(mv.n);
    if (mv.n < 2) return mv;
    double ss = 0;
    for (double v : xs) ss += (v - mv.mean) * (v - mv.mean);
    mv.var = ss / static_cast<double>(mv.n - 1);
    return mv;
}

/// Streaming accumulator for a Pearson correlation over a pooled sample.
struct CorrAccum {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    double n = 0;

    void add(double x, double y) {
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
        n += 1;
    }
    void merge(const CorrAccum& o) {
        sx += o.sx; sy += o.sy; sxx += o.sxx; syy += o.syy; sxy += o.sxy; n += o.n;
    }
    double correlation() const {
        if (n < 2) return 0.0;
        const double cxy = sxy - sx * sy / n;
        const double cxx = sxx - sx * sx / n;
        const double cyy = syy - sy * sy / n;
        if (cxx <= 0.0 || cyy <= 0.0) return 0.0;
        return cxy / std::sqrt(cxx * cyy);
    }
};

} // namespace idstore
