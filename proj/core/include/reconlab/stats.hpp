#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace reconlab {

/** Pairwise (cascade) summation. Reduction order depends only on the length
 *  of the input, so accumulated statistics are bit-stable regardless of how
 *  many workers filled the vector. */
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t count = 0;
};

/// Sample mean and standard error of the mean (0 for fewer than 2 values).
inline MeanStderr mean_stderr(const std::vector<double>& v) {
    MeanStderr r;
    r.count = v.size();
    if (v.empty()) return r;
    r.mean = pairwise_sum(v) / static_cast<double>(v.size());
    if (v.size() < 2) return r;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double d = v[i] - r.mean;
        sq[i] = d * d;
    }
    double ss = pairwise_sum(sq);
    double n = static_cast<double>(v.size());
    r.stderr_ = std::sqrt(ss / (n * (n - 1.0)));
    return r;
}

}  // namespace reconlab
