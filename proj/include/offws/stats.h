// Running statistics for one estimator: count, mean, and mean of squares.
// The variance of the sample mean is derived on demand.

#pragma once

#include <algorithm>
#include <cstdint>

namespace offws {

struct PairStats {
    int64_t count = 0;
    double mean = 0.0;
    double meanSq = 0.0;

    void push(double v) {
        ++count;
        mean += (v - mean) / double(count);
        meanSq += (v * v - meanSq) / double(count);
    }

    // unbiased sample variance s^2, clamped at zero
    double variance() const {
        if (count < 2) return 0.0;
        double s2 = (meanSq - mean * mean) * double(count) / double(count - 1);
        return std::max(0.0, s2);
    }

    // Var of the sample mean, s^2 / n
    double varianceOfMean() const {
        if (count < 2) return 0.0;
        return variance() / double(count);
    }

    static PairStats merged(const PairStats& a, const PairStats& b) {
        if (a.count == 0) return b;
        if (b.count == 0) return a;
        PairStats out;
        out.count = a.count + b.count;
        double wa = double(a.count) / double(out.count);
        double wb = double(b.count) / double(out.count);
        out.mean = wa * a.mean + wb * b.mean;
        out.meanSq = wa * a.meanSq + wb * b.meanSq;
        return out;
    }
};

}  // namespace offws
