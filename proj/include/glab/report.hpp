#ifndef GLAB_REPORT_HPP
#define GLAB_REPORT_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "glab/rng.hpp"

namespace glab {

/// Monte Carlo estimate with a 95% confidence interval.
struct EstimateReport {
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t trials = 0;
    RngSeed seed;
    std::string method;
};

/// Wilson 95% interval for a binomial proportion.
inline void wilson_interval(std::uint64_t hits, std::uint64_t trials, double* lo, double* hi) {
    const double z = 1.959963984540054;
    double n = static_cast<double>(trials);
    double p = static_cast<double>(hits) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z / denom * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    *lo = center - half;
    *hi = center + half;
    if (*lo < 0) *lo = 0;
    if (*hi > 1) *hi = 1;
}

inline EstimateReport binomial_report(std::uint64_t hits, std::uint64_t trials, RngSeed seed,
                                      std::string method) {
    EstimateReport r;
    r.value = static_cast<double>(hits) / static_cast<double>(trials);
    wilson_interval(hits, trials, &r.ci_low, &r.ci_high);
    r.trials = trials;
    r.seed = seed;
    r.method = std::move(method);
    return r;
}

/// All numeric output uses "%.17g" so runs are byte-for-byte reproducible.
inline std::string fmt_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace glab

#endif
