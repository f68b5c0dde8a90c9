#pragma once

// Deterministic sampling layer. Distribution maths is hand-rolled on top of
// mt19937_64 because libstdc++'s distribution objects are not pinned across
// implementations; the raw engine is. Every sampler consumes a documented
// number of engine draws so path streams replay identically anywhere.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace svolterra {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Engine for one substream. (seed, stream) is whitened through splitmix64 so
// adjacent stream indices land far apart in seed space; results depend only on
// the pair, never on thread scheduling.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0x632be59bd9b4e019ULL * (stream + 1));
    const std::uint64_t a = splitmix64(s);
    const std::uint64_t b = splitmix64(s);
    const std::uint64_t c = splitmix64(s);
    const std::uint64_t d = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32),
                      static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32)};
    return std::mt19937_64(seq);
}

// Uniform on [0, 1) with 53 random bits. One engine draw.
inline double sample_uniform(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Exp(1). One engine draw; 1 - u is in (0, 1] so the log is finite.
inline double sample_exponential(std::mt19937_64& g) {
    return -std::log(1.0 - sample_uniform(g));
}

// Standard normal pair via Box-Muller. Exactly two engine draws.
inline std::pair<double, double> sample_normal_pair(std::mt19937_64& g) {
    const double u1 = 1.0 - sample_uniform(g);  // (0, 1]
    const double u2 = sample_uniform(g);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

// Poisson count by Knuth's product method: k+1 engine draws for a count of k.
// Exact for any mean; cost grows linearly, so keep means modest.
inline long sample_poisson(std::mt19937_64& g, double mean) {
    if (!(mean >= 0.0)) throw std::domain_error("sample_poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean > 700.0) throw std::domain_error("sample_poisson: mean too large for product method");
    const double limit = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
        p *= sample_uniform(g);
        ++k;
    } while (p > limit);
    return k - 1;
}

// Compensated accumulator (Neumaier). Reduction order is fixed by the caller,
// so Monte Carlo totals do not depend on the thread count.
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Kolmogorov-Smirnov distance of a sample from Uniform[0,1]. Callers compare
// n^(1/2) * D against a fixed quantile of the Kolmogorov distribution.
inline double ks_uniform_statistic(std::vector<double> x) {
    if (x.empty()) throw std::invalid_argument("ks_uniform_statistic: empty sample");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(x[i] - lo, hi - x[i]));
    }
    return d;
}

}  // namespace svolterra
