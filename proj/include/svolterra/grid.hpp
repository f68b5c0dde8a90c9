#pragma once

#include <stdexcept>
#include <vector>

namespace svolterra {

// Uniform grid on [0, horizon] with nodes t_k = k * dt, k = 0..steps.
// Non-uniform grids are intentionally unsupported: every quadrature in this
// library relies on translation-invariant cell weights.
struct Grid {
    double horizon = 0.0;
    int steps = 0;

    Grid() = default;
    Grid(double horizon_, int steps_) : horizon(horizon_), steps(steps_) {
        if (!(horizon > 0.0)) throw std::invalid_argument("Grid: horizon must be positive");
        if (steps < 1) throw std::invalid_argument("Grid: steps must be >= 1");
    }

    double dt() const { return horizon / steps; }
    double node(int k) const { return horizon * k / steps; }
    // Number of nodes including t_0 = 0.
    int nodes() const { return steps + 1; }
};

// Real function sampled at explicit abscissae (not necessarily grid nodes:
// singular kernels are sampled away from t = 0).
struct SampledFn {
    std::vector<double> t;
    std::vector<double> y;
};

namespace detail {

// 4-point Gauss-Legendre rule on [0, 1].
inline constexpr double gl4_x[4] = {0.06943184420297371, 0.33000947820757187,
                                    0.66999052179242813, 0.93056815579702629};
inline constexpr double gl4_w[4] = {0.17392742256872693, 0.32607257743127307,
                                    0.32607257743127307, 0.17392742256872693};

// 8-point Gauss-Legendre rule on [0, 1].
inline constexpr double gl8_x[8] = {0.01985507175123188, 0.10166676129318664,
                                    0.23723379504183550, 0.40828267875217510,
                                    0.59171732124782490, 0.76276620495816450,
                                    0.89833323870681336, 0.98014492824876812};
inline constexpr double gl8_w[8] = {0.05061426814518813, 0.11119051722668724,
                                    0.15685332293894364, 0.18134189168918099,
                                    0.18134189168918099, 0.15685332293894364,
                                    0.11119051722668724, 0.05061426814518813};

} // namespace detail

} // namespace svolterra
