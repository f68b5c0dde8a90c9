#pragma once

// Exponential-affine transforms: E[exp(...)] = exp(int_0^T F(psi(T-s)) g0(s) ds)
// with psi the Riccati path. The exponent integral is evaluated per cell in
// closed form against the kernel antiderivatives, so the only discretization
// error is the one already present in psi.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "kernels.hpp"
#include "model.hpp"
#include "riccati.hpp"

namespace svolterra {

struct TransformResult {
    std::complex<double> exponent{0.0, 0.0};
    std::complex<double> value{0.0, 0.0}; // exp(exponent)
    PsiPath psi;
    bool ok = false; // false when the Riccati path blew up before T
};

namespace detail {

// int_0^T Fhat(s) g0(s) ds with Fhat piecewise linear through F(psi) at the
// nodes, reversed in time. For AffineInK the inner integral against
// IK(T - s) is exact via the kernel antiderivatives; for a table the product
// of two piecewise-linear factors is integrated segment-exactly by Simpson.
inline std::complex<double> exponent_integral(const PsiPath& path, const KernelSpec& k,
                                              const InputCurve& g0) {
    const Grid& g = path.grid;
    const int n = g.steps;
    const double dt = g.dt();
    const double T = g.horizon;
    const auto& F = path.F;

    if (const auto* aff = std::get_if<AffineInK>(&g0.v)) {
        // x0 * int F + theta * int Fhat(s) IK(T-s) ds
        std::complex<double> int_f = 0.0;
        for (int j = 0; j < n; ++j) int_f += 0.5 * dt * (F[j] + F[j + 1]);

        std::complex<double> int_psi = 0.0;
        std::vector<double> iik(n + 1), iiik(n + 1);
        for (int c = 0; c <= n; ++c) {
            iik[c] = iik_value(k, c * dt);
            iiik[c] = iiik_value(k, c * dt);
        }
        for (int j = 0; j < n; ++j) {
            const int c = n - 1 - j;
            const double a = c * dt, b = (c + 1) * dt;
            const double dii = iik[c + 1] - iik[c];
            const double dvi = b * iik[c + 1] - a * iik[c] - (iiik[c + 1] - iiik[c]);
            const std::complex<double> slope = (F[j + 1] - F[j]) / dt;
            int_psi += F[j] * dii + slope * (b * dii - dvi);
        }
        return aff->x0 * int_f + aff->theta * int_psi;
    }

    const auto& tab = std::get<NonDecreasingTable>(g0.v);
    if (tab.t.back() < T - 1e-12)
        throw std::domain_error("exponent_integral: input curve table does not cover [0, T]");
    std::vector<double> cuts;
    for (int j = 0; j <= n; ++j) cuts.push_back(g.node(j));
    for (double t : tab.t)
        if (t > 0.0 && t < T) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               cuts.end());

    auto f_rev = [&](double s) { // Fhat(T - s), linear between nodes
        const double r = std::min(std::max(T - s, 0.0), T);
        const int j = std::min(n - 1, static_cast<int>(r / dt));
        const double w = r / dt - j;
        return (1.0 - w) * F[j] + w * F[j + 1];
    };
    std::complex<double> acc = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1], m = 0.5 * (a + b);
        auto f = [&](double s) { return f_rev(s) * curve_value(g0, k, s); };
        acc += (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    }
    return acc;
}

} // namespace detail

inline TransformResult fourier_laplace(const RiccatiSpec& spec, const KernelSpec& k,
                                       const InputCurve& g0, double T, int steps,
                                       RiccatiOptions opt = {}) {
    TransformResult out;
    out.psi = solve_riccati(spec, k, Grid{T, steps}, opt);
    if (out.psi.blew_up) {
        const auto nan = std::complex<double>(std::numeric_limits<double>::quiet_NaN(),
                                              std::numeric_limits<double>::quiet_NaN());
        out.exponent = nan;
        out.value = nan;
        return out;
    }
    out.exponent = detail::exponent_integral(out.psi, k, g0);
    out.value = std::exp(out.exponent);
    out.ok = true;
    return out;
}

// Self-exciting counting process with excitation kernel K and baseline g0:
// E[exp(h0 * int_0^T lambda_s ds + h2 * N_T)]. Characteristics (b, c, nu) =
// (1, 0, delta_1), which folds into f0 = h0 + h2, f2 = h2. The transform is
// guaranteed finite for Re h0 <= 0 and purely imaginary h2.
inline TransformResult hawkes_transform(std::complex<double> h0, std::complex<double> h2,
                                        const KernelSpec& k, const InputCurve& g0, double T,
                                        int steps) {
    if (h0.real() > 0.0)
        throw std::domain_error("hawkes_transform: Re h0 must be <= 0");
    if (h2.real() != 0.0)
        throw std::domain_error("hawkes_transform: h2 must be purely imaginary");
    RiccatiSpec spec;
    spec.f0 = h0 + h2;
    spec.f2 = h2;
    spec.triplet.b = 1.0;
    spec.triplet.c = 0.0;
    spec.triplet.nu = jump_atoms({{1.0, 1.0}});
    return fourier_laplace(spec, k, g0, T, steps);
}

// Variance process V solving the affine equation with kernel K and input g0;
// log price X with d log S = -V/2 dt + sqrt(V) (rho dW + sqrt(1-rho^2) dWp).
struct HestonModel {
    KernelSpec kernel{Constant{1.0}};
    AffineTriplet triplet;          // jumps, if any, act on the variance
    double rho = 0.0;
    InputCurve g0{AffineInK{0.0, 0.0}};
    bool allow_unchecked_args = false; // lift the Re h0 <= 0, Re h1 in [0,1] guard
};

inline void validate(const HestonModel& m) {
    validate(m.triplet);
    validate(m.kernel);
    if (!(m.rho >= -1.0 && m.rho <= 1.0))
        throw std::invalid_argument("HestonModel: rho must lie in [-1, 1]");
    if (m.triplet.c == 0.0 && m.rho != 0.0 && !m.allow_unchecked_args)
        throw std::invalid_argument(
            "HestonModel: rho has no effect when c = 0; set rho = 0 or allow_unchecked_args");
}

// E[exp(h0 * int_0^T V + h1 * (log S_T - log S_0))]. Finiteness is guaranteed
// for Re h0 <= 0 and Re h1 in [0, 1]; other arguments are rejected unless the
// model explicitly opts out of the guard.
inline TransformResult heston_joint_transform(const HestonModel& m, std::complex<double> h0,
                                              std::complex<double> h1, double T, int steps) {
    validate(m);
    if (!m.allow_unchecked_args) {
        if (h0.real() > 0.0)
            throw std::domain_error("heston_joint_transform: Re h0 must be <= 0");
        if (h1.real() < 0.0 || h1.real() > 1.0)
            throw std::domain_error("heston_joint_transform: Re h1 must lie in [0, 1]");
    }
    RiccatiSpec spec;
    spec.f0 = h0 + 0.5 * (h1 * h1 - h1);
    spec.triplet = m.triplet;
    spec.lin_shift = m.rho * std::sqrt(m.triplet.c) * h1;
    return fourier_laplace(spec, m.kernel, m.g0, T, steps);
}

inline TransformResult heston_cf_logprice(const HestonModel& m, double v, double T, int steps) {
    return heston_joint_transform(m, 0.0, std::complex<double>(0.0, v), T, steps);
}

// European call by the two-probability decomposition C = S0 P1 - K P2 with
// P_j = 1/2 + (1/pi) int_0^inf Re[e^{-i v k} phi_j(v) / (i v)] dv, where
// phi_2(v) = E[e^{i v x}], phi_1(v) = E[e^{(1+iv) x}] and x = log(S_T/S0).
// Both contours stay inside the guaranteed strip Re h1 in [0, 1]. Panels of
// fixed width are added until their contribution falls below tol.
struct CallPriceResult {
    double price = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double v_max = 0.0;     // where the integral was truncated
    bool converged = false;
};

inline CallPriceResult price_european_call(const HestonModel& m, double s0, double strike,
                                           double T, int steps, double tol = 1e-8,
                                           double panel_width = 2.0, int max_panels = 256) {
    if (!(s0 > 0.0) || !(strike > 0.0))
        throw std::invalid_argument("price_european_call: s0 and strike must be > 0");
    const double logk = std::log(strike / s0);

    auto integrand = [&](double v, bool shifted) {
        const std::complex<double> h1 =
            shifted ? std::complex<double>(1.0, v) : std::complex<double>(0.0, v);
        const TransformResult tr = heston_joint_transform(m, 0.0, h1, T, steps);
        if (!tr.ok)
            throw std::runtime_error("price_european_call: transform blew up at v = " +
                                     std::to_string(v));
        const std::complex<double> iv(0.0, v);
        return (std::exp(std::complex<double>(0.0, -v * logk)) * tr.value / iv).real();
    };

    CallPriceResult out;
    double i1 = 0.0, i2 = 0.0;
    for (int p = 0; p < max_panels; ++p) {
        const double a = p * panel_width;
        double p1 = 0.0, p2 = 0.0;
        for (int q = 0; q < 8; ++q) {
            const double v = a + panel_width * detail::gl8_x[q];
            const double w = panel_width * detail::gl8_w[q];
            p1 += w * integrand(v, true);
            p2 += w * integrand(v, false);
        }
        i1 += p1;
        i2 += p2;
        out.v_max = a + panel_width;
        if (p >= 2 && std::abs(p1) < tol && std::abs(p2) < tol) {
            out.converged = true;
            break;
        }
    }
    out.p1 = 0.5 + i1 / M_PI;
    out.p2 = 0.5 + i2 / M_PI;
    out.price = s0 * out.p1 - strike * out.p2;
    return out;
}

// Forward curve after observing the driver up to time t: for u > t,
// g_t(u) = g0(u) + sum_j K(u - mid_j) dZ_j over the cells of [0, t].
// Increments are attributed to cell midpoints, which keeps the kernel
// argument at least half a cell away from its singularity.
inline SampledFn forward_curve_from_path(const InputCurve& g0, const KernelSpec& k,
                                         const std::vector<double>& z_increments, const Grid& g,
                                         double t) {
    const double dt = g.dt();
    const int it = static_cast<int>(std::round(t / dt));
    if (std::abs(it * dt - t) > 1e-9 || it < 0 || it > g.steps)
        throw std::invalid_argument("forward_curve_from_path: t must be a grid node");
    if (z_increments.size() < static_cast<size_t>(it))
        throw std::invalid_argument("forward_curve_from_path: need one increment per cell of [0, t]");
    SampledFn out;
    for (int i = it + 1; i <= g.steps; ++i) {
        const double u = g.node(i);
        double v = curve_value(g0, k, u);
        for (int j = 0; j < it; ++j) v += eval_kernel(k, u - (j + 0.5) * dt) * z_increments[j];
        out.t.push_back(u);
        out.y.push_back(v);
    }
    return out;
}

} // namespace svolterra
