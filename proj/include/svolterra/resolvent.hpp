#pragma once

// Resolvents of the second kind (R = K + K * R) and of the first kind
// (K * L = 1) on a uniform grid, with a-posteriori residual estimates
// evaluated at staggered midpoints so they measure genuine off-node defects.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "kernels.hpp"
#include "mittag_leffler.hpp"

namespace svolterra {

namespace detail {

// n-fold self-convolution of t^{alpha-1} e^{-eta t} / Gamma(alpha):
// P_n(t) = t^{n alpha - 1} e^{-eta t} / Gamma(n alpha). Valid for t > 0,
// and for t = 0 when n alpha >= 1.
inline double conv_power(double alpha, double eta, int n, double t) {
    const double p = n * alpha;
    if (t == 0.0) {
        if (p > 1.0) return 0.0;
        if (p == 1.0) return 1.0;
        throw std::domain_error("conv_power: singular at t = 0");
    }
    return std::exp((p - 1.0) * std::log(t) - eta * t - std::lgamma(p));
}

// S_N(t) = sum_{n=1}^{N} P_n(t): the closed-form head of the Neumann series.
inline double head_sum(double alpha, double eta, int n_terms, double t) {
    double s = 0.0;
    for (int n = 1; n <= n_terms; ++n) s += conv_power(alpha, eta, n, t);
    return s;
}

struct PowerLawParams {
    double alpha;
    double eta;
};

inline PowerLawParams power_law_params(const KernelSpec& k) {
    if (const auto* f = std::get_if<Fractional>(&k.v)) return {f->H + 0.5, 0.0};
    if (const auto* g = std::get_if<Gamma>(&k.v)) return {g->H + 0.5, g->eta};
    throw std::logic_error("power_law_params: kernel has no power-law form");
}

// Integrals of the profile density u^{-alpha} e^{-eta u} / Gamma(1-alpha):
// mass over [a,b] and the centroid of that mass.
inline double profile_raw_moment(double alpha, double eta, int j, double a, double b) {
    const double q = 1.0 - alpha + j;
    if (eta == 0.0) return (std::pow(b, q) - std::pow(a, q)) / q;
    const double scale = std::exp(std::lgamma(q) - q * std::log(eta));
    return scale * (boost::math::gamma_p(q, eta * b) - boost::math::gamma_p(q, eta * a));
}

inline double profile_mass(double alpha, double eta, double a, double b) {
    return profile_raw_moment(alpha, eta, 0, a, b) / std::tgamma(1.0 - alpha);
}

inline double profile_mean(double alpha, double eta, double a, double b) {
    return profile_raw_moment(alpha, eta, 1, a, b) / profile_raw_moment(alpha, eta, 0, a, b);
}

} // namespace detail

// Closed form for the second-kind resolvent of the fractional kernel
// t^{alpha-1}/Gamma(alpha): R(t) = t^{alpha-1} E_{alpha,alpha}(t^alpha),
// with antiderivative int_0^t R = E_alpha(t^alpha) - 1.
inline double fractional_resolvent_value(double H, double t) {
    const double alpha = H + 0.5;
    if (!(t > 0.0)) throw std::domain_error("fractional_resolvent_value: t must be > 0");
    return std::pow(t, alpha - 1.0) * mittag_leffler(alpha, alpha, std::pow(t, alpha)).real();
}

inline double fractional_resolvent_integral(double H, double t) {
    const double alpha = H + 0.5;
    if (!(t >= 0.0)) throw std::domain_error("fractional_resolvent_integral: t must be >= 0");
    if (t == 0.0) return 0.0;
    return mittag_leffler(alpha, 1.0, std::pow(t, alpha)).real() - 1.0;
}

struct SecondKindResolvent {
    Grid grid{1.0, 1};
    int head_terms = 0;          // closed-form self-convolutions split off (0 for bounded kernels)
    double alpha = 0.0;          // power-law parameters of the head (singular kernels only)
    double eta = 0.0;
    std::vector<double> values;  // R at the grid nodes; values[0] is NaN for singular kernels
    std::vector<double> rho;     // regular part: R(t_k) = head_sum(t_k) + rho[k]
    double residual = 0.0;       // max |R - K - K*R| over staggered midpoints

    SampledFn sampled() const {
        SampledFn f;
        const int first = std::isnan(values[0]) ? 1 : 0;
        for (int k = first; k <= grid.steps; ++k) {
            f.t.push_back(grid.node(k));
            f.y.push_back(values[k]);
        }
        return f;
    }
};

// Solves R = K + K*R by product-trapezoidal collocation. For singular kernels
// the first ceil(1/alpha) Neumann terms are split off in closed form and only
// the continuous remainder is discretized, so the scheme never touches K at 0.
inline SecondKindResolvent resolvent_second_kind(const KernelSpec& k, const Grid& g,
                                                 double growth_cap = 1e12) {
    validate(k);
    const int n = g.steps;
    const double dt = g.dt();
    const bool bounded = bounded_at_zero(k);

    SecondKindResolvent out;
    out.grid = g;
    if (!bounded) {
        const auto pl = detail::power_law_params(k);
        out.alpha = pl.alpha;
        out.eta = pl.eta;
        // ceil(1/alpha) terms make the remainder continuous; doubling that
        // keeps its second difference summable, so the piecewise-linear
        // remainder converges at the smooth O(dt^2) rate
        out.head_terms = static_cast<int>(std::ceil(2.0 / pl.alpha));
    }
    const int N = out.head_terms;

    const QuadWeights qw = quad_weights(k, g);
    std::vector<double> A(n), B(n);
    for (int c = 0; c < n; ++c) {
        A[c] = qw.a(c);
        B[c] = qw.b(c);
    }
    if (!(1.0 - B[0] > 0.0))
        throw std::runtime_error("resolvent_second_kind: implicit step not solvable; refine the grid");

    auto forcing = [&](double t) {
        return bounded ? eval_kernel(k, t) : detail::conv_power(out.alpha, out.eta, N + 1, t);
    };

    std::vector<double>& rho = out.rho;
    rho.assign(n + 1, 0.0);
    rho[0] = bounded ? eval_kernel(k, 0.0) : 0.0;
    for (int i = 1; i <= n; ++i) {
        double acc = forcing(g.node(i));
        for (int j = 0; j < i; ++j) {
            const int c = i - 1 - j;
            acc += A[c] * rho[j];
            if (j + 1 < i) acc += B[c] * rho[j + 1];
        }
        rho[i] = acc / (1.0 - B[0]);
        if (!(std::abs(rho[i]) <= growth_cap))
            throw std::runtime_error("resolvent_second_kind: divergence at node " + std::to_string(i));
    }

    out.values.assign(n + 1, 0.0);
    out.values[0] = bounded ? rho[0] : std::numeric_limits<double>::quiet_NaN();
    for (int i = 1; i <= n; ++i)
        out.values[i] = (bounded ? 0.0 : detail::head_sum(out.alpha, out.eta, N, g.node(i))) + rho[i];

    // Residual at midpoints s = (i + 1/2) dt. K convolved against the discrete
    // solution is computed exactly there: the head part via the closed form
    // K * S_N = sum of self-convolutions, the piecewise-linear part via kernel
    // moments on half-shifted cells. What remains is the off-node defect.
    std::vector<double> hw0(n), hw1(n);
    for (int c = 0; c < n; ++c) {
        hw0[c] = kernel_moment(k, 0, (c + 0.5) * dt, (c + 1.5) * dt);
        hw1[c] = kernel_moment(k, 1, (c + 0.5) * dt, (c + 1.5) * dt);
    }
    const double d0 = kernel_moment(k, 0, 0.0, 0.5 * dt);
    const double d1 = kernel_moment(k, 1, 0.0, 0.5 * dt);

    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = (i + 0.5) * dt;
        double conv = 0.0;
        if (!bounded)
            for (int m = 2; m <= N + 1; ++m) conv += detail::conv_power(out.alpha, out.eta, m, s);
        for (int j = 0; j < i; ++j) {
            const int c = i - 1 - j;
            const double slope = (rho[j + 1] - rho[j]) / dt;
            conv += rho[j] * hw0[c] + slope * ((c + 1.5) * dt * hw0[c] - hw1[c]);
        }
        const double slope = (rho[i + 1] - rho[i]) / dt;
        conv += rho[i] * d0 + slope * (0.5 * dt * d0 - d1);

        const double r_mid =
            (bounded ? 0.0 : detail::head_sum(out.alpha, out.eta, N, s)) + 0.5 * (rho[i] + rho[i + 1]);
        worst = std::max(worst, std::abs(r_mid - eval_kernel(k, s) - conv));
    }
    out.residual = worst;
    return out;
}

// Resolvent of the first kind: the measure L with int_0^t K(t-s) L(ds) = 1.
// Represented as an atom at zero plus per-cell masses of the absolutely
// continuous part. Power-law kernels keep the u^{-alpha} e^{-eta u} profile
// within each cell; bounded kernels spread each cell's mass uniformly.
struct ResolventFirstKind {
    enum class Density { none, uniform, power_profile };

    Grid grid{1.0, 1};
    double atom = 0.0;
    Density model = Density::none;
    double alpha = 0.0;               // profile parameters for Density::power_profile
    double eta = 0.0;
    std::vector<double> cell_mass;    // integral of the density over each grid cell
    double residual = 0.0;            // max |(K*L)(s) - 1| over staggered midpoints
};

// Evaluates (K * L)(s) by quadrature independent of how L was produced:
// geometric refinement toward both integrable singularities, exact
// profile masses at the u = 0 end, exact kernel moments at the u = s end,
// Gauss-Legendre in between.
inline double first_kind_apply(const KernelSpec& k, const ResolventFirstKind& L, double s) {
    if (!(s > 0.0 && s <= L.grid.horizon + 1e-12))
        throw std::domain_error("first_kind_apply: s outside the grid horizon");
    const double dt = L.grid.dt();
    double acc = L.atom > 0.0 ? L.atom * eval_kernel(k, s) : 0.0;
    if (L.model == ResolventFirstKind::Density::none) return acc;

    const int last = std::min(L.grid.steps - 1, static_cast<int>(std::ceil(s / dt - 1e-12)) - 1);
    for (int j = 0; j <= last; ++j) {
        const double ulo = j * dt;
        const double uhi = std::min((j + 1) * dt, s);
        if (L.model == ResolventFirstKind::Density::uniform) {
            // uniform in-cell density: the kernel moment is exact and absorbs
            // the K singularity at u -> s
            acc += (L.cell_mass[j] / dt) * kernel_moment(k, 0, s - uhi, s - ulo);
            continue;
        }

        const double cj =
            L.cell_mass[j] / detail::profile_mass(L.alpha, L.eta, j * dt, (j + 1) * dt);
        auto density = [&](double u) {
            return cj * std::pow(u, -L.alpha) * std::exp(-L.eta * u) / std::tgamma(1.0 - L.alpha);
        };
        // Subintervals never straddle cell boundaries, so cj is constant on each.
        auto piece = [&](double a, double b) {
            if (a <= 0.0) {
                // exact profile mass times K at the mass centroid
                acc += cj * detail::profile_mass(L.alpha, L.eta, a, b) *
                       eval_kernel(k, s - detail::profile_mean(L.alpha, L.eta, a, b));
                return;
            }
            if (b >= s) {
                // exact kernel moments times the density at the kernel centroid
                const double m0 = kernel_moment(k, 0, s - b, s - a);
                if (m0 > 0.0) acc += m0 * density(s - kernel_moment(k, 1, s - b, s - a) / m0);
                return;
            }
            const double w = b - a;
            for (int q = 0; q < 4; ++q) {
                const double u = a + w * detail::gl4_x[q];
                acc += w * detail::gl4_w[q] * eval_kernel(k, s - u) * density(u);
            }
        };
        auto stack_left = [&](double a, double b) { // refine toward a
            double hi = b;
            for (int m = 0; m < 40; ++m) {
                const double lo = (m == 39) ? a : a + 0.5 * (hi - a);
                piece(lo, hi);
                hi = lo;
            }
        };
        auto stack_right = [&](double a, double b) { // refine toward b
            double lo = a;
            for (int m = 0; m < 40; ++m) {
                const double hi = (m == 39) ? b : b - 0.5 * (b - lo);
                piece(lo, hi);
                lo = hi;
            }
        };

        const bool touches_zero = (j == 0);
        const bool touches_s = (uhi >= s);
        if (touches_zero && touches_s) {
            stack_left(0.0, 0.5 * s);
            stack_right(0.5 * s, s);
        } else if (touches_zero) {
            stack_left(0.0, uhi);
        } else if (touches_s) {
            stack_right(ulo, s);
        } else {
            piece(ulo, uhi);
        }
    }
    return acc;
}

inline ResolventFirstKind resolvent_first_kind(const KernelSpec& k, const Grid& g) {
    validate(k);
    ResolventFirstKind out;
    out.grid = g;
    const int n = g.steps;
    const double dt = g.dt();

    const bool bounded = bounded_at_zero(k);
    const bool power_law =
        std::holds_alternative<Fractional>(k.v) || std::holds_alternative<Gamma>(k.v);

    if (const auto* c = std::get_if<Constant>(&k.v)) {
        if (!(c->value > 0.0))
            throw std::domain_error("resolvent_first_kind: the zero kernel has no first-kind resolvent");
        out.atom = 1.0 / c->value;
        return out; // K*L = 1 exactly
    }
    if (power_law && bounded && detail::power_law_params(k).eta == 0.0) {
        out.atom = 1.0; // K = 1
        return out;
    }

    if (power_law && !bounded) {
        const auto pl = detail::power_law_params(k);
        out.model = ResolventFirstKind::Density::power_profile;
        out.alpha = pl.alpha;
        out.eta = pl.eta;
        out.cell_mass.assign(n, 0.0);
        if (pl.eta == 0.0) {
            // exact: L(du) = u^{-alpha}/Gamma(1-alpha) du
            for (int j = 0; j < n; ++j)
                out.cell_mass[j] = detail::profile_mass(pl.alpha, 0.0, g.node(j), g.node(j + 1));
        } else {
            // collocation in the in-cell profile basis u^{-alpha} e^{-eta u}:
            // each basis-kernel product is an incomplete Beta integral, so the
            // triangular solve uses exact matrix entries
            const double a = pl.alpha;
            std::vector<double> coef(n, 0.0);
            for (int i = 1; i <= n; ++i) {
                const double t = g.node(i);
                auto entry = [&](int j) {
                    const double xlo = g.node(j) / t;
                    const double xhi = std::min(g.node(j + 1) / t, 1.0);
                    return std::exp(-pl.eta * t) *
                           (boost::math::ibeta(1.0 - a, a, xhi) - boost::math::ibeta(1.0 - a, a, xlo));
                };
                double acc = 0.0;
                for (int j = 0; j + 1 < i; ++j) acc += coef[j] * entry(j);
                const double diag = entry(i - 1);
                if (!(diag > 0.0))
                    throw std::runtime_error("resolvent_first_kind: degenerate collocation step");
                coef[i - 1] = (1.0 - acc) / diag;
            }
            for (int j = 0; j < n; ++j)
                out.cell_mass[j] = coef[j] * detail::profile_mass(a, pl.eta, g.node(j), g.node(j + 1));
        }
    } else {
        // bounded kernel with K(0) > 0: atom 1/K(0) plus uniform-cell masses
        const double k0 = eval_kernel(k, 0.0);
        if (!(k0 > 0.0))
            throw std::domain_error("resolvent_first_kind: kernel vanishes at 0");
        out.atom = 1.0 / k0;
        out.model = ResolventFirstKind::Density::uniform;
        out.cell_mass.assign(n, 0.0);
        const QuadWeights qw = quad_weights(k, g);
        for (int i = 1; i <= n; ++i) {
            double acc = out.atom * eval_kernel(k, g.node(i));
            for (int j = 0; j + 1 < i; ++j) acc += (out.cell_mass[j] / dt) * qw.w[i - 1 - j];
            out.cell_mass[i - 1] = (1.0 - acc) * dt / qw.w[0];
        }
    }

    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(first_kind_apply(k, out, (i + 0.5) * dt) - 1.0));
    out.residual = worst;
    if (!(worst <= 1e-2))
        throw std::runtime_error("resolvent_first_kind: residual " + std::to_string(worst) +
                                 " exceeds 1e-2; unstable on this grid");
    return out;
}

} // namespace svolterra
