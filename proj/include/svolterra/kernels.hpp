#pragma once

// Convolution kernels K in L^1_loc([0,T]) together with exact cell integrals
//
//     M_j(a,b) = int_a^b s^j K(s) ds,   j = 0, 1, 2,
//
// in closed form per family. Every quadrature downstream (Riccati solver,
// resolvents, transform exponents) is product integration against these
// moments, never a point evaluation of K near its singularity.
//
// Families:
//   Fractional{H}   K(t) = t^(H-1/2) / Gamma(H+1/2),        H in (-1/2, 1/2]
//   Gamma{H,eta}    K(t) = t^(H-1/2) e^(-eta t) / Gamma(H+1/2)
//   Constant{c}     K(t) = c,                                c >= 0
//   ExpSum{(w,r)}   K(t) = sum_i w_i e^(-r_i t),             w_i > 0, r_i >= 0
//   Shifted{K0,h}   K(t) = K0(t + h),                        h > 0
//
// alpha = H + 1/2; H < 1/2 makes Fractional/Gamma unbounded at 0 (still L^1),
// and H <= 0 puts them outside L^2 (hyper-rough regime).

#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <variant>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "grid.hpp"

namespace svolterra {

struct KernelSpec;
using KernelPtr = std::shared_ptr<const KernelSpec>;

struct Fractional {
    double H;
};

struct Gamma {
    double H;
    double eta;
};

struct Constant {
    double value;
};

struct ExpSumTerm {
    double weight;
    double rate;
};

struct ExpSum {
    std::vector<ExpSumTerm> terms;
};

struct Shifted {
    KernelPtr base;
    double h;
};

struct KernelSpec {
    std::variant<Fractional, Gamma, Constant, ExpSum, Shifted> v;
};

inline void validate(const KernelSpec& k);

inline KernelSpec kernel_fractional(double H) {
    KernelSpec k{Fractional{H}};
    validate(k);
    return k;
}

inline KernelSpec kernel_gamma(double H, double eta) {
    KernelSpec k{Gamma{H, eta}};
    validate(k);
    return k;
}

inline KernelSpec kernel_constant(double value) {
    KernelSpec k{Constant{value}};
    validate(k);
    return k;
}

inline KernelSpec kernel_expsum(std::vector<ExpSumTerm> terms) {
    KernelSpec k{ExpSum{std::move(terms)}};
    validate(k);
    return k;
}

inline KernelSpec kernel_shifted(KernelSpec base, double h) {
    KernelSpec k{Shifted{std::make_shared<const KernelSpec>(std::move(base)), h}};
    validate(k);
    return k;
}

inline void validate(const KernelSpec& k) {
    struct V {
        void operator()(const Fractional& f) const {
            if (!(f.H > -0.5 && f.H <= 0.5))
                throw std::invalid_argument("Fractional: H must lie in (-1/2, 1/2]");
        }
        void operator()(const Gamma& g) const {
            if (!(g.H > -0.5 && g.H <= 0.5))
                throw std::invalid_argument("Gamma: H must lie in (-1/2, 1/2]");
            if (!(g.eta >= 0.0)) throw std::invalid_argument("Gamma: eta must be >= 0");
        }
        void operator()(const Constant& c) const {
            if (!(c.value >= 0.0)) throw std::invalid_argument("Constant: value must be >= 0");
        }
        void operator()(const ExpSum& e) const {
            for (const auto& t : e.terms) {
                if (!(t.weight > 0.0)) throw std::invalid_argument("ExpSum: weights must be > 0");
                if (!(t.rate >= 0.0)) throw std::invalid_argument("ExpSum: rates must be >= 0");
            }
        }
        void operator()(const Shifted& s) const {
            if (!s.base) throw std::invalid_argument("Shifted: missing base kernel");
            if (!(s.h > 0.0)) throw std::invalid_argument("Shifted: h must be > 0");
            validate(*s.base);
        }
    };
    std::visit(V{}, k.v);
}

// True when K(0+) is finite (H = 1/2 counts as bounded for Fractional/Gamma).
inline bool bounded_at_zero(const KernelSpec& k) {
    struct V {
        bool operator()(const Fractional& f) const { return f.H == 0.5; }
        bool operator()(const Gamma& g) const { return g.H == 0.5; }
        bool operator()(const Constant&) const { return true; }
        bool operator()(const ExpSum&) const { return true; }
        bool operator()(const Shifted&) const { return true; }
    };
    return std::visit(V{}, k.v);
}

// Singular exponent alpha = H + 1/2 for the power-law families, or 0 when the
// kernel has no power-law head.
inline double singular_alpha(const KernelSpec& k) {
    if (const auto* f = std::get_if<Fractional>(&k.v)) return f->H + 0.5;
    if (const auto* g = std::get_if<Gamma>(&k.v)) return g->H + 0.5;
    return 0.0;
}

inline double eval_kernel(const KernelSpec& k, double t) {
    if (!(t >= 0.0)) throw std::domain_error("eval_kernel: t must be >= 0");
    struct V {
        double t;
        double operator()(const Fractional& f) const {
            const double alpha = f.H + 0.5;
            if (alpha == 1.0) return 1.0;
            if (t == 0.0) throw std::domain_error("eval_kernel: singular kernel at t = 0");
            return std::pow(t, alpha - 1.0) / std::tgamma(alpha);
        }
        double operator()(const Gamma& g) const {
            const double alpha = g.H + 0.5;
            if (alpha == 1.0) return std::exp(-g.eta * t);
            if (t == 0.0) throw std::domain_error("eval_kernel: singular kernel at t = 0");
            return std::pow(t, alpha - 1.0) * std::exp(-g.eta * t) / std::tgamma(alpha);
        }
        double operator()(const Constant& c) const { return c.value; }
        double operator()(const ExpSum& e) const {
            double s = 0.0;
            for (const auto& term : e.terms) s += term.weight * std::exp(-term.rate * t);
            return s;
        }
        double operator()(const Shifted& s) const { return eval_kernel(*s.base, t + s.h); }
    };
    return std::visit(V{t}, k.v);
}

namespace detail {

// int_a^b s^j w e^(-r s) ds. Closed form when r(b-a) is large enough for the
// difference to be well conditioned, 8-point Gauss-Legendre otherwise (the
// integrand is then polynomial-times-nearly-flat and the rule is exact to
// machine precision).
inline double expsum_term_moment(double w, double r, int j, double a, double b) {
    const double len = b - a;
    if (len <= 0.0) return 0.0;
    if (r == 0.0) {
        return w * (std::pow(b, j + 1) - std::pow(a, j + 1)) / (j + 1);
    }
    if (r * len <= 0.5) {
        double s = 0.0;
        for (int i = 0; i < 8; ++i) {
            const double x = a + len * gl8_x[i];
            s += gl8_w[i] * std::pow(x, j) * std::exp(-r * x);
        }
        return w * len * s;
    }
    const double ea = std::exp(-r * a), eb = std::exp(-r * b);
    switch (j) {
        case 0: return w * (ea - eb) / r;
        case 1: return w * (ea * (r * a + 1.0) - eb * (r * b + 1.0)) / (r * r);
        case 2:
            return w *
                   (ea * (r * r * a * a + 2.0 * r * a + 2.0) -
                    eb * (r * r * b * b + 2.0 * r * b + 2.0)) /
                   (r * r * r);
        default: throw std::logic_error("expsum_term_moment: j out of range");
    }
}

} // namespace detail

// Exact moment integral M_j(a,b) = int_a^b s^j K(s) ds for j in {0,1,2}.
// a = 0 is allowed for singular kernels (the moments stay finite).
inline double kernel_moment(const KernelSpec& k, int j, double a, double b) {
    if (j < 0 || j > 2) throw std::invalid_argument("kernel_moment: j must be 0, 1 or 2");
    if (!(a >= 0.0) || !(b >= a)) throw std::domain_error("kernel_moment: need 0 <= a <= b");
    if (a == b) return 0.0;
    struct V {
        int j;
        double a, b;
        double operator()(const Fractional& f) const {
            const double alpha = f.H + 0.5;
            const double p = alpha + j;
            return (std::pow(b, p) - std::pow(a, p)) / (p * std::tgamma(alpha));
        }
        double operator()(const Gamma& g) const {
            const double alpha = g.H + 0.5;
            if (g.eta == 0.0) return V{j, a, b}(Fractional{g.H});
            const double p = alpha + j;
            const double scale = std::tgamma(p) / (std::tgamma(alpha) * std::pow(g.eta, p));
            return scale *
                   (boost::math::gamma_p(p, g.eta * b) - boost::math::gamma_p(p, g.eta * a));
        }
        double operator()(const Constant& c) const {
            return c.value * (std::pow(b, j + 1) - std::pow(a, j + 1)) / (j + 1);
        }
        double operator()(const ExpSum& e) const {
            double s = 0.0;
            for (const auto& term : e.terms)
                s += detail::expsum_term_moment(term.weight, term.rate, j, a, b);
            return s;
        }
        double operator()(const Shifted& s) const {
            const double h = s.h;
            const double m0 = kernel_moment(*s.base, 0, a + h, b + h);
            if (j == 0) return m0;
            const double m1 = kernel_moment(*s.base, 1, a + h, b + h);
            if (j == 1) return m1 - h * m0;
            const double m2 = kernel_moment(*s.base, 2, a + h, b + h);
            return m2 - 2.0 * h * m1 + h * h * m0;
        }
    };
    return std::visit(V{j, a, b}, k.v);
}

// First antiderivative int_0^t K.
inline double ik_value(const KernelSpec& k, double t) { return kernel_moment(k, 0, 0.0, t); }

// Second antiderivative int_0^t int_0^s K. By parts: t M_0(0,t) - M_1(0,t).
inline double iik_value(const KernelSpec& k, double t) {
    return t * kernel_moment(k, 0, 0.0, t) - kernel_moment(k, 1, 0.0, t);
}

// Third antiderivative. By parts twice: t^2/2 M_0 - t M_1 + M_2/2 on [0,t].
inline double iiik_value(const KernelSpec& k, double t) {
    return 0.5 * t * t * kernel_moment(k, 0, 0.0, t) - t * kernel_moment(k, 1, 0.0, t) +
           0.5 * kernel_moment(k, 2, 0.0, t);
}

// Per-cell kernel integrals on a uniform grid:
//   w[c] = int_{c dt}^{(c+1) dt} K(v) dv
//   m[c] = int_{c dt}^{(c+1) dt} v K(v) dv
// Together they integrate a piecewise-linear factor against K exactly:
// on cell c, the coefficient of the older node value is a[c], of the newer
// node value b[c], with a[c] + b[c] = w[c].
struct QuadWeights {
    double dt = 0.0;
    std::vector<double> w;
    std::vector<double> m;

    double a(int c) const { return (m[c] - c * dt * w[c]) / dt; }
    double b(int c) const { return ((c + 1) * dt * w[c] - m[c]) / dt; }
};

inline QuadWeights quad_weights(const KernelSpec& k, const Grid& g) {
    QuadWeights q;
    q.dt = g.dt();
    q.w.resize(g.steps);
    q.m.resize(g.steps);
    for (int c = 0; c < g.steps; ++c) {
        const double a = g.node(c), b = g.node(c + 1);
        q.w[c] = kernel_moment(k, 0, a, b);
        q.m[c] = kernel_moment(k, 1, a, b);
    }
    return q;
}

// int_0^T |a - b|. Cells where both kernels are bounded use Gauss-Legendre on
// |a-b|; the first cell of a singular kernel is split geometrically toward 0
// and each sub-cell uses the exact moment difference under a sampled-sign
// assumption, so monotone-ordered pairs come out exactly.
inline double l1_distance(const KernelSpec& a, const KernelSpec& b, const Grid& g) {
    const double dt = g.dt();
    double total = 0.0;
    const bool singular_head = !bounded_at_zero(a) || !bounded_at_zero(b);

    auto gl4_abs = [&](double lo, double hi) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double x = lo + (hi - lo) * detail::gl4_x[i];
            s += detail::gl4_w[i] * std::abs(eval_kernel(a, x) - eval_kernel(b, x));
        }
        return (hi - lo) * s;
    };

    int first_regular_cell = 0;
    if (singular_head) {
        // Geometric subdivision of [0, dt] toward the singularity; each
        // sub-cell contributes |M_0^a - M_0^b|, exact when a - b keeps one
        // sign there.
        first_regular_cell = 1;
        const int nsub = 16;
        const double ratio = 0.5;
        double hi = dt;
        for (int i = 0; i < nsub; ++i) {
            const double lo = (i + 1 == nsub) ? 0.0 : hi * ratio;
            total += std::abs(kernel_moment(a, 0, lo, hi) - kernel_moment(b, 0, lo, hi));
            hi = lo;
        }
    }
    for (int c = first_regular_cell; c < g.steps; ++c) total += gl4_abs(g.node(c), g.node(c + 1));
    return total;
}

// Multifactor exponential approximation of a power-law kernel, built from the
// completely monotone representation
//   t^(alpha-1)/Gamma(alpha) = int_0^inf e^(-gamma t) mu(dgamma),
//   mu(dgamma) = gamma^(-alpha) dgamma / (Gamma(alpha) Gamma(1-alpha)).
// Rates are placed on n geometric bins of [eta0, eta1]; each term carries the
// bin mass and the bin's mu-mean rate. For Gamma kernels every rate shifts by
// eta. L^1 distance to the target decreases as n grows and the bin range
// widens.
inline KernelSpec expsum_approx(const KernelSpec& target, int n, double eta0, double eta1) {
    const double alpha = singular_alpha(target);
    double eta_shift = 0.0;
    if (const auto* g = std::get_if<Gamma>(&target.v)) eta_shift = g->eta;
    if (alpha == 0.0)
        throw std::invalid_argument("expsum_approx: target must be Fractional or Gamma");
    if (alpha == 1.0) {
        // K(t) = e^(-eta t): already a one-term exponential sum.
        return kernel_expsum({{1.0, eta_shift}});
    }
    if (n < 1) throw std::invalid_argument("expsum_approx: n must be >= 1");
    if (!(eta0 > 0.0 && eta1 > eta0))
        throw std::invalid_argument("expsum_approx: need 0 < eta0 < eta1");

    const double norm = std::tgamma(alpha) * std::tgamma(1.0 - alpha);
    const double r = std::pow(eta1 / eta0, 1.0 / n);
    std::vector<ExpSumTerm> terms;
    terms.reserve(n);
    double lo = eta0;
    for (int i = 0; i < n; ++i) {
        const double hi = lo * r;
        const double p1 = std::pow(hi, 1.0 - alpha) - std::pow(lo, 1.0 - alpha);
        const double p2 = std::pow(hi, 2.0 - alpha) - std::pow(lo, 2.0 - alpha);
        const double mass = p1 / ((1.0 - alpha) * norm);
        const double mean_rate = ((1.0 - alpha) / (2.0 - alpha)) * p2 / p1;
        terms.push_back({mass, mean_rate + eta_shift});
        lo = hi;
    }
    return kernel_expsum(std::move(terms));
}

} // namespace svolterra
