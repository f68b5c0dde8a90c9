#pragma once

// Model data: affine characteristics (b, c, nu) of the driving semimartingale
// and the input curve g0. The jump measure nu is supported on (0, infinity)
// and integrates zeta^2.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <variant>
#include <vector>

#include "kernels.hpp"
#include "resolvent.hpp"

namespace svolterra {

struct JumpNone {};

struct JumpAtom {
    double zeta;   // jump size, > 0
    double mass;   // point mass, > 0
};

struct JumpAtoms {
    std::vector<JumpAtom> atoms;
};

// density m * rho * exp(-rho * zeta) on (0, infinity); total mass m
struct JumpExponential {
    double m;
    double rho;
};

struct JumpMeasure {
    std::variant<JumpNone, JumpAtoms, JumpExponential> v;
};

inline JumpMeasure jump_none() { return {JumpNone{}}; }

inline JumpMeasure jump_atoms(std::vector<JumpAtom> atoms) {
    for (const auto& a : atoms) {
        if (!(a.zeta > 0.0)) throw std::invalid_argument("JumpAtoms: zeta must be > 0");
        if (!(a.mass > 0.0)) throw std::invalid_argument("JumpAtoms: mass must be > 0");
    }
    return {JumpAtoms{std::move(atoms)}};
}

inline JumpMeasure jump_exponential(double m, double rho) {
    if (!(m > 0.0)) throw std::invalid_argument("JumpExponential: m must be > 0");
    if (!(rho > 0.0)) throw std::invalid_argument("JumpExponential: rho must be > 0");
    return {JumpExponential{m, rho}};
}

inline bool jump_is_none(const JumpMeasure& nu) {
    return std::holds_alternative<JumpNone>(nu.v);
}

// J(z) = int (e^{z zeta} - 1 - z zeta) nu(d zeta). For the exponential law the
// integral converges only for Re z < rho; outside that half-plane the model has
// no exponential moment and evaluation is a domain error.
inline std::complex<double> jump_transform(const JumpMeasure& nu, std::complex<double> z) {
    struct V {
        std::complex<double> z;
        std::complex<double> operator()(const JumpNone&) const { return 0.0; }
        std::complex<double> operator()(const JumpAtoms& a) const {
            std::complex<double> s = 0.0;
            for (const auto& at : a.atoms) s += at.mass * (std::exp(z * at.zeta) - 1.0 - z * at.zeta);
            return s;
        }
        std::complex<double> operator()(const JumpExponential& e) const {
            if (z.real() >= e.rho)
                throw std::domain_error("jump_transform: Re z >= rho for the exponential jump law");
            return e.m * (e.rho / (e.rho - z) - 1.0 - z / e.rho);
        }
    };
    return std::visit(V{z}, nu.v);
}

// J'(z) = int zeta (e^{z zeta} - 1) nu(d zeta), same domain as jump_transform.
inline std::complex<double> jump_transform_prime(const JumpMeasure& nu, std::complex<double> z) {
    struct V {
        std::complex<double> z;
        std::complex<double> operator()(const JumpNone&) const { return 0.0; }
        std::complex<double> operator()(const JumpAtoms& a) const {
            std::complex<double> s = 0.0;
            for (const auto& at : a.atoms) s += at.mass * at.zeta * (std::exp(z * at.zeta) - 1.0);
            return s;
        }
        std::complex<double> operator()(const JumpExponential& e) const {
            if (z.real() >= e.rho)
                throw std::domain_error(
                    "jump_transform_prime: Re z >= rho for the exponential jump law");
            return e.m * (e.rho / ((e.rho - z) * (e.rho - z)) - 1.0 / e.rho);
        }
    };
    return std::visit(V{z}, nu.v);
}

inline double jump_total_mass(const JumpMeasure& nu) {
    struct V {
        double operator()(const JumpNone&) const { return 0.0; }
        double operator()(const JumpAtoms& a) const {
            double s = 0.0;
            for (const auto& at : a.atoms) s += at.mass;
            return s;
        }
        double operator()(const JumpExponential& e) const { return e.m; }
    };
    return std::visit(V{}, nu.v);
}

inline double jump_second_moment(const JumpMeasure& nu) {
    struct V {
        double operator()(const JumpNone&) const { return 0.0; }
        double operator()(const JumpAtoms& a) const {
            double s = 0.0;
            for (const auto& at : a.atoms) s += at.mass * at.zeta * at.zeta;
            return s;
        }
        double operator()(const JumpExponential& e) const { return 2.0 * e.m / (e.rho * e.rho); }
    };
    return std::visit(V{}, nu.v);
}

inline double jump_first_moment(const JumpMeasure& nu) {
    struct V {
        double operator()(const JumpNone&) const { return 0.0; }
        double operator()(const JumpAtoms& a) const {
            double s = 0.0;
            for (const auto& at : a.atoms) s += at.mass * at.zeta;
            return s;
        }
        double operator()(const JumpExponential& e) const { return e.m / e.rho; }
    };
    return std::visit(V{}, nu.v);
}

// int zeta^2 e^{x zeta} nu(d zeta), the curvature bound entering moment checks.
inline double jump_exp_second_moment(const JumpMeasure& nu, double x) {
    struct V {
        double x;
        double operator()(const JumpNone&) const { return 0.0; }
        double operator()(const JumpAtoms& a) const {
            double s = 0.0;
            for (const auto& at : a.atoms) s += at.mass * at.zeta * at.zeta * std::exp(x * at.zeta);
            return s;
        }
        double operator()(const JumpExponential& e) const {
            if (x >= e.rho)
                throw std::domain_error("jump_exp_second_moment: x >= rho for the exponential jump law");
            const double d = e.rho - x;
            return 2.0 * e.m * e.rho / (d * d * d);
        }
    };
    return std::visit(V{x}, nu.v);
}

// Affine characteristics of Z: drift b X, diffusion c X, jump compensator nu X.
struct AffineTriplet {
    double b = 0.0;
    double c = 0.0;
    JumpMeasure nu{JumpNone{}};
};

inline void validate(const AffineTriplet& t) {
    if (!(t.c >= 0.0)) throw std::invalid_argument("AffineTriplet: c must be >= 0");
}

// Lipschitz scale of the affine characteristics on X >= 0; enters the
// modulus-of-continuity bound.
inline double affine_kappa(const AffineTriplet& t) {
    return std::abs(t.b) + t.c + jump_second_moment(t.nu);
}

// Input curve g0. AffineInK is g0(t) = x0 + theta * int_0^t K, the stationary
// shape; NonDecreasingTable is a tabulated curve, linearly interpolated.
struct AffineInK {
    double x0;
    double theta;
};

struct NonDecreasingTable {
    std::vector<double> t;
    std::vector<double> g;
};

struct InputCurve {
    std::variant<AffineInK, NonDecreasingTable> v;
};

inline InputCurve curve_affine_in_k(double x0, double theta) {
    if (!(x0 >= 0.0)) throw std::invalid_argument("AffineInK: x0 must be >= 0");
    if (!(theta >= 0.0)) throw std::invalid_argument("AffineInK: theta must be >= 0");
    return {AffineInK{x0, theta}};
}

inline InputCurve curve_table(std::vector<double> t, std::vector<double> g) {
    if (t.size() != g.size() || t.size() < 2)
        throw std::invalid_argument("NonDecreasingTable: need matching t/g with at least 2 rows");
    if (t.front() != 0.0) throw std::invalid_argument("NonDecreasingTable: t must start at 0");
    for (size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("NonDecreasingTable: t must be increasing");
    for (double v : g)
        if (!(v >= 0.0)) throw std::invalid_argument("NonDecreasingTable: g must be >= 0");
    for (size_t i = 1; i < g.size(); ++i)
        if (g[i] < g[i - 1])
            throw std::invalid_argument("NonDecreasingTable: g must be non-decreasing");
    return {NonDecreasingTable{std::move(t), std::move(g)}};
}

inline double curve_value(const InputCurve& c, const KernelSpec& k, double t) {
    if (const auto* a = std::get_if<AffineInK>(&c.v)) return a->x0 + a->theta * ik_value(k, t);
    const auto& tab = std::get<NonDecreasingTable>(c.v);
    if (t < tab.t.front() - 1e-12 || t > tab.t.back() + 1e-12)
        throw std::domain_error("curve_value: t outside the tabulated range");
    const auto it = std::upper_bound(tab.t.begin(), tab.t.end(), t);
    const size_t i = std::min(tab.t.size() - 1, static_cast<size_t>(it - tab.t.begin()));
    if (i == 0) return tab.g.front();
    const double w = (t - tab.t[i - 1]) / (tab.t[i] - tab.t[i - 1]);
    return tab.g[i - 1] + std::min(1.0, std::max(0.0, w)) * (tab.g[i] - tab.g[i - 1]);
}

// Exact int_0^t of the curve. AffineInK integrates the kernel twice; tables
// integrate the linear interpolant piece by piece.
inline double curve_integral(const InputCurve& c, const KernelSpec& k, double t) {
    if (const auto* a = std::get_if<AffineInK>(&c.v)) return a->x0 * t + a->theta * iik_value(k, t);
    const auto& tab = std::get<NonDecreasingTable>(c.v);
    if (t < 0.0 || t > tab.t.back() + 1e-12)
        throw std::domain_error("curve_integral: t outside the tabulated range");
    double acc = 0.0;
    for (size_t i = 1; i < tab.t.size() && tab.t[i - 1] < t; ++i) {
        const double hi = std::min(t, tab.t[i]);
        const double ghi = curve_value(c, k, hi);
        acc += 0.5 * (tab.g[i - 1] + ghi) * (hi - tab.t[i - 1]);
    }
    return acc;
}

// sup of the curve over [a, b]; both shapes attain it at a breakpoint or an
// interval endpoint. Used to build thinning envelopes.
inline double curve_sup(const InputCurve& c, const KernelSpec& k, double a, double b) {
    if (const auto* aff = std::get_if<AffineInK>(&c.v)) {
        (void)aff;
        return curve_value(c, k, b);  // x0, theta >= 0 and IK nondecreasing
    }
    const auto& tab = std::get<NonDecreasingTable>(c.v);
    double s = std::max(curve_value(c, k, a), curve_value(c, k, b));
    for (size_t i = 0; i < tab.t.size(); ++i)
        if (tab.t[i] > a && tab.t[i] < b) s = std::max(s, tab.g[i]);
    return s;
}

// Admissibility of (g0, K): with W_h = (K(. + h) - K) * L the curve must keep
// Delta_h g0(t) - W_h(0) g0(t) - int_0^t g0(t - s) dW_h(s) >= 0 for all t, h.
// Discretized with first differences of W_h on the grid of L; the report keeps
// the worst node so callers can locate a violation.
struct AdmissibilityReport {
    double h;
    double min_residual;
    double argmin_t;
};

inline AdmissibilityReport admissibility_residual(const InputCurve& g0, const KernelSpec& k,
                                                  const ResolventFirstKind& L, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("admissibility_residual: h must be > 0");
    const Grid& g = L.grid;
    const double dt = g.dt();
    const int n_t = static_cast<int>(std::floor((g.horizon - h) / dt + 1e-9));
    if (n_t < 1)
        throw std::invalid_argument("admissibility_residual: h leaves no room inside the horizon");

    const KernelSpec shifted = kernel_shifted(k, h);
    std::vector<double> W(g.steps + 1);
    W[0] = L.atom > 0.0 ? L.atom * (eval_kernel(k, h) - eval_kernel(k, 0.0)) : 0.0;
    for (int i = 1; i <= g.steps; ++i) {
        const double s = g.node(i);
        W[i] = first_kind_apply(shifted, L, s) - first_kind_apply(k, L, s);
    }

    AdmissibilityReport rep{h, std::numeric_limits<double>::infinity(), 0.0};
    for (int j = 0; j <= n_t; ++j) {
        const double t = g.node(j);
        double r = curve_value(g0, k, t + h) - curve_value(g0, k, t) - W[0] * curve_value(g0, k, t);
        for (int i = 1; i <= j; ++i)
            r -= curve_value(g0, k, t - g.node(i)) * (W[i] - W[i - 1]);
        if (r < rep.min_residual) {
            rep.min_residual = r;
            rep.argmin_t = t;
        }
    }
    return rep;
}

inline std::vector<AdmissibilityReport> admissibility_scan(
    const InputCurve& g0, const KernelSpec& k, const Grid& grid,
    const std::vector<double>& h_list = {0.05, 0.1, 0.2, 0.5}) {
    const ResolventFirstKind L = resolvent_first_kind(k, grid);
    std::vector<AdmissibilityReport> out;
    out.reserve(h_list.size());
    for (double h : h_list) out.push_back(admissibility_residual(g0, k, L, h));
    return out;
}

} // namespace svolterra
