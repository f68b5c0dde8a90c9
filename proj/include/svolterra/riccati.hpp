#pragma once

// psi = K * F(psi) solved by collocation: a rectangle-rule predictor followed
// by a product-trapezoidal corrector whose diagonal term is implicit, solved
// per node by Newton. Plain corrector sweeps diverge once the newest-node
// weight times |F'| exceeds 1, which singular kernels reach at practical step
// sizes. Kernels enter only through the exact cell moments in QuadWeights;
// the scheme never evaluates K pointwise.

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "kernels.hpp"
#include "model.hpp"

namespace svolterra {

// Data of the quadratic map
//   F(u) = f0 + (c/2) f1^2 + (b + c f1 + lin_shift) u + (c/2) u^2 + J(f2 + u)
// with (b, c, nu) the affine triplet and J the compensated jump transform.
struct RiccatiSpec {
    std::complex<double> f0 = 0.0;
    std::complex<double> f1 = 0.0;
    std::complex<double> f2 = 0.0;
    AffineTriplet triplet;
    std::complex<double> lin_shift = 0.0; // extra linear coefficient (correlation term)
};

inline std::complex<double> riccati_F(const RiccatiSpec& s, std::complex<double> u) {
    const double c = s.triplet.c;
    std::complex<double> v = s.f0 + 0.5 * c * s.f1 * s.f1;
    v += (s.triplet.b + c * s.f1 + s.lin_shift) * u;
    v += 0.5 * c * u * u;
    v += jump_transform(s.triplet.nu, s.f2 + u);
    return v;
}

inline std::complex<double> riccati_F_prime(const RiccatiSpec& s, std::complex<double> u) {
    const double c = s.triplet.c;
    return s.triplet.b + c * s.f1 + s.lin_shift + c * u +
           jump_transform_prime(s.triplet.nu, s.f2 + u);
}

// Sufficient condition for Re psi <= 0 along the whole path:
//   Re f2 <= 0  and  Re f0 + (c/2)(Re f1)^2 + (1/2)(Re f2)^2 int zeta^2 nu <= 0.
// A complex lin_shift is first folded into (f0, f1), which needs c > 0; with
// c = 0 only a real shift keeps the linear coefficient real, anything else is
// outside the guarantee.
inline bool check_sign_condition(const RiccatiSpec& s) {
    std::complex<double> f0 = s.f0;
    std::complex<double> f1 = s.f1;
    const double c = s.triplet.c;
    if (s.lin_shift != 0.0) {
        if (c > 0.0) {
            f0 = s.f0 - s.lin_shift * s.f1 - s.lin_shift * s.lin_shift / (2.0 * c);
            f1 = s.f1 + s.lin_shift / c;
        } else if (s.lin_shift.imag() != 0.0) {
            return false;
        }
    }
    if (s.f2.real() > 0.0) return false;
    const double re_f1 = f1.real();
    const double re_f2 = s.f2.real();
    const double lhs = f0.real() + 0.5 * c * re_f1 * re_f1 +
                       0.5 * re_f2 * re_f2 * jump_second_moment(s.triplet.nu);
    return lhs <= 0.0;
}

struct PsiPath {
    Grid grid{1.0, 1};
    std::vector<std::complex<double>> psi;  // psi[0] = 0; NaN past a blow-up
    std::vector<std::complex<double>> F;    // F(psi) at the nodes
    bool blew_up = false;
    int first_bad_node = -1;
};

struct RiccatiOptions {
    double cap = 1e8;   // |psi| beyond this flags a blow-up
    bool clip = false;  // evaluate F on Re u clipped to <= 0 (stabilized variant)
};

inline PsiPath solve_riccati(const RiccatiSpec& spec, const KernelSpec& k, const Grid& g,
                             RiccatiOptions opt = {}) {
    validate(spec.triplet);
    const int n = g.steps;
    const QuadWeights qw = quad_weights(k, g);
    std::vector<double> A(n), B(n);
    for (int c = 0; c < n; ++c) {
        A[c] = qw.a(c);
        B[c] = qw.b(c);
    }

    PsiPath out;
    out.grid = g;
    out.psi.assign(n + 1, std::complex<double>(0.0, 0.0));
    out.F.assign(n + 1, std::complex<double>(0.0, 0.0));

    auto eval_F = [&](std::complex<double> u) {
        if (opt.clip && u.real() > 0.0) u = std::complex<double>(0.0, u.imag());
        return riccati_F(spec, u);
    };

    const auto nan = std::complex<double>(std::numeric_limits<double>::quiet_NaN(),
                                          std::numeric_limits<double>::quiet_NaN());
    auto fail_from = [&](int bad) {
        out.blew_up = true;
        out.first_bad_node = bad;
        for (int i = bad; i <= n; ++i) {
            out.psi[i] = nan;
            out.F[i] = nan;
        }
    };

    try {
        out.F[0] = eval_F(0.0);
    } catch (const std::domain_error&) {
        fail_from(0);
        return out;
    }

    for (int i = 1; i <= n; ++i) {
        std::complex<double> pred = 0.0;
        std::complex<double> hist = 0.0;
        for (int j = 0; j < i; ++j) {
            const int c = i - 1 - j;
            pred += qw.w[c] * out.F[j];
            hist += A[c] * out.F[j];
            if (j > 0) hist += B[i - j] * out.F[j];
        }
        try {
            // Newton on G(u) = u - hist - B[0] F(u), seeded by one explicit
            // step from the predictor. Clipped F has no usable derivative at
            // the boundary, so a degenerate or clipped Jacobian falls back to
            // a plain relaxation step.
            std::complex<double> f_new = eval_F(pred);
            std::complex<double> psi_i = hist + B[0] * f_new;
            for (int it = 0; it < 12; ++it) {
                f_new = eval_F(psi_i);
                const std::complex<double> g_res = psi_i - hist - B[0] * f_new;
                if (std::abs(g_res) <= 1e-14 * (1.0 + std::abs(psi_i))) break;
                std::complex<double> jac = 1.0;
                if (!(opt.clip && psi_i.real() > 0.0))
                    jac -= B[0] * riccati_F_prime(spec, psi_i);
                psi_i -= std::abs(jac) > 1e-12 ? g_res / jac : g_res;
            }
            f_new = eval_F(psi_i);
            if (!(std::abs(psi_i) <= opt.cap) || !std::isfinite(psi_i.real()) ||
                !std::isfinite(psi_i.imag())) {
                fail_from(i);
                return out;
            }
            out.psi[i] = psi_i;
            out.F[i] = f_new;
        } catch (const std::domain_error&) {
            fail_from(i);
            return out;
        }
    }
    return out;
}

} // namespace svolterra
