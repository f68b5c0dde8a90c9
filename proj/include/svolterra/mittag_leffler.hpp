#pragma once

// Mittag-Leffler function E_{alpha,beta}(z) = sum_{n>=0} z^n / Gamma(alpha n + beta)
// by truncated power series. The contract is alpha in (0,1], beta > 0 and
// |z| <= 50; within it the series converges in well under the term budget and
// intermediate terms stay representable.

#include <cmath>
#include <complex>
#include <stdexcept>

namespace svolterra {

inline std::complex<double> mittag_leffler(double alpha, double beta, std::complex<double> z) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::domain_error("mittag_leffler: alpha must lie in (0, 1]");
    if (!(beta > 0.0)) throw std::domain_error("mittag_leffler: beta must be > 0");
    if (std::abs(z) > 50.0)
        throw std::domain_error("mittag_leffler: |z| exceeds the series convergence budget (50)");

    constexpr int budget = 10000;
    constexpr double tol = 1e-12;

    // term_{n+1} = term_n * z * Gamma(alpha n + beta)/Gamma(alpha(n+1) + beta),
    // evaluated through lgamma so that z^n never overflows on its own.
    std::complex<long double> sum = 0.0L;
    std::complex<double> term = std::exp(-std::lgamma(beta));
    int tiny_run = 0;
    for (int n = 0; n < budget; ++n) {
        sum += std::complex<long double>(term.real(), term.imag());
        if (std::abs(term) < tol) {
            if (++tiny_run >= 2) return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
        } else {
            tiny_run = 0;
        }
        const double g0 = std::lgamma(alpha * n + beta);
        const double g1 = std::lgamma(alpha * (n + 1) + beta);
        term *= z * std::exp(g0 - g1);
        if (!std::isfinite(term.real()) || !std::isfinite(term.imag()))
            throw std::runtime_error("mittag_leffler: series term overflow");
    }
    throw std::runtime_error("mittag_leffler: term budget exhausted before convergence");
}

} // namespace svolterra
