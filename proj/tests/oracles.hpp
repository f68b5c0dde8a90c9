#pragma once

// Independent numerical oracles used by the test suite. These deliberately
// avoid the library's product-integration machinery: classical models reduce
// to scalar ODEs, which an RK4 integrator solves to far higher accuracy than
// the tolerances under test.

#include <complex>
#include <cmath>
#include <utility>

namespace oracles {

using cplx = std::complex<double>;

// u' = f0 + lin u + q u^2, u(0) = 0, integrated together with phi' = u.
// Returns (u(T), phi(T)).
inline std::pair<cplx, cplx> rk4_riccati(cplx f0, cplx lin, cplx q, double T, int steps) {
    const double h = T / steps;
    auto F = [&](cplx u) { return f0 + lin * u + q * u * u; };
    cplx u = 0.0, phi = 0.0;
    for (int i = 0; i < steps; ++i) {
        const cplx k1 = F(u);
        const cplx p1 = u;
        const cplx k2 = F(u + 0.5 * h * k1);
        const cplx p2 = u + 0.5 * h * k1;
        const cplx k3 = F(u + 0.5 * h * k2);
        const cplx p3 = u + 0.5 * h * k2;
        const cplx k4 = F(u + h * k3);
        const cplx p4 = u + h * k3;
        u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        phi += (h / 6.0) * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
    }
    return {u, phi};
}

// E[e^{i v log(S_T/S0)}] for the classical Heston model
// dY = (theta + b Y) dt + sqrt(c Y) dW, d log S = -Y/2 dt + sqrt(Y) dB,
// d<W,B> = rho dt, Y_0 = x0. The exponent is x0 psi(T) + theta int_0^T psi.
inline cplx classical_heston_cf(double b, double c, double rho, double x0, double theta,
                                double v, double T, int steps = 200000) {
    const cplx h1(0.0, v);
    const cplx f0 = 0.5 * (h1 * h1 - h1);
    const cplx lin = b + rho * std::sqrt(c) * h1;
    const auto [psi, ipsi] = rk4_riccati(f0, lin, 0.5 * c, T, steps);
    return std::exp(x0 * psi + theta * ipsi);
}

}  // namespace oracles
