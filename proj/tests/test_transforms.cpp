#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "svolterra/transforms.hpp"

using namespace svolterra;
using cplx = std::complex<double>;

namespace {

HestonModel classical_model() {
    HestonModel m;
    m.kernel = kernel_constant(1.0);
    m.triplet.b = -2.0;
    m.triplet.c = 0.09;
    m.rho = -0.7;
    m.g0 = curve_affine_in_k(0.04, 0.08);
    return m;
}

}  // namespace

TEST_CASE("transform with constant integrand is an exact Fubini integral") {
    // With b = c = 0 and no jumps, F(psi) = f0 identically, so the exponent
    // collapses to f0 * int_0^T g0.
    RiccatiSpec s;
    s.f0 = cplx(0.0, 0.8);
    const auto k = kernel_fractional(0.1);
    const auto g0 = curve_affine_in_k(0.3, 0.5);
    const double T = 1.0;
    const auto r = fourier_laplace(s, k, g0, T, 600);
    REQUIRE(r.ok);
    const cplx expect = s.f0 * (0.3 * T + 0.5 * iik_value(k, T));
    REQUIRE(std::abs(r.exponent - expect) < 1e-12);
    REQUIRE(std::abs(r.value - std::exp(expect)) < 1e-12);
}

TEST_CASE("hawkes transform reduces to the Poisson formula for a zero kernel") {
    // No excitation: N_T is Poisson with mean Lambda = int_0^T g0, and
    // E[e^{iaN_T}] = exp(Lambda (e^{ia} - 1)).
    const auto k = kernel_constant(0.0);
    const auto g0 = curve_affine_in_k(1.3, 0.0);
    const double T = 2.0, a = 0.9;
    const auto r = hawkes_transform(0.0, cplx(0.0, a), k, g0, T, 500);
    const double lambda = 1.3 * T;
    const cplx expect = std::exp(lambda * (std::exp(cplx(0.0, a)) - 1.0));
    REQUIRE(std::abs(r.value - expect) < 1e-10);
}

TEST_CASE("hawkes transform argument guards") {
    const auto k = kernel_expsum({{0.5, 1.0}});
    const auto g0 = curve_affine_in_k(1.0, 0.0);
    REQUIRE_THROWS_AS(hawkes_transform(cplx(0.1, 0.0), cplx(0.0, 1.0), k, g0, 1.0, 100),
                      std::domain_error);
    REQUIRE_THROWS_AS(hawkes_transform(0.0, cplx(0.5, 1.0), k, g0, 1.0, 100), std::domain_error);
}

TEST_CASE("model validation") {
    HestonModel m = classical_model();
    REQUIRE_NOTHROW(validate(m));
    m.rho = -1.5;
    REQUIRE_THROWS_AS(validate(m), std::invalid_argument);
    m.rho = 0.5;
    m.triplet.c = 0.0;
    REQUIRE_THROWS_AS(validate(m), std::invalid_argument);  // correlation without diffusion
    m.rho = 0.0;
    REQUIRE_NOTHROW(validate(m));
}

TEST_CASE("characteristic function properties") {
    const HestonModel m = classical_model();
    const double T = 1.0;
    const int steps = 1024;

    SECTION("cf(0) = 1 and |cf| <= 1") {
        REQUIRE(std::abs(heston_cf_logprice(m, 0.0, T, steps).value - 1.0) < 1e-14);
        for (double v : {0.5, 2.0, 7.0})
            REQUIRE(std::abs(heston_cf_logprice(m, v, T, steps).value) <= 1.0 + 1e-12);
    }
    SECTION("hermitian symmetry") {
        for (double v : {0.7, 3.0}) {
            const cplx plus = heston_cf_logprice(m, v, T, steps).value;
            const cplx minus = heston_cf_logprice(m, -v, T, steps).value;
            REQUIRE(std::abs(minus - std::conj(plus)) < 1e-13);
        }
    }
    SECTION("martingale identity: joint transform at h1 = 1, h0 = 0 is exactly 1") {
        const auto r = heston_joint_transform(m, 0.0, 1.0, T, steps);
        REQUIRE(std::abs(r.value - 1.0) <= 1e-12);
    }
    SECTION("argument guards") {
        REQUIRE_THROWS_AS(heston_joint_transform(m, cplx(0.1, 0.0), 0.5, T, steps),
                          std::domain_error);
        REQUIRE_THROWS_AS(heston_joint_transform(m, 0.0, cplx(1.2, 0.0), T, steps),
                          std::domain_error);
        HestonModel un = m;
        un.allow_unchecked_args = true;
        REQUIRE_NOTHROW(heston_joint_transform(un, 0.0, cplx(1.2, 0.0), T, steps));
    }
}

TEST_CASE("classical Heston transform matches the ODE oracle") {
    const HestonModel m = classical_model();
    for (double v : {0.5, 1.0, 2.0, 5.0}) {
        const cplx got = heston_cf_logprice(m, v, 1.0, 4096).value;
        const cplx want = oracles::classical_heston_cf(-2.0, 0.09, -0.7, 0.04, 0.08, v, 1.0);
        REQUIRE(std::abs(got - want) / std::abs(want) < 1e-6);
    }
}

TEST_CASE("transform survives jumps and singular kernels together") {
    HestonModel m;
    m.kernel = kernel_gamma(0.1, 1.0);
    m.triplet.b = -1.0;
    m.triplet.c = 0.3;
    m.triplet.nu = jump_exponential(1.0, 4.0);
    m.rho = -0.5;
    m.g0 = curve_affine_in_k(0.04, 0.06);
    const auto r = heston_cf_logprice(m, 2.0, 1.0, 2000);
    REQUIRE(r.ok);
    REQUIRE(std::abs(r.value) <= 1.0 + 1e-12);
    // martingale identity holds here too
    REQUIRE(std::abs(heston_joint_transform(m, 0.0, 1.0, 1.0, 2000).value - 1.0) <= 1e-12);
}

TEST_CASE("call prices are coherent") {
    const HestonModel m = classical_model();
    const double s0 = 100.0, T = 1.0;
    const int steps = 1024;

    double prev = 1e300;
    for (double strike : {80.0, 90.0, 100.0, 110.0, 120.0}) {
        const auto r = price_european_call(m, s0, strike, T, steps);
        REQUIRE(r.converged);
        REQUIRE(r.price >= std::max(s0 - strike, 0.0) - 1e-9);
        REQUIRE(r.price <= s0);
        REQUIRE(r.price < prev);  // decreasing in strike
        prev = r.price;
        REQUIRE(r.p1 >= -1e-9);
        REQUIRE(r.p1 <= 1.0 + 1e-9);
        REQUIRE(r.p2 >= -1e-9);
        REQUIRE(r.p2 <= 1.0 + 1e-9);
    }

    // put-call parity at zero rates: C - P = S0 - K, with P from the same
    // probabilities: P = K(1 - P2) - S0(1 - P1).
    const double strike = 105.0;
    const auto r = price_european_call(m, s0, strike, T, steps);
    const double put = strike * (1.0 - r.p2) - s0 * (1.0 - r.p1);
    REQUIRE(r.price - put == Catch::Approx(s0 - strike).margin(1e-8));
}

TEST_CASE("forward curve updates") {
    const auto k = kernel_expsum({{0.5, 1.0}, {1.0, 4.0}});
    const auto g0 = curve_affine_in_k(0.04, 0.1);
    const Grid g{1.0, 100};

    SECTION("flat driver leaves the input curve untouched") {
        std::vector<double> dz(50, 0.0);
        const auto fwd = forward_curve_from_path(g0, k, dz, g, 0.5);
        REQUIRE(fwd.t.size() == 50);
        for (std::size_t i = 0; i < fwd.t.size(); ++i)
            REQUIRE(fwd.y[i] == Catch::Approx(curve_value(g0, k, fwd.t[i])).epsilon(1e-12));
    }
    SECTION("a single increment adds one kernel echo") {
        std::vector<double> dz(50, 0.0);
        dz[10] = 0.3;  // cell [0.10, 0.11], midpoint 0.105
        const auto fwd = forward_curve_from_path(g0, k, dz, g, 0.5);
        for (std::size_t i = 0; i < fwd.t.size(); ++i) {
            const double u = fwd.t[i];
            const double expect = curve_value(g0, k, u) + eval_kernel(k, u - 0.105) * 0.3;
            REQUIRE(fwd.y[i] == Catch::Approx(expect).epsilon(1e-12));
        }
    }
    SECTION("t must sit on the grid") {
        std::vector<double> dz(50, 0.0);
        REQUIRE_THROWS_AS(forward_curve_from_path(g0, k, dz, g, 0.503), std::invalid_argument);
    }
}
