#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "svolterra/resolvent.hpp"

using namespace svolterra;

TEST_CASE("second-kind resolvent of a constant kernel is lambda e^{lambda t}") {
    const double lam = 2.0;
    const Grid g{1.0, 1000};
    const auto r = resolvent_second_kind(kernel_constant(lam), g);
    double worst = 0.0;
    for (int i = 0; i <= g.steps; ++i) {
        const double exact = lam * std::exp(lam * g.node(i));
        worst = std::max(worst, std::abs(r.values[i] - exact) / exact);
    }
    REQUIRE(worst < 1e-3);
    REQUIRE(r.residual < 1e-3);
}

TEST_CASE("second-kind resolvent of the unit-mass exponential kernel is constant") {
    // K(t) = e^{-t}: R = K + K*R has the closed form R = 1. The discrete
    // solution hits it at quadrature accuracy.
    const Grid g{1.0, 500};
    const auto r = resolvent_second_kind(kernel_expsum({{1.0, 1.0}}), g);
    for (int i = 0; i <= g.steps; ++i) REQUIRE(r.values[i] == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("fractional resolvent matches the Mittag-Leffler closed form") {
    const double H = 0.25, al = H + 0.5;
    const Grid g{1.0, 1000};
    const auto r = resolvent_second_kind(kernel_fractional(H), g);
    double worst = 0.0;
    for (int i = 0; i <= g.steps; ++i) {
        const double t = g.node(i);
        if (t < 0.1) continue;
        const double exact = fractional_resolvent_value(H, t);
        worst = std::max(worst, std::abs(r.values[i] - exact) / std::abs(exact));
    }
    REQUIRE(worst < 1e-2);
    (void)al;
}

TEST_CASE("singular resolvents keep the power-law head explicit") {
    const Grid g{1.0, 200};
    const auto r = resolvent_second_kind(kernel_fractional(0.1), g);
    REQUIRE(std::isnan(r.values[0]));
    REQUIRE(r.head_terms >= 1);
    REQUIRE(r.residual < 1e-2);
    // near zero the kernel itself dominates: R(t)/K(t) -> 1
    const double t = g.node(1);
    REQUIRE(r.values[1] / eval_kernel(kernel_fractional(0.1), t) ==
            Catch::Approx(1.0).margin(0.2));
}

TEST_CASE("resolvent residual is reported on staggered midpoints") {
    for (const auto& k : {kernel_gamma(0.2, 1.5), kernel_expsum({{0.5, 1.0}, {1.0, 4.0}})}) {
        const auto r = resolvent_second_kind(k, Grid{1.0, 800});
        REQUIRE(r.residual < 1e-4);
    }
}

TEST_CASE("first-kind resolvent inverts convolution by K") {
    SECTION("constant kernel: pure atom") {
        const auto L = resolvent_first_kind(kernel_constant(2.0), Grid{1.0, 100});
        REQUIRE(L.atom == Catch::Approx(0.5).epsilon(1e-15));
        REQUIRE(L.residual == 0.0);
    }
    SECTION("fractional kernels across the roughness range") {
        for (double H : {-0.2, 0.0, 0.3}) {
            const auto k = kernel_fractional(H);
            const auto L = resolvent_first_kind(k, Grid{1.0, 500});
            REQUIRE(L.residual < 1e-3);
            // spot-check K*L at off-grid points
            for (double s : {0.137, 0.5, 0.993})
                REQUIRE(first_kind_apply(k, L, s) == Catch::Approx(1.0).margin(1e-3));
        }
    }
    SECTION("gamma kernel needs the damped profile density") {
        const auto k = kernel_gamma(0.1, 2.0);
        const auto L = resolvent_first_kind(k, Grid{1.0, 500});
        REQUIRE(L.residual < 1e-2);
        REQUIRE(first_kind_apply(k, L, 0.75) == Catch::Approx(1.0).margin(1e-2));
    }
    SECTION("bounded kernels with K(0) > 0") {
        const auto k = kernel_expsum({{2.0, 1.0}});
        const auto L = resolvent_first_kind(k, Grid{1.0, 400});
        REQUIRE(L.atom == Catch::Approx(0.5).epsilon(1e-12));
        REQUIRE(L.residual < 1e-3);
    }
    SECTION("zero kernel has no inverse") {
        REQUIRE_THROWS_AS(resolvent_first_kind(kernel_constant(0.0), Grid{1.0, 10}),
                          std::domain_error);
    }
}

TEST_CASE("mittag-leffler series sanity") {
    // E_{1,1}(z) = e^z
    REQUIRE(mittag_leffler(1.0, 1.0, 0.7).real() == Catch::Approx(std::exp(0.7)).epsilon(1e-12));
    // E_{1,2}(z) = (e^z - 1)/z
    REQUIRE(mittag_leffler(1.0, 2.0, 0.7).real() ==
            Catch::Approx((std::exp(0.7) - 1.0) / 0.7).epsilon(1e-12));
    REQUIRE_THROWS_AS(mittag_leffler(1.5, 1.0, 0.1), std::domain_error);
}
