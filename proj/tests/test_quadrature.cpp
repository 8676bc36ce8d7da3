#include <doctest.h>

#include <cmath>
#include <numbers>

#include "entropy/quadrature.hpp"

using namespace entropy;

TEST_CASE("Kronrod rule is exact on low-degree polynomials") {
    const QuadratureConfig cfg{1e-13, 10};
    for (int k = 0; k <= 20; ++k) {
        const auto f = [k](double x) { return std::pow(x, k); };
        const QuadratureResult r = integrate_adaptive(f, 0.0, 2.0, cfg);
        CAPTURE(k);
        CHECK(r.value == doctest::Approx(std::pow(2.0, k + 1) / (k + 1)).epsilon(1e-14));
    }
}

TEST_CASE("adaptive refinement handles endpoint singularities") {
    const QuadratureConfig cfg{1e-10, 4000};
    const QuadratureResult r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, cfg);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.panels > 1);

    const double log_int = integrate_or_throw([](double x) { return std::log(x); }, 0.0, 1.0, cfg);
    CHECK(log_int == doctest::Approx(-1.0).epsilon(1e-10));

    const double sine = integrate_or_throw([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, cfg);
    CHECK(sine == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("degenerate and reversed intervals") {
    const QuadratureConfig cfg;
    CHECK(integrate_adaptive([](double) { return 1.0; }, 3.0, 3.0, cfg).value == 0.0);
    CHECK(integrate_or_throw([](double x) { return x; }, 1.0, 0.0, cfg) == doctest::Approx(-0.5));
}

TEST_CASE("budget exhaustion is reported, then thrown") {
    const QuadratureConfig tiny{1e-14, 2};
    const auto f = [](double x) { return 1.0 / std::sqrt(x); };
    const QuadratureResult r = integrate_adaptive(f, 0.0, 1.0, tiny);
    CHECK_FALSE(r.converged);
    CHECK(r.error > tiny.abs_tol);
    CHECK(r.panels == 2);
    CHECK_THROWS_AS(integrate_or_throw(f, 0.0, 1.0, tiny), QuadratureError);
}
