#include <doctest.h>

#include <cmath>
#include <numbers>

#include "entropy/harness.hpp"
#include "entropy/json_io.hpp"
#include "entropy/rng.hpp"
#include "entropy/volterra.hpp"

using namespace entropy;

namespace {

const KernelConfig kCfg{};
const QuadratureConfig kQuad{1e-12, 4000};

// ∫₀^lo K_lo K_hi ds at β = 1 with s = lo − v², composite Simpson in v.
// Only used for well-separated anchors, where the integrand is continuous.
double simpson_inner(double lo, double hi) {
    const double gap = hi - lo;
    const auto f = [gap](double v) {
        if (v == 0.0) return 0.0;
        const double w = v * v + gap;
        return 2.0 / (-std::log(v * v)) / (std::sqrt(w) * -std::log(w));
    };
    const int steps = 400000;
    const double b = std::sqrt(lo);
    const double h = b / steps;
    double s = f(0.0) + f(b);
    for (int i = 1; i < steps; ++i) s += f(i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("kernel values") {
    CHECK(kernel_eval(std::exp(-4.0), 0.0, kCfg) == doctest::Approx(std::exp(2.0) / 4.0).epsilon(1e-14));
    CHECK(kernel_eval(std::exp(-9.0), 0.0, kCfg) == doctest::Approx(10.001903477835757).epsilon(1e-14));
    CHECK(kernel_eval(0.05, 0.05, kCfg) == 0.0);
    CHECK(kernel_eval(0.02, 0.07, kCfg) == 0.0);
    CHECK_THROWS_AS(kernel_eval(0.2, 0.0, kCfg), std::domain_error);
    CHECK_THROWS_AS(kernel_eval(0.05, -0.01, kCfg), std::domain_error);
    CHECK_THROWS_AS((KernelConfig{0.2, 1.0}.validate()), std::domain_error);
    CHECK_THROWS_AS((KernelConfig{0.1, 0.9}.validate()), std::domain_error);
}

TEST_CASE("kernel norms: closed form and quadrature") {
    CHECK(kernel_norm_sq(std::exp(-4.0), kCfg) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(kernel_norm_sq(std::exp(-8.0), kCfg) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(kernel_norm_sq(0.0, kCfg) == 0.0);
    const KernelConfig b2{0.1, 2.0};
    CHECK(kernel_norm_sq(std::exp(-4.0), b2) == doctest::Approx(1.0 / 192.0).epsilon(1e-14));

    for (int i = 0; i < 20; ++i) {
        const double t = std::pow(10.0, -6.0 + 5.0 * i / 19.0);
        const NormCheck c = kernel_norm_sq_checked(t, kCfg, kQuad);
        CAPTURE(t);
        CHECK(std::abs(c.quadrature - c.closed_form) <= 1e-8);
        const NormCheck c2 = kernel_norm_sq_checked(t, b2, kQuad);
        CHECK(std::abs(c2.quadrature - c2.closed_form) <= 1e-8);
    }
}

TEST_CASE("kernel inner products") {
    // High-precision reference values (50-digit evaluation of the defining integral).
    CHECK(kernel_inner(0.05, 0.07, kCfg, kQuad) == doctest::Approx(0.158997627226917).epsilon(1e-12));
    CHECK(kernel_inner(1e-5, 0.1, kCfg, kQuad) == doctest::Approx(0.000654377924640239).epsilon(1e-11));
    CHECK(kernel_inner(0.03, 0.030001, kCfg, kQuad) == doctest::Approx(0.219012543979558).epsilon(1e-11));

    for (const auto& [lo, hi] : {std::pair{0.01, 0.02}, {0.05, 0.07}, {0.03, 0.09}, {0.002, 0.1}}) {
        CAPTURE(lo);
        CAPTURE(hi);
        const double q = kernel_inner(lo, hi, kCfg, kQuad);
        CHECK(q == doctest::Approx(simpson_inner(lo, hi)).epsilon(1e-6));
        CHECK(kernel_inner(hi, lo, kCfg, kQuad) == q);
        // Cauchy–Schwarz.
        CHECK(q * q <= kernel_norm_sq(lo, kCfg) * kernel_norm_sq(hi, kCfg));
    }
    CHECK(kernel_inner(0.0, 0.05, kCfg, kQuad) == 0.0);
}

TEST_CASE("kernel gram caching and differences") {
    KernelGram gram(kCfg, kQuad);
    const double a = gram.inner(0.02, 0.06);
    CHECK(gram.inner(0.06, 0.02) == a);
    CHECK(gram.evaluations() == 1);
    const double d = gram.difference_inner(0.06, 0.02, 0.06, 0.02);
    CHECK(d == doctest::Approx(kernel_norm_sq(0.06, kCfg) + kernel_norm_sq(0.02, kCfg) - 2.0 * a).epsilon(1e-9));
    CHECK(d > 0.0);
}

TEST_CASE("modulus of continuity") {
    // t = 0: lhs = ‖K_u‖ = |ln u|^{-1/2}, half the right side.
    const double u = std::exp(-9.0);
    const ModulusCheck z = modulus_check(0.0, u, kCfg, kQuad);
    CHECK(z.rhs == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(z.lhs == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(z.holds);

    for (int i = 0; i < 10; ++i) {
        const double t = 0.09 * i / 9.0;
        for (int j = 0; j < 10; ++j) {
            const double step = std::pow(10.0, -8.0 + 6.0 * j / 9.0);
            if (t + step > kCfg.r) continue;
            const ModulusCheck m = modulus_check(t, step, kCfg, kQuad);
            CAPTURE(t);
            CAPTURE(step);
            CHECK(m.holds);
            CHECK(m.lhs <= m.rhs + 1e-10);
        }
    }
    CHECK_THROWS(modulus_check(0.05, 0.0, kCfg, kQuad));
    CHECK_THROWS(modulus_check(0.09, 0.02, kCfg, kQuad));
}

TEST_CASE("negative dependence of increments") {
    CHECK(negative_dependence(0.01, 0.01, 0.05, 0.08, kCfg, kQuad) == 0.0);
    CHECK(negative_dependence(0.01, 0.03, 0.05, 0.05, kCfg, kQuad) == 0.0);
    CHECK_THROWS_AS(negative_dependence(0.03, 0.01, 0.05, 0.08, kCfg, kQuad), std::invalid_argument);
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        CounterRng rng(81, trial);
        std::array<double, 4> p{};
        for (double& x : p) x = rng.uniform(0.0, kCfg.r);
        std::sort(p.begin(), p.end());
        CHECK(negative_dependence(p[0], p[1], p[2], p[3], kCfg, kQuad) <= 1e-10);
    }
}

TEST_CASE("kernel profile is decreasing and convex") {
    const KernelShape s = check_kernel_shape(kCfg);
    CHECK(s.decreasing);
    CHECK(s.convex);
    CHECK(check_kernel_shape(KernelConfig{0.1, 2.0}).convex);
}

TEST_CASE("interval measures use half-open intervals") {
    const IntervalMeasure mu({{0.05, 0.5}, {0.02, -0.25}, {0.05, 0.25}});
    CHECK(mu.atoms().size() == 2);
    CHECK(mu.total_variation() == 1.0);
    CHECK(mu.variation(0.0, 0.05) == 1.0);
    CHECK(mu.variation(0.05, 0.1) == 0.0);
    CHECK(mu.signed_mass(0.0, 0.05) == 0.5);
    CHECK(mu.signed_mass(0.02, 0.1) == 0.75);
    CHECK(mu.max_point() == 0.05);
    CHECK_THROWS(IntervalMeasure({{0.0, 1.0}}));

    const IntervalMeasure dens({}, {{0.0, 0.05, 4.0}, {0.05, 0.1, -2.0}});
    CHECK(dens.total_variation() == doctest::Approx(0.3));
    CHECK(dens.signed_mass(0.025, 0.075) == doctest::Approx(0.05));
    CHECK_FALSE(dens.is_atomic());

    const auto [plus, minus] = hahn_split(mu);
    CHECK(plus.total_variation() == 0.75);
    CHECK(minus.atoms() == std::vector<IntervalMeasure::Atom>{{0.02, 0.25}});
}

TEST_CASE("dyadic partitions") {
    const DyadicPartition halves(0.1, {{1, 1}, {1, 0}});
    CHECK(halves.intervals().front() == BinaryInterval{1, 0});
    CHECK(halves.locate(0.05) == 0);
    CHECK(halves.locate(0.0500001) == 1);
    CHECK(halves.locate(0.1) == 1);
    CHECK_THROWS(halves.locate(0.0));
    CHECK(halves.anchors() == std::vector<double>{0.0, 0.05});

    CHECK_THROWS(DyadicPartition(0.1, {{1, 0}}));
    CHECK_THROWS(DyadicPartition(0.1, {{1, 0}, {2, 3}}));
    CHECK_THROWS(DyadicPartition(0.1, {{0, 0}, {1, 0}}));
    CHECK_THROWS(DyadicPartition(0.1, {{1, 2}, {1, 0}}));
    CHECK_NOTHROW(DyadicPartition(0.1, {{2, 0}, {2, 1}, {1, 1}}));

    CHECK(BinaryInterval{1, 1}.contains({3, 5}));
    CHECK_FALSE(BinaryInterval{1, 1}.contains({3, 2}));
}

TEST_CASE("essential partition examples") {
    SUBCASE("single atom, n = 4") {
        // Divides down to level 4; each level keeps the sibling, level 5 keeps both halves.
        const IntervalMeasure mu({{0.037, 1.0}});
        const DyadicPartition p = essential_partition(mu, 4, kCfg);
        CHECK(p.size() == 6);
        CHECK(p.divided().size() == 5);
        CHECK(p.terminal_level_sum() == 4);
        const BinaryInterval& home = p.intervals()[p.locate(0.037)];
        CHECK(home.level == 5);
    }
    SUBCASE("zero measure") {
        const DyadicPartition p = essential_partition(IntervalMeasure{}, 7, kCfg);
        CHECK(p.intervals() == std::vector<BinaryInterval>{{1, 0}, {1, 1}});
        CHECK(p.terminal_level_sum() == 0);
    }
    CHECK_THROWS_AS(essential_partition(IntervalMeasure({{0.05, 1.5}}), 4, kCfg), std::domain_error);
    CHECK_THROWS_AS(essential_partition(IntervalMeasure({{0.05, 1.0}}), 0, kCfg), std::invalid_argument);
    // A unit atom divides down to level n, past the addressable depth for n >= 62.
    CHECK_THROWS_AS(essential_partition(IntervalMeasure({{0.05, 1.0}}), 70, kCfg), DepthLimitError);
}

TEST_CASE("essential partitions of random measures") {
    for (const int n : {2, 5, 8, 16, 32}) {
        for (std::uint64_t trial = 0; trial < 100; ++trial) {
            CounterRng rng(83, trial);
            const IntervalMeasure mu = random_interval_measure(rng, kCfg.r, 1 + static_cast<int>(rng.below(30)));
            const DyadicPartition p = essential_partition(mu, n, kCfg);
            CHECK(p.size() <= static_cast<std::size_t>(2 * (n + 1)));
            CHECK(p.terminal_level_sum() <= n);
            for (const auto& I : p.intervals()) {
                CHECK(mu.variation(I.left(kCfg.r), I.right(kCfg.r)) < static_cast<double>(I.level) / n);
            }
            for (const auto& I : p.divided()) {
                CHECK(mu.variation(I.left(kCfg.r), I.right(kCfg.r)) >= static_cast<double>(I.level) / n);
            }
        }
    }
}

TEST_CASE("finite-rank operator examples") {
    const DyadicPartition halves(0.1, {{1, 0}, {1, 1}});
    const IntervalMeasure right({{0.07, 1.0}});
    CHECK(finite_rank_apply(right, halves).terms() == std::vector<KernelCombination::Term>{{0.05, 1.0}});
    CHECK(vstar_apply(right).terms() == std::vector<KernelCombination::Term>{{0.07, 1.0}});
    // Anchor 0 carries K_0 = 0.
    CHECK(finite_rank_apply(IntervalMeasure({{0.03, 1.0}}), halves).terms().empty());

    KernelGram gram(kCfg, kQuad);
    const ApproximationError e = approximation_error(right, halves, 4, gram);
    const double expect = kernel_norm_sq(0.07, kCfg) + kernel_norm_sq(0.05, kCfg) - 2.0 * 0.158997627226917;
    CHECK(e.err * e.err == doctest::Approx(expect).epsilon(1e-10));
    CHECK(e.diag_bound == doctest::Approx(4.0 / (std::numbers::ln2 * 4.0)).epsilon(1e-15));
    CHECK(e.bound == doctest::Approx(4.0 / std::sqrt(std::numbers::ln2 * 4.0)).epsilon(1e-15));

    const ApproximationError left = approximation_error(IntervalMeasure({{0.03, 1.0}}), halves, 4, gram);
    CHECK(left.err == doctest::Approx(std::sqrt(kernel_norm_sq(0.03, kCfg))).epsilon(1e-12));
    CHECK_THROWS(approximation_error(IntervalMeasure({}, {{0.0, 0.1, 1.0}}), halves, 4, gram));

    // An atom can never sit on its interval's left end, so check the
    // difference K_x − K_{t_I} with x = t_I directly, and the zero measure.
    const KernelCombination same({{0.05, 1.0}, {0.05, -1.0}});
    CHECK(same.norm(gram) == 0.0);
    CHECK(approximation_error(IntervalMeasure{}, halves, 4, gram).err == 0.0);
}

TEST_CASE("approximation error matches the direct norm and obeys the bounds") {
    KernelGram gram(kCfg, {1e-10, 4000});
    for (const int n : {8, 16, 32}) {
        for (std::uint64_t trial = 0; trial < 30; ++trial) {
            CounterRng rng(85, trial);
            const IntervalMeasure mu = random_interval_measure(rng, kCfg.r, 1 + static_cast<int>(rng.below(12)));
            const DyadicPartition p = essential_partition(mu, n, kCfg);
            const ApproximationError e = approximation_error(mu, p, n, gram);
            const double direct = (vstar_apply(mu) - finite_rank_apply(mu, p)).norm(gram);
            CHECK(e.err == doctest::Approx(direct).epsilon(1e-7));
            CHECK(e.within_bound);
            CHECK(e.err <= e.bound);
            CHECK(e.diag_plus <= e.diag_bound + 1e-8);
            CHECK(e.diag_minus <= e.diag_bound + 1e-8);
            CHECK(e.cross_plus <= 1e-8);
            CHECK(e.cross_minus <= 1e-8);
            CHECK(e.min_gram_eigenvalue >= -1e-8);
            CHECK(e.partition_size == p.size());
        }
    }
}

TEST_CASE("gram matrices and eigenvalues") {
    KernelGram gram(kCfg, kQuad);
    const std::vector<double> pts = {0.01, 0.03, 0.05, 0.09};
    const std::vector<double> g = gram_matrix(pts, gram);
    REQUIRE(g.size() == 16);
    CHECK(g[1] == g[4]);
    CHECK(g[0] == doctest::Approx(kernel_norm_sq(0.01, kCfg)).epsilon(1e-10));
    CHECK(min_eigenvalue(g, 4) > 0.0);
    CHECK(min_eigenvalue(std::vector<double>{2.0, 1.0, 1.0, 2.0}, 2) == doctest::Approx(1.0));
}

TEST_CASE("auxiliary partition and split norm") {
    CHECK(auxiliary_level(1) == 0);
    CHECK(auxiliary_level(16) == 1);
    CHECK(auxiliary_level(17) == 2);
    CHECK(auxiliary_level(256) == 2);

    KernelGram gram(kCfg, {1e-10, 4000});
    for (const int n : {16, 32, 48}) {
        const int m = auxiliary_level(n);
        for (std::uint64_t trial = 0; trial < 20; ++trial) {
            CounterRng rng(87, trial);
            const IntervalMeasure mu = random_interval_measure(rng, kCfg.r, 1 + static_cast<int>(rng.below(12)));
            const DyadicPartition p = essential_partition(mu, n, kCfg);
            const DyadicPartition e = auxiliary_partition(p, n);
            CHECK(static_cast<double>(e.size()) <= 2.0 * std::pow(n, 0.25));
            for (const auto& I : e.intervals()) CHECK(I.level <= m);

            double worst = 0.0;
            for (const auto& J : p.intervals()) {
                const double mid = 0.5 * (J.left(kCfg.r) + J.right(kCfg.r));
                const BinaryInterval& I = e.intervals()[e.locate(mid)];
                CHECK(I.contains(J));
                const double a = J.left(kCfg.r);
                const double b = I.left(kCfg.r);
                worst = std::max(worst, std::sqrt(std::max(gram.difference_inner(a, b, a, b), 0.0)));
            }
            const SplitNormReport s = split_norm_bound(p, e, n, gram);
            CHECK(s.rank_count == p.size());
            CHECK(s.operator_norm == doctest::Approx(worst).epsilon(1e-9));
            CHECK(s.operator_norm <= s.bound);
            CHECK(s.bound == doctest::Approx(2.0 / std::sqrt(std::log(n) / 4.0)).epsilon(1e-14));
            CHECK(split_difference_norm(mu, p, e, gram) <= s.operator_norm * mu.total_variation() + 1e-8);
        }
    }
}

TEST_CASE("coefficient net") {
    const IntervalMeasure mu({{0.07, 1.0}});
    const DyadicPartition p = essential_partition(mu, 4, kCfg);
    const CoefficientNet net(auxiliary_partition(p, 4), 4, kCfg);
    CHECK(net.partition().size() == 2);
    CHECK(net.size() == 49.0);
    CHECK(net.error_bound() == doctest::Approx(std::sqrt(1.0 / std::log(10.0)) * 2.0 / 4.0).epsilon(1e-14));
    CHECK(net.nearest_profile(mu) == std::vector<int>{0, 3});

    KernelGram gram(kCfg, kQuad);
    const double d = net.approximation_distance(mu, gram);
    CHECK(d == doctest::Approx(0.25 * std::sqrt(kernel_norm_sq(0.05, kCfg))).epsilon(1e-10));
    CHECK(d <= net.error_bound());

    const DyadicPartition fine(0.1, {{2, 0}, {2, 1}, {2, 2}, {2, 3}});
    CHECK_THROWS_AS(CoefficientNet(fine, 2, kCfg), BudgetError);
}

TEST_CASE("partition and measure json") {
    CounterRng rng(89, 0);
    const IntervalMeasure mu = random_interval_measure(rng, kCfg.r, 9);
    const DyadicPartition p = essential_partition(mu, 8, kCfg);
    const nlohmann::json jp = p;
    CHECK(jp.get<DyadicPartition>() == p);
    const nlohmann::json jm = mu;
    CHECK(jm.get<IntervalMeasure>().atoms() == mu.atoms());
}
