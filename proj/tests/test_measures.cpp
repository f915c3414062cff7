#include "doctest.h"

#include "wqmc/digital_net.hpp"
#include "wqmc/errors.hpp"
#include "wqmc/measures.hpp"
#include "wqmc/poly_lattice.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace wqmc;

namespace {

std::vector<CoordinateMeasure> builtins() {
    return {CoordinateMeasure::uniform(0.0, 1.0), CoordinateMeasure::uniform(-2.0, 3.5), CoordinateMeasure::linear(),
            CoordinateMeasure::trunc_exp(1.0, 0.0, 1.0), CoordinateMeasure::trunc_exp(3.0, -1.0, 2.0),
            CoordinateMeasure::numeric(0.0, 2.0, [](double x) { return x * x * x / 8.0; }, "cubic"),
            CoordinateMeasure::table({0.0, 0.5, 1.0, 3.0}, {0.0, 0.1, 0.6, 1.0})};
}

DyadicPointSet one_dim(std::initializer_list<std::uint64_t> nums, int prec) {
    DyadicPointSet p(nums.size(), 1, prec);
    std::size_t n = 0;
    for (auto v : nums) p.num(n++, 0) = v;
    return p;
}

}  // namespace

TEST_CASE("builtin measure examples") {
    CHECK(CoordinateMeasure::uniform(2.0, 4.0).inv_cdf(0.5) == 3.0);
    CHECK(CoordinateMeasure::linear().inv_cdf(0.25) == 0.5);
    const double closed = -std::log(1.0 - 0.5 * (1.0 - std::exp(-1.0)));
    const CoordinateMeasure te = CoordinateMeasure::trunc_exp(1.0, 0.0, 1.0);
    CHECK(te.inv_cdf(0.5) == doctest::Approx(closed).epsilon(1e-14));
    CHECK(closed == doctest::Approx(0.379885).epsilon(1e-6));
    // Independent bisection on the closed-form CDF.
    const double bis = bisect_inverse([](double x) { return (1.0 - std::exp(-x)) / (1.0 - std::exp(-1.0)); }, 0.0,
                                      1.0, 0.5);
    CHECK(bis == doctest::Approx(closed).epsilon(1e-14));
}

TEST_CASE("measure construction errors") {
    CHECK_THROWS_AS(CoordinateMeasure::uniform(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CoordinateMeasure::uniform(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CoordinateMeasure::trunc_exp(0.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CoordinateMeasure::trunc_exp(-1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CoordinateMeasure::table({0.0, 1.0, 2.0}, {0.0, 0.5, 0.5}), NumericValidationError);
    CHECK_THROWS_AS(CoordinateMeasure::table({0.0, 1.0}, {0.0, 0.9}), NumericValidationError);
    CHECK_THROWS_AS(CoordinateMeasure::table({0.0, 0.0}, {0.0, 1.0}), std::invalid_argument);
    // Flat segment in a numeric CDF.
    CHECK_THROWS_AS(CoordinateMeasure::numeric(0.0, 2.0, [](double x) { return std::min(x, 1.0) * 0.5 + std::max(x - 1.5, 0.0); }),
                    NumericValidationError);
}

TEST_CASE("cdf and inv_cdf round trip on a grid") {
    for (const auto& mu : builtins()) {
        CAPTURE(mu.label());
        for (int k = 0; k <= 1000; ++k) {
            const double x = mu.a() + (mu.b() - mu.a()) * k / 1000.0;
            CHECK(std::fabs(mu.inv_cdf(mu.cdf(x)) - x) <= 1e-10);
        }
        CHECK(mu.inv_cdf(0.0) == mu.a());
        CHECK(mu.inv_cdf(1.0) == mu.b());
    }
}

TEST_CASE("table measures from files") {
    const auto dir = std::filesystem::temp_directory_path() / "wqmc_measure_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "ok.txt") << "# x cdf\n0 0\n\n0.5 0.25   # mid\n1 1\n";
        std::ofstream(dir / "bad.txt") << "0 0\n0.5\n1 1\n";
        std::ofstream(dir / "flat.txt") << "0 0\n0.5 0.5\n0.7 0.5\n1 1\n";
    }
    const auto mu = CoordinateMeasure::load_table(dir / "ok.txt");
    CHECK(mu.cdf(0.25) == doctest::Approx(0.125));
    CHECK(mu.inv_cdf(0.625) == doctest::Approx(0.75));
    try {
        CoordinateMeasure::load_table(dir / "bad.txt");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(CoordinateMeasure::load_table(dir / "flat.txt"), NumericValidationError);
    CHECK_THROWS_AS(CoordinateMeasure::load_table(dir / "missing.txt"), std::invalid_argument);
    std::filesystem::remove_all(dir);
}

TEST_CASE("map_points") {
    const PolyLatticeRule rule{Gf2Poly{0b111}, {Gf2Poly{1}, Gf2Poly{0b10}}};
    const DyadicPointSet pts = plps(rule);
    const Nodes same = map_points(pts, {CoordinateMeasure::uniform(0, 1), CoordinateMeasure::uniform(0, 1)});
    for (std::size_t n = 0; n < pts.size(); ++n) {
        for (std::size_t i = 0; i < 2; ++i) CHECK(same.data[n * 2 + i] == pts.value(n, i));
    }
    const Nodes lin = map_points(one_dim({1}, 2), {CoordinateMeasure::linear()});
    CHECK(lin.data[0] == 0.5);
    const Nodes zero = map_points(DyadicPointSet(1, 2, 4), {CoordinateMeasure::uniform(-1, 1), CoordinateMeasure::uniform(3, 4)});
    CHECK(zero.data == std::vector<double>{-1.0, 3.0});
    CHECK_THROWS_AS(map_points(pts, {CoordinateMeasure::linear()}), std::invalid_argument);
}

TEST_CASE("qmc_estimate examples") {
    const Cube unit = Cube::unit(1);
    const Integrand x = builtin_integrand("linear", unit);
    const Nodes nodes = map_points(one_dim({0, 1, 3, 2}, 2), {CoordinateMeasure::linear()});
    const double est = qmc_estimate(x, nodes);
    CHECK(est == doctest::Approx((0.0 + 0.5 + std::sqrt(0.75) + std::sqrt(0.5)) / 4).epsilon(1e-15));
    // The hand sum is 2.07313 / 4 = 0.518283; the error against 2/3 is -0.148384.
    CHECK(est == doctest::Approx(0.518283).epsilon(1e-6));
    CHECK(est - 2.0 / 3.0 == doctest::Approx(-0.148384).epsilon(1e-5));
    CHECK(x.reference({CoordinateMeasure::linear()}) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    const Integrand c = builtin_integrand("constant", Cube::unit(3), 0.3);
    const Nodes many = map_points(plps(PolyLatticeRule{Gf2Poly{0b1011}, {Gf2Poly{1}, Gf2Poly{3}, Gf2Poly{5}}}),
                                  std::vector<CoordinateMeasure>(3, CoordinateMeasure::linear()));
    CHECK(qmc_estimate(c, many) == 0.3);
    CHECK(qmc_estimate(builtin_integrand("constant", Cube::unit(3)), many) == 1.0);
}

TEST_CASE("integration_error examples") {
    for (int m = 1; m <= 12; ++m) {
        DyadicPointSet grid(std::size_t{1} << m, 1, m);
        for (std::size_t n = 0; n < grid.size(); ++n) grid.num(n, 0) = n;
        const auto x = builtin_integrand("linear", Cube::unit(1));
        CHECK(integration_error(x, {CoordinateMeasure::uniform(0, 1)}, grid, 0.5) == -std::ldexp(1.0, -m - 1));
        CHECK(integration_error(builtin_integrand("constant", Cube::unit(1)), {CoordinateMeasure::trunc_exp(2, 0, 1)},
                                grid, 1.0) == 0.0);
    }
}

TEST_CASE("builtin integrands") {
    CHECK_THROWS_AS(builtin_integrand("cosine", Cube::unit(1)), std::invalid_argument);
    const Cube cube{{-1.0, 0.0}, {2.0, 3.0}};
    const auto prod = builtin_integrand("product", cube);
    CHECK(prod.derivative_sup(0) == 6.0);
    CHECK(prod.derivative_sup(0b01) == 3.0);
    CHECK(prod.derivative_sup(0b11) == 1.0);
    const auto ex = builtin_integrand("smooth-exp", cube);
    const std::vector<CoordinateMeasure> ms{CoordinateMeasure::uniform(-1, 2), CoordinateMeasure::uniform(0, 3)};
    const double expect = (std::exp(2.0) - std::exp(-1.0)) / 3.0 * (std::exp(3.0) - 1.0) / 3.0;
    CHECK(ex.reference(ms) == doctest::Approx(expect).epsilon(1e-12));
    const auto lin = builtin_integrand("linear", cube);
    CHECK(lin.reference(ms) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("weighted_norm") {
    const auto prod = builtin_integrand("product", Cube::unit(2));
    const WeightScheme w = WeightScheme::product({0.5, 0.25});
    // sups are all 1; terms 1, 2, 4, 8.
    CHECK(weighted_norm(prod, w, INFINITY) == 8.0);
    CHECK(weighted_norm(prod, w, 1.0) == 15.0);
    CHECK(weighted_norm(prod, w, 2.0) == doctest::Approx(std::sqrt(85.0)));
    Integrand bare;
    bare.dim = 1;
    CHECK_THROWS_AS(weighted_norm(bare, w, 1.0), std::invalid_argument);
}

TEST_CASE("lambda_jm") {
    const auto uni = CoordinateMeasure::uniform(0, 1);
    for (int j = 0; j <= 10; ++j) {
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << j); ++m) CHECK(lambda_jm(uni, j, m) == std::ldexp(1.0, -j - 1));
    }
    CHECK(lambda_jm(CoordinateMeasure::linear(), 1, 0) == doctest::Approx(0.5 * std::sqrt(0.5)).epsilon(1e-15));
    CHECK(lambda_jm(CoordinateMeasure::linear(), 1, 0) == doctest::Approx(0.3535534).epsilon(1e-7));
    CHECK_THROWS_AS(lambda_jm(uni, 2, 4), std::invalid_argument);

    for (const auto& mu : builtins()) {
        CAPTURE(mu.label());
        for (int j = 0; j <= 10; ++j) {
            double total = 0.0;
            for (std::uint64_t m = 0; m < (std::uint64_t{1} << j); ++m) {
                const double l = lambda_jm(mu, j, m);
                CHECK(l >= 0.0);
                total += l;
            }
            CHECK(std::fabs(total - (mu.b() - mu.a()) / 2) <= 1e-10);
        }
    }
}

TEST_CASE("haar_phi composed with inv_cdf equals haar on dyadic inputs") {
    for (const auto& mu : builtins()) {
        CAPTURE(mu.label());
        for (int j = -1; j <= 5; ++j) {
            const std::uint64_t shifts = j < 0 ? 1 : std::uint64_t{1} << j;
            for (std::uint64_t m = 0; m < shifts; ++m) {
                const HaarIndex idx{j, m};
                for (std::uint64_t k = 0; k < 256; ++k) {
                    const DyadicPoint y{k, 8};
                    CHECK(haar_phi(mu, idx, mu.inv_cdf(y.value())) == haar(idx, y));
                }
            }
        }
    }
}

TEST_CASE("haar_coeff examples") {
    const Cube unit = Cube::unit(1);
    const std::vector<CoordinateMeasure> uni{CoordinateMeasure::uniform(0, 1)};
    const auto x = builtin_integrand("linear", unit);
    const int j0[] = {0};
    const std::uint64_t m0[] = {0};
    CHECK(haar_coeff(x, uni, j0, m0, 0b1, 12) == doctest::Approx(-0.25).epsilon(1e-12));
    const auto one = builtin_integrand("constant", unit);
    for (int j = 0; j <= 3; ++j) {
        const int jj[] = {j};
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << j); ++m) {
            const std::uint64_t mm[] = {m};
            CHECK(std::fabs(haar_coeff(one, uni, jj, mm, 0b1, 10)) < 1e-12);
        }
    }
    CHECK(haar_coeff(one, uni, {}, {}, 0, 4) == doctest::Approx(1.0));
    CHECK_THROWS_AS(haar_coeff(x, uni, j0, m0, 0b1, 3), std::invalid_argument);
}

TEST_CASE("lemma1_bound") {
    const std::vector<CoordinateMeasure> uni{CoordinateMeasure::uniform(0, 1)};
    const auto x = builtin_integrand("linear", Cube::unit(1));
    const int j0[] = {0};
    const std::uint64_t m0[] = {0};
    CHECK(lemma1_bound(x, uni, j0, m0, 0b1) == 0.5);
    Integrand twice = x;
    twice.derivative_sup = [](Subset u) { return u == 0 ? 2.0 : 2.0; };
    CHECK(lemma1_bound(twice, uni, j0, m0, 0b1) == 1.0);
    // Uniform measure: 2^{-j/2} 2^{-j-1}, ratio 2^{-3/2} per level.
    for (int j = 0; j < 20; ++j) {
        const int a[] = {j};
        const int b[] = {j + 1};
        const std::uint64_t m[] = {0};
        CHECK(lemma1_bound(x, uni, b, m, 0b1) / lemma1_bound(x, uni, a, m, 0b1) ==
              doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-14));
    }
    Integrand bare;
    bare.dim = 1;
    CHECK_THROWS_AS(lemma1_bound(bare, uni, j0, m0, 0b1), std::invalid_argument);
}

TEST_CASE("Haar coefficients respect the decay bound") {
    for (const auto& mu : {CoordinateMeasure::uniform(0, 1), CoordinateMeasure::linear()}) {
        for (std::size_t s = 1; s <= 2; ++s) {
            const auto f = builtin_integrand("product", Cube::unit(s));
            const std::vector<CoordinateMeasure> ms(s, mu);
            for (Subset u = 1; u <= full_subset(s); ++u) {
                const std::size_t r = subset_size(u);
                std::vector<int> j(r, 0);
                std::vector<std::uint64_t> m(r, 0);
                // All (j, m) with j <= 4 on each active coordinate.
                while (true) {
                    const double c = haar_coeff(f, ms, j, m, u, 8);
                    const double bound = lemma1_bound(f, ms, j, m, u);
                    CHECK(std::fabs(c) <= bound + 1e-3);
                    std::size_t k = 0;
                    for (; k < r; ++k) {
                        if (++m[k] < (std::uint64_t{1} << j[k])) break;
                        m[k] = 0;
                        if (++j[k] <= 4) break;
                        j[k] = 0;
                    }
                    if (k == r) break;
                }
            }
        }
    }
}
