#include "doctest.h"
#include "oracles.hpp"

#include "wqmc/cbc.hpp"
#include "wqmc/digital_net.hpp"
#include "wqmc/errors.hpp"
#include "wqmc/parallel.hpp"

#include <cmath>
#include <random>

using namespace wqmc;

namespace {

const Gf2Poly kF2{0b111};

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1.0}); }

/// B from the E definition, with exact E values.
double oracle_B(const PolyLatticeRule& rule, const WeightScheme& w, const Cube& cube) {
    const int m = rule.m();
    oracle::Points p;
    p.prec = m;
    for (std::uint64_t h = 0; h < (std::uint64_t{1} << m); ++h) {
        std::vector<std::uint64_t> row;
        for (auto g : rule.g) {
            row.push_back(oracle::digits_to_num(
                oracle::laurent_digits(oracle::mulmod(h, g.bits(), rule.f.bits()), rule.f.bits(), m)));
        }
        p.rows.push_back(row);
    }
    double total = 0.0;
    for (Subset u = 1; u <= full_subset(rule.dim()); ++u) {
        total += w.gamma(u) * cube.side_product(u) * oracle::E(p, m, subset_members(u)).value();
    }
    return total;
}

/// Random dyadic value k / 2^bits in (0, max].
double dyadic_in(std::mt19937_64& rng, double max, int bits) {
    const std::uint64_t steps = static_cast<std::uint64_t>(std::ldexp(max, bits));
    return std::ldexp(static_cast<double>(1 + rng() % steps), -bits);
}

WeightScheme general_from(const WeightScheme& w, std::size_t s) {
    std::vector<double> by_mask(std::size_t{1} << s, 0.0);
    for (Subset u = 1; u < by_mask.size(); ++u) by_mask[u] = w.gamma(u);
    return WeightScheme::general(s, by_mask);
}

DyadicPointSet random_points(std::mt19937_64& rng, int m, std::size_t s, int prec) {
    DyadicPointSet p(std::size_t{1} << m, s, prec);
    for (std::size_t n = 0; n < p.size(); ++n) {
        for (std::size_t i = 0; i < s; ++i) p.num(n, i) = rng() & ((std::uint64_t{1} << prec) - 1);
    }
    return p;
}

std::vector<Gf2Poly> decode(std::uint64_t code, int m, std::size_t s) {
    std::vector<Gf2Poly> g;
    for (std::size_t i = 0; i < s; ++i) g.emplace_back((code >> (m * i)) & ((std::uint64_t{1} << m) - 1));
    return g;
}

}  // namespace

TEST_CASE("weights") {
    const WeightScheme p = WeightScheme::product({0.5, 0.25, 2.0});
    CHECK(p.gamma(0) == 1.0);
    CHECK(p.gamma(0b101) == 1.0);
    CHECK(p.gamma(0b011) == 0.125);
    const WeightScheme pod = WeightScheme::pod({1.0, 2.0, 3.0, 4.0}, {0.5, 0.25, 2.0});
    CHECK(pod.gamma(0b011) == 3.0 * 0.125);
    CHECK(pod.gamma(0b111) == 4.0 * 0.25);
    const WeightScheme fact = WeightScheme::pod_factorial(1.0, {1.0, 1.0, 1.0, 1.0});
    CHECK(fact.gamma(0b1111) == 24.0);
    CHECK(fact.log_order(3) == doctest::Approx(std::log(6.0)));
    const WeightScheme gen = WeightScheme::general(2, {0.0, 0.5, 0.25, 0.75});
    CHECK(gen.gamma(0b11) == 0.75);
    CHECK(gen.gamma_exact(0b10) == Dyadic(1, 2));
    CHECK(gen.scaled(2.0).gamma(0b11) == 1.5);
    CHECK_THROWS_AS(p.scaled(2.0), std::invalid_argument);
    CHECK_THROWS_AS(WeightScheme::product({1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(WeightScheme::pod({2.0, 1.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(WeightScheme::general(2, {0.0, 1.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS((Cube{{0.0}, {0.0}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((Cube{{0.0}, {INFINITY}}).validate(), std::invalid_argument);
}

TEST_CASE("weighted_subset_sum agrees with the subset loop") {
    std::mt19937_64 rng(41);
    for (int it = 0; it < 50; ++it) {
        const std::size_t s = 1 + rng() % 8;
        std::vector<double> g(s), G(s + 1, 1.0);
        Cube cube{std::vector<double>(s, 0.0), std::vector<double>(s)};
        for (std::size_t i = 0; i < s; ++i) {
            g[i] = dyadic_in(rng, 1.0, 6);
            cube.b[i] = dyadic_in(rng, 4.0, 4);
            G[i + 1] = dyadic_in(rng, 3.0, 4);
        }
        auto factor = [](int k) { return std::pow(1.5, k); };
        for (const WeightScheme& w : {WeightScheme::product(g), WeightScheme::pod(G, g)}) {
            double loop = 0.0;
            for (Subset u = 1; u <= full_subset(s); ++u) loop += w.gamma(u) * cube.side_product(u) * factor(subset_size(u));
            CHECK(rel_diff(weighted_subset_sum(w, cube, s, factor), loop) < 1e-13);
            CHECK(rel_diff(weighted_subset_sum(general_from(w, s), cube, s, factor), loop) < 1e-13);
        }
    }
}

TEST_CASE("B_fast examples") {
    const PolyLatticeRule rule{kF2, {Gf2Poly{1}, Gf2Poly{0b10}}};
    const WeightScheme ones = WeightScheme::product({1.0, 1.0});
    CHECK(B_fast(plps(rule), 2, ones, Cube::unit(2)) == 0.3125);
    for (int m = 1; m <= 10; ++m) {
        // 2^m copies of the origin: every term is (1/2) phi(0) = m/2.
        DyadicPointSet zeros(std::size_t{1} << m, 1, m);
        CHECK(B_fast(zeros, m, WeightScheme::product({1.0}), Cube::unit(1)) == m / 2.0);
    }
}

TEST_CASE("B_dual examples") {
    const WeightScheme ones = WeightScheme::product({1.0, 1.0});
    CHECK(B_dual(PolyLatticeRule{kF2, {Gf2Poly{1}, Gf2Poly{0b10}}}, ones, Cube::unit(2)) == 0.3125);
    CHECK(B_dual(PolyLatticeRule{kF2, {Gf2Poly{1}, Gf2Poly{0b11}}}, ones, Cube::unit(2)) == 0.3125);
    CHECK(B_dual(PolyLatticeRule{kF2, {Gf2Poly{1}, Gf2Poly{1}}}, ones, Cube::unit(2)) == 0.375);
}

TEST_CASE("B_fast equals B_dual and the definition, exhaustively over g") {
    std::mt19937_64 rng(42);
    for (std::uint64_t f : {0b111ULL, 0b1011ULL, 0b10011ULL}) {
        const int m = Gf2Poly{f}.degree();
        for (std::size_t s = 1; s <= 3; ++s) {
            std::vector<double> g(s);
            for (auto& x : g) x = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
            Cube cube{std::vector<double>(s, -1.0), std::vector<double>(s)};
            for (auto& b : cube.b) b = -1.0 + std::uniform_real_distribution<double>(0.1, 4.0)(rng);
            const WeightScheme w = WeightScheme::product(g);
            for (std::uint64_t code = 0; code < (std::uint64_t{1} << (m * s)); ++code) {
                const PolyLatticeRule rule{Gf2Poly{f}, decode(code, m, s)};
                const double fast = B_fast(plps(rule), m, w, cube);
                CHECK(rel_diff(fast, B_dual(rule, w, cube)) < 1e-12);
                if (m <= 3) CHECK(rel_diff(fast, oracle_B(rule, w, cube)) < 1e-12);
            }
        }
    }
}

TEST_CASE("Product, POD and General formulas agree") {
    std::mt19937_64 rng(43);
    for (int it = 0; it < 100; ++it) {
        const int m = 1 + static_cast<int>(rng() % 6);
        const std::size_t s = 1 + rng() % 6;
        const DyadicPointSet pts = random_points(rng, m, s, m + static_cast<int>(rng() % 3));
        std::vector<double> g(s), G(s + 1, 1.0);
        for (auto& x : g) x = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
        for (std::size_t l = 1; l <= s; ++l) G[l] = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
        Cube cube{std::vector<double>(s, 0.0), std::vector<double>(s)};
        for (auto& b : cube.b) b = std::uniform_real_distribution<double>(0.1, 4.0)(rng);

        const WeightScheme prod = WeightScheme::product(g);
        const WeightScheme pod1 = WeightScheme::pod(std::vector<double>(s + 1, 1.0), g);
        const WeightScheme pod = WeightScheme::pod(G, g);
        const double bp = B_fast(pts, m, prod, cube);
        CHECK(rel_diff(bp, B_fast(pts, m, pod1, cube)) < 1e-12);
        CHECK(rel_diff(bp, B_fast(pts, m, general_from(prod, s), cube)) < 1e-12);
        CHECK(rel_diff(bp, B_fast_general(pts, m, prod, cube)) < 1e-12);
        CHECK(rel_diff(B_fast(pts, m, pod, cube), B_fast(pts, m, general_from(pod, s), cube)) < 1e-12);
    }
}

TEST_CASE("B_fast rejects large general weight sets") {
    CHECK_THROWS_WITH_AS(require_enumerable(21, "B with general weights"), doctest::Contains("product or POD"),
                         std::invalid_argument);
}

TEST_CASE("cbc_construct examples") {
    const WeightScheme ones = WeightScheme::product({1.0, 1.0});
    const CbcResult r = cbc_construct(kF2, 2, ones, Cube::unit(2));
    CHECK(r.g == std::vector<Gf2Poly>{Gf2Poly{1}, Gf2Poly{0b10}});
    CHECK(r.B == 0.3125);
    CHECK(r.B <= average_formula(2, 2, ones, Cube::unit(2)));
    CHECK(average_formula(2, 2, ones, Cube::unit(2)) == 0.75);

    const CbcResult one = cbc_construct(Gf2Poly{0b1011}, 1, WeightScheme::product({0.7}), Cube::unit(1));
    CHECK(one.g == std::vector<Gf2Poly>{Gf2Poly{1}});
    CHECK(one.B == 0.0);
    CHECK_THROWS_WITH_AS(cbc_construct(Gf2Poly{0b101}, 2, ones, Cube::unit(2)),
                         "CBC guarantee requires irreducible modulus", std::invalid_argument);
}

TEST_CASE("cbc_construct matches a greedy exhaustive search") {
    std::mt19937_64 rng(44);
    for (int it = 0; it < 20; ++it) {
        const std::uint64_t f = std::vector<std::uint64_t>{0b111, 0b1011, 0b10011, 0b100101}[rng() % 4];
        const int m = Gf2Poly{f}.degree();
        const std::size_t s = 2 + rng() % 3;
        std::vector<double> g(s);
        for (auto& x : g) x = dyadic_in(rng, 1.0, 5);
        Cube cube{std::vector<double>(s, 0.0), std::vector<double>(s)};
        for (auto& b : cube.b) b = dyadic_in(rng, 4.0, 3);
        const WeightScheme w = WeightScheme::product(g);
        const CbcResult r = cbc_construct(Gf2Poly{f}, s, w, cube);

        // Dyadic weights and sides keep every B_dual exact, so ties compare exactly.
        std::vector<Gf2Poly> prefix{Gf2Poly{1}};
        for (std::size_t d = 2; d <= s; ++d) {
            double best = INFINITY;
            std::uint64_t arg = 0;
            for (std::uint64_t c = 0; c < (std::uint64_t{1} << m); ++c) {
                auto trial = prefix;
                trial.emplace_back(c);
                const double b = B_dual(PolyLatticeRule{Gf2Poly{f}, trial}, w, cube);
                if (b < best) {
                    best = b;
                    arg = c;
                }
            }
            CHECK(r.g[d - 1] == Gf2Poly{arg});
            CHECK(rel_diff(r.stage_B[d - 1], best) < 1e-12);
            prefix.emplace_back(arg);
        }
    }
}

TEST_CASE("CBC guarantee on random instances") {
    std::mt19937_64 rng(45);
    for (int it = 0; it < 50; ++it) {
        const int m = 1 + static_cast<int>(rng() % 8);
        const std::size_t s = 1 + rng() % 6;
        std::vector<double> g(s);
        for (auto& x : g) x = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        Cube cube{std::vector<double>(s), std::vector<double>(s)};
        for (std::size_t i = 0; i < s; ++i) {
            cube.a[i] = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
            cube.b[i] = cube.a[i] + 4.0 - std::uniform_real_distribution<double>(0.0, 4.0)(rng);
        }
        const WeightScheme w = WeightScheme::product(g);
        const Gf2Poly f = first_irreducible(m);
        const CbcResult r = cbc_construct(f, s, w, cube);
        CHECK(r.B <= average_formula(m, s, w, cube));
        for (std::size_t d = 1; d <= s; ++d) CHECK(r.stage_B[d - 1] <= r.stage_bound[d - 1]);
    }
}

TEST_CASE("cbc_construct does not depend on the thread count") {
    const WeightScheme w = WeightScheme::pod_factorial(1.0, {0.9, 0.5, 0.3, 0.2, 0.1});
    const Gf2Poly f = first_irreducible(10);
    set_thread_count(1);
    const CbcResult a = cbc_construct(f, 5, w, Cube::unit(5));
    set_thread_count(8);
    const CbcResult b = cbc_construct(f, 5, w, Cube::unit(5));
    set_thread_count(1);
    CHECK(a.g == b.g);
    CHECK(a.B == b.B);
    CHECK(a.stage_B == b.stage_B);
}

TEST_CASE("average_B examples and exactness") {
    const WeightScheme ones2 = WeightScheme::product({1.0, 1.0});
    const AverageResult a = average_B(kF2, 2, ones2, Cube::unit(2));
    CHECK(a.value == 0.75);
    REQUIRE(a.exact);
    CHECK(*a.exact == Dyadic(3, 2));

    for (int m = 1; m <= 4; ++m) {
        const Gf2Poly f = first_irreducible(m);
        for (std::size_t s = 1; s <= 3; ++s) {
            const WeightScheme w = WeightScheme::product(std::vector<double>(s, 1.0));
            const AverageResult r = average_B(f, s, w, Cube::unit(s));
            REQUIRE(r.exact);
            CHECK(*r.exact == average_formula_exact(m, s, w, Cube::unit(s)));
        }
    }
    // s = 1 closed form with a scaled interval.
    const AverageResult one = average_B(Gf2Poly{0b1011}, 1, WeightScheme::product({0.5}), Cube{{0.0}, {3.0}});
    CHECK(one.value == doctest::Approx(0.5 * 1.5 * 3.0 / 8.0));
}

TEST_CASE("average_B equals the mean of B_dual over G_m^s") {
    const Gf2Poly f{0b1011};
    const WeightScheme w = WeightScheme::product({0.75, 0.375});
    const Cube cube{{0.0, 1.0}, {2.0, 1.5}};
    const int m = 3;
    double total = 0.0;
    for (std::uint64_t code = 0; code < 64; ++code) total += oracle_B(PolyLatticeRule{f, decode(code, m, 2)}, w, cube);
    CHECK(average_B(f, 2, w, cube).value == doctest::Approx(total / 64).epsilon(1e-13));
}

TEST_CASE("average_B homogeneity in the cube sides") {
    const Gf2Poly f{0b1011};
    const WeightScheme w = WeightScheme::general(2, {0.0, 0.5, 0.25, 0.125});
    const AverageResult unit = average_B(f, 2, w, Cube::unit(2));
    const AverageResult wide = average_B(f, 2, w, Cube{{0.0, 0.0}, {2.0, 2.0}});
    // Each u-term scales by 2^{|u|}.
    double expect = 0.0;
    for (Subset u = 1; u <= 3; ++u) expect += w.gamma(u) * std::ldexp(unit.mean_E[u].to_double(), subset_size(u));
    CHECK(wide.value == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("average_B work guard") {
    CHECK_THROWS_AS(average_B(first_irreducible(9), 3, WeightScheme::product({1, 1, 1}), Cube::unit(3)), WorkGuardError);
}

TEST_CASE("markov_fraction") {
    const WeightScheme ones = WeightScheme::product({1.0, 1.0});
    const MarkovResult two = markov_fraction(kF2, 2, ones, Cube::unit(2), 2.0);
    CHECK(two.threshold == 8);
    CHECK(two.count > 8);
    CHECK(two.total == 16);
    const MarkovResult one = markov_fraction(kF2, 2, ones, Cube::unit(2), 1.0);
    CHECK(one.count >= 1);
    const MarkovResult inf = markov_fraction(kF2, 2, ones, Cube::unit(2), INFINITY);
    CHECK(inf.count == 16);
    CHECK_THROWS_AS(markov_fraction(kF2, 2, ones, Cube::unit(2), 0.5), std::invalid_argument);

    // Count against direct enumeration.
    std::uint64_t count = 0;
    for (std::uint64_t code = 0; code < 16; ++code) {
        count += oracle_B(PolyLatticeRule{kF2, decode(code, 2, 2)}, ones, Cube::unit(2)) <= 1.5;
    }
    CHECK(count == two.count);
}
