#include "doctest.h"
#include "oracles.hpp"

#include "wqmc/digital_net.hpp"
#include "wqmc/errors.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace wqmc;

namespace {

BitMatrix anti_identity(int m) {
    BitMatrix a(m, m);
    for (int r = 0; r < m; ++r) a.set(r, m - 1 - r, true);
    return a;
}

oracle::Matrix to_oracle(const BitMatrix& c) {
    oracle::Matrix out(c.rows(), std::vector<int>(c.cols()));
    for (int r = 0; r < c.rows(); ++r) {
        for (int k = 0; k < c.cols(); ++k) out[r][k] = c.get(r, k);
    }
    return out;
}

NetDefinition random_net(std::mt19937_64& rng, int m, std::size_t s) {
    NetDefinition def;
    def.m = m;
    for (std::size_t i = 0; i < s; ++i) {
        BitMatrix c(m, m);
        for (int r = 0; r < m; ++r) c.set_row(r, rng() & ((std::uint64_t{1} << m) - 1));
        def.matrices.push_back(c);
    }
    return def;
}

/// Sobol' direction integers m_k from the raw table row, by the textbook recurrence
/// m_k = 2 a_1 m_{k-1} ^ 4 a_2 m_{k-2} ^ ... ^ 2^d m_{k-d} ^ m_{k-d}.
std::vector<std::uint64_t> sobol_m(int degree, std::uint64_t a, std::vector<std::uint64_t> m_init, int count) {
    std::vector<std::uint64_t> mk = std::move(m_init);
    while (static_cast<int>(mk.size()) < count) {
        const std::size_t k = mk.size();
        std::uint64_t x = mk[k - degree] ^ (mk[k - degree] << degree);
        for (int i = 1; i < degree; ++i) {
            const int ai = static_cast<int>((a >> (degree - 1 - i)) & 1U);
            if (ai) x ^= mk[k - i] << i;
        }
        mk.push_back(x);
    }
    mk.resize(count);
    return mk;
}

}  // namespace

TEST_CASE("generate_net examples") {
    NetDefinition def{2, {BitMatrix::identity(2)}, std::nullopt, 0};
    const DyadicPointSet pts = generate_net(def);
    REQUIRE(pts.size() == 4);
    CHECK(pts.value(0, 0) == 0.0);
    CHECK(pts.value(1, 0) == 0.5);
    CHECK(pts.value(2, 0) == 0.25);
    CHECK(pts.value(3, 0) == 0.75);

    NetDefinition shifted = def;
    shifted.shift = std::vector<std::uint64_t>{0};
    CHECK(generate_net(shifted) == pts);

    NetDefinition two{2, {BitMatrix::identity(2), anti_identity(2)}, std::nullopt, 0};
    const DyadicPointSet p2 = generate_net(two);
    CHECK(is_projection_regular(p2, 2));
    std::set<std::uint64_t> second;
    for (std::size_t n = 0; n < 4; ++n) second.insert(p2.num(n, 1));
    CHECK(second.size() == 4);
}

TEST_CASE("generate_net matches a direct matrix-vector product") {
    std::mt19937_64 rng(21);
    for (int it = 0; it < 50; ++it) {
        const int m = 1 + static_cast<int>(rng() % 8);
        const std::size_t s = 1 + rng() % 4;
        NetDefinition def = random_net(rng, m, s);
        const DyadicPointSet pts = generate_net(def);
        for (std::size_t n = 0; n < pts.size(); ++n) {
            for (std::size_t i = 0; i < s; ++i) {
                std::vector<int> y(m, 0);
                for (int r = 0; r < m; ++r) {
                    for (int k = 0; k < m; ++k) y[r] ^= def.matrices[i].get(r, k) & static_cast<int>((n >> k) & 1U);
                }
                CHECK(pts.num(n, i) == oracle::digits_to_num(y));
            }
        }
    }
}

TEST_CASE("digital shift with tail digits") {
    NetDefinition def{2, {BitMatrix::identity(2)}, std::vector<std::uint64_t>{0b0011}, 4};
    const DyadicPointSet pts = generate_net(def);
    CHECK(pts.precision() == 4);
    CHECK(pts.num(1, 0) == (0b1000 ^ 0b0011));
}

TEST_CASE("sobol_matrices") {
    for (int m = 1; m <= 16; ++m) {
        const auto cs = sobol_matrices(1, m);
        CHECK(cs[0] == BitMatrix::identity(m));
    }
    for (int m = 1; m <= 16; ++m) {
        for (const auto& c : sobol_matrices(16, m)) {
            CHECK(c.is_upper_triangular());
            CHECK(c.is_nonsingular());
        }
    }
    NetDefinition def{2, sobol_matrices(2, 2), std::nullopt, 0};
    CHECK(exact_t(def, 0b11) == 0);
    CHECK_THROWS_WITH_AS(sobol_matrices(100000, 4), doctest::Contains("limit 1024"), std::invalid_argument);
}

TEST_CASE("sobol_matrices follow the direction-number recurrence") {
    std::ifstream in(WQMC_DATA_DIR "/sobol_directions.txt");
    REQUIRE(in);
    std::string header;
    std::getline(in, header);
    const int m = 24;
    const auto cs = sobol_matrices(40, m);
    for (std::size_t dim = 2; dim <= 40; ++dim) {
        int d = 0, deg = 0;
        std::uint64_t a = 0;
        in >> d >> deg >> a;
        CHECK(d == static_cast<int>(dim));
        std::vector<std::uint64_t> init(deg);
        for (auto& x : init) in >> x;
        const auto mk = sobol_m(deg, a, init, m);
        for (int k = 1; k <= m; ++k) {
            CHECK(cs[dim - 1].column_numerator(k - 1, k) == mk[k - 1]);
        }
    }
}

TEST_CASE("first Sobol' points") {
    const DyadicPointSet pts = generate_net(NetDefinition{3, sobol_matrices(2, 3), std::nullopt, 0});
    const double expect[8] = {0, 0.5, 0.75, 0.25, 0.625, 0.125, 0.375, 0.875};
    for (std::size_t n = 0; n < 8; ++n) CHECK(pts.value(n, 1) == expect[n]);
}

TEST_CASE("matrix files") {
    NetDefinition def{2, {BitMatrix::identity(2), anti_identity(2)}, std::nullopt, 0};
    std::stringstream buf;
    write_matrices(buf, def);
    const NetDefinition back = parse_matrices(buf);
    CHECK(back.m == 2);
    CHECK(back.matrices == def.matrices);

    std::istringstream tolerant("# identity\n2 1\n1 0\n  0   1  # second row\n");
    CHECK(parse_matrices(tolerant).matrices[0] == BitMatrix::identity(2));

    std::istringstream extra("2 1\n1 0\n0 1\n1 1\n");
    try {
        parse_matrices(extra);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
    std::istringstream bad_digit("2 1\n1 2\n0 1\n");
    CHECK_THROWS_AS(parse_matrices(bad_digit), ParseError);
    std::istringstream short_row("2 1\n1\n0 1\n");
    CHECK_THROWS_AS(parse_matrices(short_row), ParseError);
    std::istringstream bad_header("2\n1 0\n");
    CHECK_THROWS_AS(parse_matrices(bad_header), ParseError);
    std::istringstream missing("2 2\n1 0\n0 1\n");
    CHECK_THROWS_AS(parse_matrices(missing), ParseError);
}

TEST_CASE("exact_t examples") {
    NetDefinition anti{2, {BitMatrix::identity(2), anti_identity(2)}, std::nullopt, 0};
    CHECK(exact_t(anti, 0b11) == 0);
    NetDefinition same{2, {BitMatrix::identity(2), BitMatrix::identity(2)}, std::nullopt, 0};
    CHECK(exact_t(same, 0b11) == 1);
    CHECK(exact_t(same, 0b01) == 0);
    CHECK_THROWS_WITH_AS(exact_t(NetDefinition{20, sobol_matrices(12, 20), std::nullopt, 0}, full_subset(12), 1000),
                         "t-computation too large", WorkGuardError);
}

TEST_CASE("exact_t matches the ascending-search oracle") {
    std::mt19937_64 rng(22);
    for (int it = 0; it < 200; ++it) {
        const int m = 1 + static_cast<int>(rng() % 6);
        const std::size_t s = 1 + rng() % 3;
        NetDefinition def = random_net(rng, m, s);
        std::vector<oracle::Matrix> om;
        for (const auto& c : def.matrices) om.push_back(to_oracle(c));
        for (Subset u = 1; u <= full_subset(s); ++u) {
            std::vector<std::size_t> coords = subset_members(u);
            CHECK(exact_t(def, u) == oracle::t_value(om, coords, m));
        }
    }
}

TEST_CASE("t is monotone under projection and ignores shifts") {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 50; ++it) {
        const int m = 2 + static_cast<int>(rng() % 5);
        NetDefinition def{m, sobol_matrices(4, m), std::nullopt, 0};
        NetDefinition rnd = random_net(rng, m, 4);
        for (const NetDefinition* d : {&def, &rnd}) {
            for (Subset v = 1; v <= full_subset(4); ++v) {
                const int tv = exact_t(*d, v);
                for (Subset u = v; u; u = (u - 1) & v) CHECK(exact_t(*d, u) <= tv);
                NetDefinition shifted = *d;
                shifted.shift = std::vector<std::uint64_t>(4, rng() & ((std::uint64_t{1} << m) - 1));
                CHECK(exact_t(shifted, v) == tv);
            }
        }
    }
}

TEST_CASE("projection regularity") {
    for (int m = 1; m <= 8; ++m) {
        for (std::size_t s = 1; s <= 4; ++s) {
            CHECK(is_projection_regular(generate_net(NetDefinition{m, sobol_matrices(s, m), std::nullopt, 0}), m));
        }
    }
    DyadicPointSet rep(4, 1, 2);
    rep.num(0, 0) = 0;
    rep.num(1, 0) = 0;
    rep.num(2, 0) = 1;
    rep.num(3, 0) = 2;
    CHECK_FALSE(is_projection_regular(rep, 2));
    CHECK_THROWS_AS(is_projection_regular(DyadicPointSet(3, 1, 2), 2), std::invalid_argument);
}

TEST_CASE("sequence_prefix examples") {
    NetDefinition seq{53, sobol_matrices(1, 53), std::nullopt, 0};
    const SequencePrefix five = sequence_prefix(seq, 5);
    const double expect[5] = {0, 0.5, 0.25, 0.75, 0.125};
    for (std::size_t n = 0; n < 5; ++n) CHECK(five.points.value(n, 0) == expect[n]);

    const SequencePrefix three = sequence_prefix(seq, 3);
    REQUIRE(three.decomposition.blocks.size() == 2);
    CHECK(three.decomposition.blocks[0].m == 0);
    CHECK(three.decomposition.blocks[1].m == 1);

    NetDefinition seq8{8, sobol_matrices(3, 8), std::nullopt, 0};
    const SequencePrefix full = sequence_prefix(seq8, 16);
    REQUIRE(full.decomposition.blocks.size() == 1);
    for (auto sigma : full.decomposition.blocks[0].shift) CHECK(sigma == 0);
    NetDefinition net4{4, sobol_matrices(3, 4), std::nullopt, 8};
    CHECK(full.points == generate_net(net4));

    NetDefinition lower{2, {BitMatrix::identity(2)}, std::nullopt, 0};
    lower.matrices[0].set(1, 0, true);
    CHECK_THROWS_WITH_AS(sequence_prefix(lower, 2), "sequence mode requires upper triangular", std::invalid_argument);
}

TEST_CASE("sequence prefix blocks regenerate as shifted nets") {
    for (std::size_t s = 1; s <= 4; ++s) {
        NetDefinition seq{53, sobol_matrices(s, 53), std::nullopt, 0};
        for (std::uint64_t n = 1; n <= 1024; ++n) {
            const SequencePrefix pre = sequence_prefix(seq, n);
            std::uint64_t total = 0;
            for (const auto& b : pre.decomposition.blocks) {
                const DyadicPointSet net = generate_net(block_net(b, 53));
                CHECK(net == pre.points.slice(b.offset, net.size()));
                total += net.size();
            }
            CHECK(total == n);
            for (std::size_t k = 1; k < pre.decomposition.blocks.size(); ++k) {
                CHECK(pre.decomposition.blocks[k - 1].m < pre.decomposition.blocks[k].m);
            }
        }
    }
}

TEST_CASE("sequence_t_profile") {
    NetDefinition seq{8, sobol_matrices(3, 8), std::nullopt, 0};
    const auto profile = sequence_t_profile(seq, 6);
    REQUIRE(profile.size() == 6);
    for (int k = 1; k <= 6; ++k) {
        CHECK(profile[k - 1] == exact_t(NetDefinition{k, sobol_matrices(3, k), std::nullopt, 0}, full_subset(3)));
    }
}

TEST_CASE("point files") {
    const DyadicPointSet pts = generate_net(NetDefinition{3, sobol_matrices(3, 3), std::nullopt, 0});
    std::stringstream bin;
    write_points_binary(bin, pts, 3);
    CHECK(bin.str().size() == 16 + 8 * 3 * 8);
    CHECK(bin.str().substr(0, 4) == "WQMP");
    int m = 0;
    CHECK(read_points_binary(bin, &m) == pts);
    CHECK(m == 3);
    std::stringstream truncated(bin.str().substr(0, 20));
    CHECK_THROWS_AS(read_points_binary(truncated), ParseError);

    std::ostringstream csv;
    write_points_csv(csv, generate_net(NetDefinition{2, {BitMatrix::identity(2)}, std::nullopt, 0}));
    CHECK(csv.str() == "0\n0.5\n0.25\n0.75\n");
}
