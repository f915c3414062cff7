#pragma once

#include "wqmc/dyadic.hpp"
#include "wqmc/gf2.hpp"
#include "wqmc/poly_lattice.hpp"
#include "wqmc/weights.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace wqmc {

/// B_gamma from the phi kernel: (1/N) sum_n sum_u gamma_u prod_{i in u} (b_i - a_i)/2 phi(y_{n,i}).
/// N = 2^m points with precision >= m. The formula used depends on the weight kind.
double B_fast(const DyadicPointSet& points, int m, const WeightScheme& w, const Cube& cube);

/// Same value with the General (subset-sum) formula regardless of the weight kind.
double B_fast_general(const DyadicPointSet& points, int m, const WeightScheme& w, const Cube& cube);

/// sum_u gamma_u prod(b_i - a_i) E(P(g, f), u) from exact dual-net E values.
double B_dual(const PolyLatticeRule& rule, const WeightScheme& w, const Cube& cube,
              std::uint64_t guard = kDefaultEGuard);

struct CbcResult {
    std::vector<Gf2Poly> g;
    double B = 0.0;
    /// Minimum found at stage d (entry d-1); stage 1 is g_1 = 1.
    std::vector<double> stage_B;
    /// Averaging bound for the first d coordinates.
    std::vector<double> stage_bound;
};

/// g_1 = 1, then each g_d in 0..2^m-1 minimizing B over the first d coordinates; ties
/// go to the smaller encoding. f must be irreducible with 1 <= deg f <= 32.
CbcResult cbc_construct(Gf2Poly f, std::size_t s, const WeightScheme& w, const Cube& cube);

/// (1/2^m) sum_u gamma_u (m/2)^{|u|} prod(b_i - a_i).
double average_formula(int m, std::size_t s, const WeightScheme& w, const Cube& cube);
Dyadic average_formula_exact(int m, std::size_t s, const WeightScheme& w, const Cube& cube);

struct AverageResult {
    double value = 0.0;
    /// Set when every weight, side and E sum fits the exact type.
    std::optional<Dyadic> exact;
    /// mean over g of E(P(g, f), u), indexed by subset mask.
    std::vector<Dyadic> mean_E;
};

inline constexpr int kMaxEnumerationBits = 24;

/// Mean of B over all g in G_m^s. E(., u) only depends on g_u, so each subset's
/// sum runs over G_m^{|u|} and is multiplied by 2^{m(s-|u|)}. Requires s m <= 24.
AverageResult average_B(Gf2Poly f, std::size_t s, const WeightScheme& w, const Cube& cube);

struct MarkovResult {
    std::uint64_t count = 0;
    /// floor(2^{sm}(1 - 1/c)); the statement is count > threshold.
    std::uint64_t threshold = 0;
    std::uint64_t total = 0;
    double average = 0.0;
};

/// Counts g in G_m^s with B(g, f) <= c * average (relative slack 1e-12).
MarkovResult markov_fraction(Gf2Poly f, std::size_t s, const WeightScheme& w, const Cube& cube, double c);

/// Laurent digits {r / f}_m for every r of degree < m.
std::vector<std::uint64_t> laurent_table(Gf2Poly f);

}  // namespace wqmc
