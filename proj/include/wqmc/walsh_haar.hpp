#pragma once

#include "wqmc/dyadic.hpp"

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace wqmc {

/// Number of binary digits of k; mu(0) = 0.
constexpr int mu(std::uint64_t k) noexcept { return std::bit_width(k); }

/// Componentwise sum of mu.
int mu(std::span<const std::uint64_t> k) noexcept;

/// The top `bits` digits of x reversed, so that bit i holds xi_{i+1}.
std::uint64_t reversed_digits(DyadicPoint x, int bits);

/// wal_k(x) in {-1, +1}. Throws std::invalid_argument("precision too low for k")
/// when mu(k) > x.prec.
int wal(std::uint64_t k, DyadicPoint x);

/// Product of wal_{k_j}(x_j).
int wal(std::span<const std::uint64_t> k, std::span<const DyadicPoint> x);

/// Digit-wise subtraction over F_2: XOR of the numerators aligned to the larger precision.
DyadicPoint dyadic_sub(DyadicPoint x, DyadicPoint y);

struct HaarIndex {
    int j = -1;
    std::uint64_t m = 0;
};

/// -1, 0 or +1: which half of I_{j,m} contains x (always +1 for (-1, 0)).
int haar_sign(HaarIndex idx, double x);
int haar_sign(HaarIndex idx, DyadicPoint x);

/// Univariate Haar function; the magnitude is 2^{j/2}.
double haar(HaarIndex idx, double x);
double haar(HaarIndex idx, DyadicPoint x);

/// Product over coordinates.
double haar(std::span<const HaarIndex> idx, std::span<const double> x);

/// 2^{j/2} as a double.
double haar_scale(int j);

/// Entry n is phi(n / 2^m): m for n = 0, otherwise i0 - 2 with i0 the position of
/// the first nonzero digit. 1 <= m <= 32.
std::vector<std::int8_t> phi_table(int m);

/// (1/N) sum_n wal_{k}(y_{n,u}) over the listed coordinates, exactly. k[j] belongs
/// to coordinate coords[j].
Dyadic walsh_mean(const DyadicPointSet& points, std::span<const std::uint64_t> k,
                  std::span<const std::size_t> coords);

}  // namespace wqmc
