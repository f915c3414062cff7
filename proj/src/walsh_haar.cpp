#include "wqmc/walsh_haar.hpp"

#include <cmath>
#include <stdexcept>

namespace wqmc {

int mu(std::span<const std::uint64_t> k) noexcept {
    int total = 0;
    for (auto ki : k) total += mu(ki);
    return total;
}

std::uint64_t reversed_digits(DyadicPoint x, int bits) {
    if (bits > x.prec) throw std::invalid_argument("precision too low for k");
    std::uint64_t lead = x.leading(bits);
    std::uint64_t rev = 0;
    for (int i = 0; i < bits; ++i) {
        rev = (rev << 1) | (lead & 1U);
        lead >>= 1;
    }
    return rev;
}

int wal(std::uint64_t k, DyadicPoint x) {
    const int r = mu(k);
    if (r == 0) return 1;
    return (std::popcount(k & reversed_digits(x, r)) & 1) ? -1 : 1;
}

int wal(std::span<const std::uint64_t> k, std::span<const DyadicPoint> x) {
    if (k.size() != x.size()) throw std::invalid_argument("dimension mismatch");
    int sign = 1;
    for (std::size_t i = 0; i < k.size(); ++i) sign *= wal(k[i], x[i]);
    return sign;
}

DyadicPoint dyadic_sub(DyadicPoint x, DyadicPoint y) {
    if (x.prec < y.prec) std::swap(x, y);
    const int shift = x.prec - y.prec;
    const std::uint64_t aligned = shift >= 64 ? 0 : y.num << shift;
    return {x.num ^ aligned, x.prec};
}

namespace {

void check_index(HaarIndex idx) {
    if (idx.j < -1 || idx.j > 62) throw std::invalid_argument("Haar level out of range");
    if (idx.j == -1 ? idx.m != 0 : idx.m >= (std::uint64_t{1} << idx.j)) {
        throw std::invalid_argument("Haar translation out of range");
    }
}

}  // namespace

int haar_sign(HaarIndex idx, double x) {
    check_index(idx);
    if (idx.j == -1) return 1;
    // Scaling by a power of two is exact.
    const double t = std::ldexp(x, idx.j) - static_cast<double>(idx.m);
    if (t < 0.0 || t >= 1.0) return 0;
    return t < 0.5 ? 1 : -1;
}

int haar_sign(HaarIndex idx, DyadicPoint x) {
    check_index(idx);
    if (idx.j == -1) return 1;
    if (idx.j + 1 > x.prec) {
        // x has no digit beyond position prec, so it sits in the first half when
        // its leading digits match m.
        const std::uint64_t lead = x.prec >= idx.j ? x.num >> (x.prec - idx.j) : x.num << (idx.j - x.prec);
        if (lead != idx.m) return 0;
        return 1;
    }
    const std::uint64_t lead = x.leading(idx.j + 1);
    if ((lead >> 1) != idx.m) return 0;
    return (lead & 1U) ? -1 : 1;
}

double haar_scale(int j) {
    // Even levels are exact powers of two; odd ones are sqrt(2) times one.
    return (j % 2 == 0) ? std::ldexp(1.0, j / 2) : std::ldexp(std::sqrt(2.0), (j - 1) / 2);
}

double haar(HaarIndex idx, double x) {
    const int sign = haar_sign(idx, x);
    return idx.j == -1 ? 1.0 : sign * haar_scale(idx.j);
}

double haar(HaarIndex idx, DyadicPoint x) {
    const int sign = haar_sign(idx, x);
    return idx.j == -1 ? 1.0 : sign * haar_scale(idx.j);
}

double haar(std::span<const HaarIndex> idx, std::span<const double> x) {
    if (idx.size() != x.size()) throw std::invalid_argument("dimension mismatch");
    double v = 1.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        v *= haar(idx[i], x[i]);
        if (v == 0.0) break;
    }
    return v;
}

std::vector<std::int8_t> phi_table(int m) {
    if (m < 1 || m > 32) throw std::invalid_argument("phi table requires 1 <= m <= 32");
    const std::size_t n = std::size_t{1} << m;
    std::vector<std::int8_t> table(n);
    table[0] = static_cast<std::int8_t>(m);
    for (std::size_t k = 1; k < n; ++k) {
        // First nonzero digit of k / 2^m sits at position i0 = m - bit_width(k) + 1.
        table[k] = static_cast<std::int8_t>(m - std::bit_width(k) - 1);
    }
    return table;
}

Dyadic walsh_mean(const DyadicPointSet& points, std::span<const std::uint64_t> k,
                  std::span<const std::size_t> coords) {
    if (points.size() == 0) throw std::invalid_argument("empty point set");
    if (k.size() != coords.size()) throw std::invalid_argument("dimension mismatch");
    const std::size_t n = points.size();
    if (!std::has_single_bit(n)) throw std::invalid_argument("point count must be a power of two");
    std::vector<std::uint64_t> rev_k(k.size());
    std::vector<int> widths(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) {
        if (coords[j] >= points.dim()) throw std::out_of_range("coordinate out of range");
        widths[j] = mu(k[j]);
        if (widths[j] > points.precision()) throw std::invalid_argument("precision too low for k");
    }
    long long total = 0;
    for (std::size_t p = 0; p < n; ++p) {
        int parity = 0;
        for (std::size_t j = 0; j < k.size(); ++j) {
            if (widths[j] == 0) continue;
            parity ^= std::popcount(k[j] & reversed_digits(points.coord(p, coords[j]), widths[j])) & 1;
        }
        total += parity ? -1 : 1;
    }
    return Dyadic(total, std::countr_zero(n));
}

}  // namespace wqmc
