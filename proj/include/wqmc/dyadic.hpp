#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wqmc {

/// num / 2^prec in [0, 1), prec <= 64.
struct DyadicPoint {
    std::uint64_t num = 0;
    int prec = 0;

    double value() const noexcept;

    /// The leading `bits` digits xi_1..xi_bits as an integer (xi_1 most significant).
    /// Requires bits <= prec.
    std::uint64_t leading(int bits) const noexcept {
        return bits == 0 ? 0 : num >> (prec - bits);
    }
};

/// N x s array of dyadic rationals sharing one precision. Row-major.
class DyadicPointSet {
public:
    DyadicPointSet() = default;
    DyadicPointSet(std::size_t n_points, std::size_t dim, int precision);

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return s_; }
    int precision() const noexcept { return prec_; }

    std::uint64_t num(std::size_t n, std::size_t i) const { return data_[n * s_ + i]; }
    std::uint64_t& num(std::size_t n, std::size_t i) { return data_[n * s_ + i]; }
    DyadicPoint coord(std::size_t n, std::size_t i) const { return {num(n, i), prec_}; }
    double value(std::size_t n, std::size_t i) const { return coord(n, i).value(); }

    std::span<const std::uint64_t> row(std::size_t n) const { return {data_.data() + n * s_, s_}; }
    std::span<const std::uint64_t> data() const noexcept { return data_; }

    /// Same points with only the listed coordinates, in the given order.
    DyadicPointSet project(std::span<const std::size_t> coords) const;
    /// Rows [begin, begin + count).
    DyadicPointSet slice(std::size_t begin, std::size_t count) const;
    /// Re-express every coordinate at a higher precision (exact).
    DyadicPointSet widen(int precision) const;

    bool operator==(const DyadicPointSet&) const = default;

private:
    std::size_t n_ = 0;
    std::size_t s_ = 0;
    int prec_ = 0;
    std::vector<std::uint64_t> data_;
};

/// Exact rational with a power-of-two denominator: num / 2^exp, kept normalized
/// (num odd, or num == 0 with exp == 0).
class Dyadic {
public:
    using Int = __int128;

    constexpr Dyadic() = default;
    Dyadic(Int num, int exp);
    static Dyadic from_int(long long v) { return Dyadic(v, 0); }
    /// Every finite double is dyadic; throws std::invalid_argument for inf/nan.
    static Dyadic from_double(double v);

    Int numerator() const noexcept { return num_; }
    int exponent() const noexcept { return exp_; }
    bool is_zero() const noexcept { return num_ == 0; }

    Dyadic operator+(const Dyadic& o) const;
    Dyadic operator-(const Dyadic& o) const;
    Dyadic operator-() const { return Dyadic(-num_, exp_); }
    Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
    Dyadic operator*(const Dyadic& o) const;
    /// Multiply by 2^k (k may be negative).
    Dyadic scaled(int k) const { return Dyadic(num_, exp_ - k); }

    bool operator==(const Dyadic& o) const = default;
    bool operator<(const Dyadic& o) const;
    bool operator<=(const Dyadic& o) const { return !(o < *this); }

    double to_double() const;
    /// "5/16", "3", "-1/2".
    std::string to_string() const;

private:
    Int num_ = 0;
    int exp_ = 0;
};

/// Exact decimal expansion of num / 2^prec (terminates after at most prec digits).
std::string exact_decimal(std::uint64_t num, int prec);

}  // namespace wqmc
