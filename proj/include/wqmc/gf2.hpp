#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wqmc {

/// Polynomial over F_2 packed into a machine word: bit i is the coefficient of x^i.
class Gf2Poly {
public:
    constexpr Gf2Poly() = default;
    constexpr explicit Gf2Poly(std::uint64_t bits) : bits_(bits) {}

    constexpr std::uint64_t bits() const noexcept { return bits_; }
    constexpr bool is_zero() const noexcept { return bits_ == 0; }

    /// Index of the highest set bit; -1 stands in for deg(0) = -inf.
    constexpr int degree() const noexcept { return std::bit_width(bits_) - 1; }

    constexpr Gf2Poly operator+(Gf2Poly o) const noexcept { return Gf2Poly(bits_ ^ o.bits_); }
    constexpr Gf2Poly& operator+=(Gf2Poly o) noexcept {
        bits_ ^= o.bits_;
        return *this;
    }
    constexpr auto operator<=>(const Gf2Poly&) const = default;

    /// Parses "0x7", "7" (hex) or "0b111".
    static Gf2Poly from_hex(std::string_view text);
    std::string to_hex() const;

private:
    std::uint64_t bits_ = 0;
};

/// The integer <-> polynomial identification k = sum k_j 2^j  <->  sum k_j x^j.
constexpr Gf2Poly poly_from_index(std::uint64_t k) noexcept { return Gf2Poly(k); }
constexpr std::uint64_t index_of(Gf2Poly p) noexcept { return p.bits(); }

/// Remainder of a modulo f. Throws std::invalid_argument("zero modulus") for f = 0.
Gf2Poly poly_mod(Gf2Poly a, Gf2Poly f);

/// (a * b) mod f with carry-less multiplication.
Gf2Poly poly_mulmod(Gf2Poly a, Gf2Poly b, Gf2Poly f);

/// Monic gcd. Throws std::invalid_argument("gcd undefined") when both are zero.
Gf2Poly poly_gcd(Gf2Poly a, Gf2Poly b);

/// Inverse of a modulo f; throws when gcd(a, f) != 1.
Gf2Poly poly_invmod(Gf2Poly a, Gf2Poly f);

/// Deterministic irreducibility test: gcd(f, x^(2^i) - x) = 1 for 1 <= i <= deg(f)/2.
/// Throws std::invalid_argument("not a candidate modulus") for degree < 1.
bool is_irreducible(Gf2Poly f);

/// Smallest (by encoding) irreducible polynomial of the given degree, 1 <= degree <= 63.
Gf2Poly first_irreducible(int degree);

/// Digits a_1..a_m of the Laurent expansion g/f = sum a_k x^-k, packed with a_1 as
/// the most significant of m bits, i.e. the numerator of {g/f}_m over 2^m.
/// Requires deg(g) < deg(f) ("improper fraction" otherwise) and m <= 64.
std::uint64_t laurent_fraction(Gf2Poly g, Gf2Poly f, int m);

/// Rank over F_2 of a list of rows packed as bit masks.
int f2_rank(std::vector<std::uint64_t> rows);

/// Matrix over F_2. Row r is a bit mask; bit c is the entry in column c (0-based).
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(int n_rows, int n_cols);

    static BitMatrix identity(int n);

    int rows() const noexcept { return n_rows_; }
    int cols() const noexcept { return n_cols_; }

    bool get(int r, int c) const { return (rows_.at(r) >> c) & 1U; }
    void set(int r, int c, bool v);

    std::uint64_t row(int r) const { return rows_.at(r); }
    void set_row(int r, std::uint64_t mask);
    std::span<const std::uint64_t> row_masks() const noexcept { return rows_; }

    /// Column c as a `precision`-digit dyadic numerator: row 0 lands on the most
    /// significant bit. Rows beyond `precision` are dropped.
    std::uint64_t column_numerator(int c, int precision) const;

    /// y = C * n over F_2 where n is the digit vector of the index (bit j = n_j).
    /// Returned as a `precision`-digit numerator (y_1 most significant).
    std::uint64_t apply(std::uint64_t digits, int precision) const;

    BitMatrix upper_left(int n) const;
    bool is_upper_triangular() const;
    bool is_nonsingular() const;

    bool operator==(const BitMatrix&) const = default;

private:
    int n_rows_ = 0;
    int n_cols_ = 0;
    std::vector<std::uint64_t> rows_;
};

}  // namespace wqmc
