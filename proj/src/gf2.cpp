#include "wqmc/gf2.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <utility>

namespace wqmc {

Gf2Poly Gf2Poly::from_hex(std::string_view text) {
    int base = 16;
    if (text.starts_with("0x") || text.starts_with("0X")) {
        text.remove_prefix(2);
    } else if (text.starts_with("0b") || text.starts_with("0B")) {
        text.remove_prefix(2);
        base = 2;
    }
    std::uint64_t bits = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), bits, base);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("invalid polynomial literal '" + std::string(text) + "'");
    }
    return Gf2Poly(bits);
}

std::string Gf2Poly::to_hex() const {
    char buf[19] = {'0', 'x'};
    auto [ptr, ec] = std::to_chars(buf + 2, buf + sizeof buf, bits_, 16);
    return std::string(buf, ptr);
}

Gf2Poly poly_mod(Gf2Poly a, Gf2Poly f) {
    if (f.is_zero()) throw std::invalid_argument("zero modulus");
    const int df = f.degree();
    std::uint64_t r = a.bits();
    for (int d = std::bit_width(r) - 1; d >= df; d = std::bit_width(r) - 1) {
        r ^= f.bits() << (d - df);
    }
    return Gf2Poly(r);
}

Gf2Poly poly_mulmod(Gf2Poly a, Gf2Poly b, Gf2Poly f) {
    a = poly_mod(a, f);
    b = poly_mod(b, f);
    const int df = f.degree();
    if (df == 0) return Gf2Poly{};
    const std::uint64_t top = std::uint64_t{1} << df;
    std::uint64_t x = a.bits();
    std::uint64_t y = b.bits();
    std::uint64_t acc = 0;
    // deg(x) < df <= 63, so x << 1 never overflows before reduction.
    while (y != 0) {
        if (y & 1U) acc ^= x;
        y >>= 1;
        x <<= 1;
        if (x & top) x ^= f.bits();
    }
    return Gf2Poly(acc);
}

Gf2Poly poly_gcd(Gf2Poly a, Gf2Poly b) {
    if (a.is_zero() && b.is_zero()) throw std::invalid_argument("gcd undefined");
    while (!b.is_zero()) {
        a = poly_mod(a, b);
        std::swap(a, b);
    }
    return a;
}

Gf2Poly poly_invmod(Gf2Poly a, Gf2Poly f) {
    a = poly_mod(a, f);
    // Extended Euclid tracking only the coefficient of a.
    Gf2Poly r0 = f, r1 = a;
    Gf2Poly s0{}, s1{1};
    while (!r1.is_zero()) {
        // One division step: q = r0 / r1, done bitwise so s stays in sync.
        Gf2Poly q{};
        Gf2Poly r = r0;
        const int d1 = r1.degree();
        for (int d = r.degree(); d >= d1; d = r.degree()) {
            q += Gf2Poly(std::uint64_t{1} << (d - d1));
            r += Gf2Poly(r1.bits() << (d - d1));
        }
        // s_new = s0 - q * s1, with products reduced mod f.
        Gf2Poly s = s0 + poly_mulmod(q, s1, f);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    if (r0 != Gf2Poly{1}) throw std::invalid_argument("polynomial not invertible modulo f");
    return poly_mod(s0, f);
}

bool is_irreducible(Gf2Poly f) {
    const int n = f.degree();
    if (n < 1) throw std::invalid_argument("not a candidate modulus");
    const Gf2Poly x = poly_mod(Gf2Poly{2}, f);
    Gf2Poly h = x;
    for (int i = 1; i <= n / 2; ++i) {
        h = poly_mulmod(h, h, f);
        Gf2Poly diff = h + x;
        if (diff.is_zero()) return false;
        if (poly_gcd(f, diff) != Gf2Poly{1}) return false;
    }
    return true;
}

Gf2Poly first_irreducible(int degree) {
    if (degree < 1 || degree > 63) throw std::invalid_argument("degree out of range [1, 63]");
    const std::uint64_t lo = std::uint64_t{1} << degree;
    for (std::uint64_t c = lo;; ++c) {
        if (is_irreducible(Gf2Poly(c))) return Gf2Poly(c);
    }
}

std::uint64_t laurent_fraction(Gf2Poly g, Gf2Poly f, int m) {
    if (f.is_zero()) throw std::invalid_argument("zero modulus");
    if (g.degree() >= f.degree()) throw std::invalid_argument("improper fraction");
    if (m < 0 || m > 64) throw std::invalid_argument("digit count out of range [0, 64]");
    const int df = f.degree();
    // deg(r) < df <= 63 throughout, so the shift cannot overflow.
    std::uint64_t r = g.bits();
    std::uint64_t digits = 0;
    for (int k = 1; k <= m; ++k) {
        r <<= 1;
        digits <<= 1;
        if ((r >> df) & 1U) {
            digits |= 1U;
            r ^= f.bits();
        }
    }
    return digits;
}

int f2_rank(std::vector<std::uint64_t> rows) {
    int rank = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::uint64_t pivot_row = rows[i];
        if (pivot_row == 0) continue;
        ++rank;
        const std::uint64_t pivot = pivot_row & (~pivot_row + 1);
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            if (rows[j] & pivot) rows[j] ^= pivot_row;
        }
    }
    return rank;
}

BitMatrix::BitMatrix(int n_rows, int n_cols) : n_rows_(n_rows), n_cols_(n_cols) {
    if (n_rows < 0 || n_cols < 0 || n_cols > 64) {
        throw std::invalid_argument("matrix shape out of range (cols <= 64)");
    }
    rows_.assign(static_cast<std::size_t>(n_rows), 0);
}

BitMatrix BitMatrix::identity(int n) {
    BitMatrix id(n, n);
    for (int i = 0; i < n; ++i) id.set(i, i, true);
    return id;
}

void BitMatrix::set(int r, int c, bool v) {
    if (c < 0 || c >= n_cols_) throw std::out_of_range("column index out of range");
    const std::uint64_t bit = std::uint64_t{1} << c;
    auto& row = rows_.at(static_cast<std::size_t>(r));
    row = v ? (row | bit) : (row & ~bit);
}

void BitMatrix::set_row(int r, std::uint64_t mask) {
    if (n_cols_ < 64 && (mask >> n_cols_) != 0) {
        throw std::invalid_argument("row mask wider than the matrix");
    }
    rows_.at(static_cast<std::size_t>(r)) = mask;
}

std::uint64_t BitMatrix::column_numerator(int c, int precision) const {
    std::uint64_t num = 0;
    const int n = std::min(n_rows_, precision);
    for (int r = 0; r < n; ++r) {
        if ((rows_[r] >> c) & 1U) num |= std::uint64_t{1} << (precision - 1 - r);
    }
    return num;
}

std::uint64_t BitMatrix::apply(std::uint64_t digits, int precision) const {
    std::uint64_t num = 0;
    const int n = std::min(n_rows_, precision);
    for (int r = 0; r < n; ++r) {
        if (std::popcount(rows_[r] & digits) & 1) num |= std::uint64_t{1} << (precision - 1 - r);
    }
    return num;
}

BitMatrix BitMatrix::upper_left(int n) const {
    if (n > n_rows_ || n > n_cols_) throw std::invalid_argument("submatrix larger than matrix");
    BitMatrix sub(n, n);
    const std::uint64_t mask = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    for (int r = 0; r < n; ++r) sub.rows_[r] = rows_[r] & mask;
    return sub;
}

bool BitMatrix::is_upper_triangular() const {
    for (int r = 0; r < n_rows_; ++r) {
        const std::uint64_t below = r >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << r) - 1;
        if (rows_[r] & below) return false;
    }
    return true;
}

bool BitMatrix::is_nonsingular() const {
    return n_rows_ == n_cols_ && f2_rank(rows_) == n_rows_;
}

}  // namespace wqmc
