#include "wqmc/dyadic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace wqmc {

double DyadicPoint::value() const noexcept {
    return std::ldexp(static_cast<double>(num), -prec);
}

DyadicPointSet::DyadicPointSet(std::size_t n_points, std::size_t dim, int precision)
    : n_(n_points), s_(dim), prec_(precision) {
    if (precision < 0 || precision > 64) throw std::invalid_argument("precision out of range [0, 64]");
    data_.assign(n_points * dim, 0);
}

DyadicPointSet DyadicPointSet::project(std::span<const std::size_t> coords) const {
    DyadicPointSet out(n_, coords.size(), prec_);
    for (std::size_t c : coords) {
        if (c >= s_) throw std::out_of_range("projection coordinate out of range");
    }
    for (std::size_t n = 0; n < n_; ++n) {
        for (std::size_t j = 0; j < coords.size(); ++j) out.num(n, j) = num(n, coords[j]);
    }
    return out;
}

DyadicPointSet DyadicPointSet::slice(std::size_t begin, std::size_t count) const {
    if (begin + count > n_) throw std::out_of_range("slice out of range");
    DyadicPointSet out(count, s_, prec_);
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(begin * s_), count * s_, out.data_.begin());
    return out;
}

DyadicPointSet DyadicPointSet::widen(int precision) const {
    if (precision < prec_) throw std::invalid_argument("widen cannot lower precision");
    DyadicPointSet out(n_, s_, precision);
    const int shift = precision - prec_;
    for (std::size_t k = 0; k < data_.size(); ++k) {
        out.data_[k] = shift >= 64 ? 0 : data_[k] << shift;
    }
    return out;
}

namespace {

int trailing_zeros(Dyadic::Int v) {
    auto u = static_cast<unsigned __int128>(v < 0 ? -v : v);
    const auto lo = static_cast<std::uint64_t>(u);
    if (lo != 0) return std::countr_zero(lo);
    return 64 + std::countr_zero(static_cast<std::uint64_t>(u >> 64));
}

int bit_length(Dyadic::Int v) {
    auto u = static_cast<unsigned __int128>(v < 0 ? -v : v);
    const auto hi = static_cast<std::uint64_t>(u >> 64);
    if (hi != 0) return 64 + std::bit_width(hi);
    return std::bit_width(static_cast<std::uint64_t>(u));
}

Dyadic::Int shl_checked(Dyadic::Int v, int k) {
    if (k == 0 || v == 0) return v;
    if (bit_length(v) + k > 126) throw std::overflow_error("dyadic numerator overflow");
    return v * (static_cast<Dyadic::Int>(1) << k);
}

}  // namespace

Dyadic::Dyadic(Int num, int exp) : num_(num), exp_(exp) {
    if (num_ == 0) {
        exp_ = 0;
        return;
    }
    const int tz = trailing_zeros(num_);
    if (exp_ > 0) {
        const int k = std::min(tz, exp_);
        num_ >>= k;
        exp_ -= k;
    }
    if (exp_ < 0) {
        num_ = shl_checked(num_, -exp_);
        exp_ = 0;
    }
}

Dyadic Dyadic::from_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value has no dyadic form");
    if (v == 0.0) return {};
    int e = 0;
    const double frac = std::frexp(v, &e);
    // frac * 2^53 is an integer with |frac| in [1/2, 1).
    const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
    return Dyadic(mant, 53 - e);
}

Dyadic Dyadic::operator+(const Dyadic& o) const {
    const int e = std::max(exp_, o.exp_);
    return Dyadic(shl_checked(num_, e - exp_) + shl_checked(o.num_, e - o.exp_), e);
}

Dyadic Dyadic::operator-(const Dyadic& o) const { return *this + (-o); }

Dyadic Dyadic::operator*(const Dyadic& o) const {
    if (num_ == 0 || o.num_ == 0) return {};
    if (bit_length(num_) + bit_length(o.num_) > 126) throw std::overflow_error("dyadic numerator overflow");
    return Dyadic(num_ * o.num_, exp_ + o.exp_);
}

bool Dyadic::operator<(const Dyadic& o) const {
    const int e = std::max(exp_, o.exp_);
    return shl_checked(num_, e - exp_) < shl_checked(o.num_, e - o.exp_);
}

double Dyadic::to_double() const {
    const auto hi = static_cast<double>(static_cast<std::int64_t>(num_ >> 64));
    const auto lo = static_cast<double>(static_cast<std::uint64_t>(num_));
    // hi * 2^64 is exact; the sum rounds once.
    return std::ldexp(std::ldexp(hi, 64) + lo, -exp_);
}

std::string Dyadic::to_string() const {
    auto u = static_cast<unsigned __int128>(num_ < 0 ? -num_ : num_);
    std::string digits;
    do {
        digits.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    } while (u != 0);
    if (num_ < 0) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    if (exp_ == 0) return digits;
    // 2^exp for exp < 128.
    auto den = static_cast<unsigned __int128>(1) << exp_;
    std::string d;
    do {
        d.push_back(static_cast<char>('0' + static_cast<int>(den % 10)));
        den /= 10;
    } while (den != 0);
    std::reverse(d.begin(), d.end());
    return digits + "/" + d;
}

std::string exact_decimal(std::uint64_t num, int prec) {
    if (prec < 0 || prec > 64) throw std::invalid_argument("precision out of range [0, 64]");
    using U = unsigned __int128;
    const U one = static_cast<U>(1) << prec;
    U frac = num;
    std::string out = frac >= one ? "1" : "0";
    frac %= one;
    if (frac == 0) return out;
    out.push_back('.');
    while (frac != 0) {
        frac *= 10;
        out.push_back(static_cast<char>('0' + static_cast<int>(frac >> prec)));
        frac &= one - 1;
    }
    return out;
}

}  // namespace wqmc
