#include "wqmc/poly_lattice.hpp"

#include "wqmc/errors.hpp"
#include "wqmc/parallel.hpp"
#include "wqmc/walsh_haar.hpp"

#include <sstream>
#include <stdexcept>

namespace wqmc {

void PolyLatticeRule::validate() const {
    if (f.degree() < 1) throw std::invalid_argument("modulus must have degree >= 1");
    if (f.degree() > 32) throw std::invalid_argument("modulus degree must be <= 32");
    if (g.empty()) throw std::invalid_argument("generating vector is empty");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i].degree() >= f.degree()) {
            throw std::invalid_argument("g_" + std::to_string(i + 1) + " = " + g[i].to_hex() +
                                        " must have degree below deg f");
        }
    }
}

std::string PolyLatticeRule::to_string() const {
    std::string out = "f=" + f.to_hex() + " g=";
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) out += ",";
        out += g[i].to_hex();
    }
    return out;
}

std::vector<Gf2Poly> parse_poly_list(const std::string& text) {
    std::vector<Gf2Poly> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw std::invalid_argument("empty entry in polynomial list");
        out.push_back(Gf2Poly::from_hex(item.substr(b, e - b + 1)));
    }
    if (out.empty()) throw std::invalid_argument("empty polynomial list");
    return out;
}

DyadicPointSet plps(const PolyLatticeRule& rule) {
    rule.validate();
    const int m = rule.m();
    const std::size_t n = std::size_t{1} << m;
    const std::size_t s = rule.dim();
    DyadicPointSet out(n, s, m);
    parallel_for(n, 1024, [&](std::size_t b, std::size_t e) {
        for (std::size_t h = b; h < e; ++h) {
            const Gf2Poly hp = poly_from_index(h);
            for (std::size_t i = 0; i < s; ++i) {
                out.num(h, i) = laurent_fraction(poly_mulmod(hp, rule.g[i], rule.f), rule.f, m);
            }
        }
    });
    return out;
}

NetDefinition plps_net(const PolyLatticeRule& rule) {
    rule.validate();
    const int m = rule.m();
    NetDefinition def;
    def.m = m;
    for (Gf2Poly g : rule.g) {
        BitMatrix c(m, m);
        Gf2Poly xc = poly_mod(g, rule.f);
        for (int col = 0; col < m; ++col) {
            const std::uint64_t digits = laurent_fraction(xc, rule.f, m);
            for (int r = 0; r < m; ++r) c.set(r, col, (digits >> (m - 1 - r)) & 1U);
            xc = poly_mulmod(xc, Gf2Poly{2}, rule.f);
        }
        def.matrices.push_back(std::move(c));
    }
    return def;
}

namespace {

std::vector<std::size_t> checked_members(const PolyLatticeRule& rule, Subset u, std::size_t k_size) {
    auto members = subset_members(u);
    if (members.size() != k_size) throw std::invalid_argument("k must have one entry per member of u");
    for (auto i : members) {
        if (i >= rule.dim()) throw std::out_of_range("subset coordinate out of range");
    }
    return members;
}

}  // namespace

bool dual_contains(std::span<const std::uint64_t> k, const PolyLatticeRule& rule, Subset u) {
    rule.validate();
    const auto members = checked_members(rule, u, k.size());
    Gf2Poly acc{};
    for (std::size_t j = 0; j < k.size(); ++j) {
        acc += poly_mulmod(poly_from_index(k[j]), rule.g[members[j]], rule.f);
    }
    return acc.is_zero();
}

int character_sum(const PolyLatticeRule& rule, std::span<const std::uint64_t> k, Subset u) {
    const auto members = checked_members(rule, u, k.size());
    const auto points = plps(rule);
    const Dyadic mean = walsh_mean(points, k, members);
    if (mean == Dyadic::from_int(1)) return 1;
    if (mean.is_zero()) return 0;
    throw NumericValidationError("character sum is neither 0 nor 2^m: " + mean.to_string());
}

Dyadic E_dual(const PolyLatticeRule& rule, Subset u, std::uint64_t guard) {
    rule.validate();
    const auto members = subset_members(u);
    if (members.empty()) throw std::invalid_argument("E needs a nonempty subset");
    for (auto i : members) {
        if (i >= rule.dim()) throw std::out_of_range("subset coordinate out of range");
    }
    const int m = rule.m();
    const std::size_t r = members.size();
    const std::uint64_t q = std::uint64_t{1} << m;

    // Pivot: a coordinate whose g_i is invertible mod f fixes k_i from the others.
    std::size_t pivot = r;
    for (std::size_t j = 0; j < r; ++j) {
        const Gf2Poly gi = rule.g[members[j]];
        if (!gi.is_zero() && poly_gcd(gi, rule.f) == Gf2Poly{1}) {
            pivot = j;
            break;
        }
    }
    const std::size_t free_count = pivot < r ? r - 1 : r;
    if (static_cast<std::uint64_t>(m) * free_count > 62 ||
        (std::uint64_t{1} << (m * free_count)) > guard) {
        throw WorkGuardError("dual enumeration exceeds the work guard (2^" + std::to_string(m * free_count) +
                             " candidates); evaluate E from the points instead");
    }

    // tab[j][k] = k * g_j mod f.
    std::vector<std::vector<std::uint64_t>> tab(r, std::vector<std::uint64_t>(q));
    for (std::size_t j = 0; j < r; ++j) {
        for (std::uint64_t k = 0; k < q; ++k) {
            tab[j][k] = poly_mulmod(poly_from_index(k), rule.g[members[j]], rule.f).bits();
        }
    }
    std::vector<std::uint64_t> solve;
    if (pivot < r) {
        const Gf2Poly inv = poly_invmod(rule.g[members[pivot]], rule.f);
        solve.resize(q);
        for (std::uint64_t v = 0; v < q; ++v) solve[v] = poly_mulmod(poly_from_index(v), inv, rule.f).bits();
    }

    std::vector<std::size_t> free_idx;
    for (std::size_t j = 0; j < r; ++j) {
        if (j != pivot) free_idx.push_back(j);
    }
    // Common denominator 2^{m r}; each term contributes 2^{m r - mu(k)}.
    const int den = m * static_cast<int>(r);
    Dyadic::Int total = 0;
    std::vector<std::uint64_t> k(free_idx.size(), 1);
    if (free_idx.empty()) {
        // r == 1 and g invertible: k g = 0 forces k = 0, outside the range.
        return {};
    }
    while (true) {
        std::uint64_t acc = 0;
        int mu_sum = 0;
        for (std::size_t t = 0; t < free_idx.size(); ++t) {
            acc ^= tab[free_idx[t]][k[t]];
            mu_sum += mu(k[t]);
        }
        if (pivot < r) {
            const std::uint64_t kp = solve[acc];
            if (kp != 0) total += static_cast<Dyadic::Int>(1) << (den - mu_sum - mu(kp));
        } else if (acc == 0) {
            total += static_cast<Dyadic::Int>(1) << (den - mu_sum);
        }
        std::size_t t = 0;
        while (t < k.size() && ++k[t] == q) k[t++] = 1;
        if (t == k.size()) break;
    }
    return Dyadic(total, den);
}

namespace {

/// In-place Walsh-Hadamard transform over integers.
void fwht(std::vector<std::int64_t>& a) {
    const std::size_t n = a.size();
    for (std::size_t len = 1; len < n; len <<= 1) {
        for (std::size_t i = 0; i < n; i += len << 1) {
            for (std::size_t j = i; j < i + len; ++j) {
                const auto x = a[j];
                const auto y = a[j + len];
                a[j] = x + y;
                a[j + len] = x - y;
            }
        }
    }
}

}  // namespace

Dyadic E_walsh(const DyadicPointSet& points, int m, Subset u, std::uint64_t guard) {
    const auto members = subset_members(u);
    if (members.empty()) throw std::invalid_argument("E needs a nonempty subset");
    if (m < 0 || m > 32) throw std::invalid_argument("m out of range [0, 32]");
    if (points.size() != (std::size_t{1} << m)) throw std::invalid_argument("point count must equal 2^m");
    if (points.precision() < m) throw std::invalid_argument("point precision below m");
    for (auto i : members) {
        if (i >= points.dim()) throw std::out_of_range("subset coordinate out of range");
    }
    const std::size_t r = members.size();
    if (m == 0) return {};
    const std::uint64_t width = static_cast<std::uint64_t>(m) * r;
    if (width > 62 || (std::uint64_t{1} << width) > guard) {
        throw WorkGuardError("Walsh enumeration exceeds the work guard (2^" + std::to_string(width) + " characters)");
    }
    const std::size_t size = std::size_t{1} << width;
    std::vector<std::int64_t> hist(size, 0);
    for (std::size_t n = 0; n < points.size(); ++n) {
        std::uint64_t key = 0;
        for (std::size_t j = 0; j < r; ++j) {
            key |= reversed_digits(points.coord(n, members[j]), m) << (m * j);
        }
        ++hist[key];
    }
    fwht(hist);
    const std::uint64_t digit_mask = (std::uint64_t{1} << m) - 1;
    // Denominator 2^m for the mean times 2^{m r} for 2^{-mu(k)}.
    const int den = m + static_cast<int>(width);
    Dyadic::Int total = 0;
    for (std::size_t key = 0; key < size; ++key) {
        if (hist[key] == 0) continue;
        int mu_sum = 0;
        bool all_nonzero = true;
        for (std::size_t j = 0; j < r; ++j) {
            const std::uint64_t kj = (key >> (m * j)) & digit_mask;
            if (kj == 0) {
                all_nonzero = false;
                break;
            }
            mu_sum += mu(kj);
        }
        if (!all_nonzero) continue;
        const auto mag = static_cast<Dyadic::Int>(hist[key] < 0 ? -hist[key] : hist[key]);
        total += mag << (static_cast<int>(width) - mu_sum);
    }
    return Dyadic(total, den);
}

}  // namespace wqmc
