#include "wqmc/cbc.hpp"

#include "wqmc/errors.hpp"
#include "wqmc/parallel.hpp"
#include "wqmc/summation.hpp"
#include "wqmc/walsh_haar.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wqmc {

namespace {

enum class Formula { Product, Pod, General };

Formula formula_for(const WeightScheme& w) {
    switch (w.kind()) {
        case WeightScheme::Kind::Product:
            return Formula::Product;
        case WeightScheme::Kind::Pod:
            return Formula::Pod;
        case WeightScheme::Kind::General:
            return Formula::General;
    }
    return Formula::General;
}

/// B over an N x s matrix of phi values given by phi(n, i).
template <class Phi>
double criterion_core(std::size_t n_points, std::size_t s, const WeightScheme& w, const Cube& cube,
                      Formula formula, bool parallel, const Phi& phi) {
    check_dims(w, cube, s);
    std::vector<double> half_side(s);
    for (std::size_t i = 0; i < s; ++i) half_side[i] = 0.5 * cube.side(i);

    std::function<double(std::size_t)> term;
    std::vector<double> c(s);
    std::vector<double> order_scaled;
    std::vector<double> by_mask;
    switch (formula) {
        case Formula::Product:
            // prod_i (1 + c_i phi_i) - 1, accumulated as r <- r + c_i phi_i (1 + r).
            for (std::size_t i = 0; i < s; ++i) c[i] = w.coordinate(i) * half_side[i];
            term = [&](std::size_t n) {
                double r = 0.0;
                for (std::size_t i = 0; i < s; ++i) r += c[i] * phi(n, i) * (1.0 + r);
                return r;
            };
            break;
        case Formula::Pod:
            // a_l = e_l(gamma_i (b_i - a_i) phi_i); B term = sum_l Gamma_l / 2^l a_l.
            for (std::size_t i = 0; i < s; ++i) c[i] = w.coordinate(i) * cube.side(i);
            order_scaled.resize(s + 1);
            for (std::size_t l = 1; l <= s; ++l) order_scaled[l] = std::ldexp(w.order(l), -static_cast<int>(l));
            term = [&](std::size_t n) {
                thread_local std::vector<double> a;
                a.assign(s + 1, 0.0);
                a[0] = 1.0;
                for (std::size_t i = 0; i < s; ++i) {
                    const double x = c[i] * phi(n, i);
                    if (x == 0.0) continue;
                    for (std::size_t l = i + 1; l >= 1; --l) a[l] += x * a[l - 1];
                }
                CompensatedSum acc;
                for (std::size_t l = 1; l <= s; ++l) acc.add(order_scaled[l] * a[l]);
                return acc.value();
            };
            break;
        case Formula::General:
            require_enumerable(s, "B with general weights");
            by_mask.resize(std::size_t{1} << s);
            for (Subset u = 1; u < by_mask.size(); ++u) by_mask[u] = w.gamma(u);
            term = [&](std::size_t n) {
                thread_local std::vector<double> val;
                val.assign(std::size_t{1} << s, 0.0);
                val[0] = 1.0;
                CompensatedSum acc;
                for (std::size_t u = 1; u < val.size(); ++u) {
                    const auto low = static_cast<std::size_t>(std::countr_zero(u));
                    val[u] = val[u & (u - 1)] * half_side[low] * phi(n, low);
                    acc.add(by_mask[u] * val[u]);
                }
                return acc.value();
            };
            break;
    }
    // Exact value is a sum of nonnegative terms; drop cancellation noise below zero.
    return std::max(0.0, deterministic_sum(n_points, term, parallel) / static_cast<double>(n_points));
}

void check_points(const DyadicPointSet& points, int m) {
    if (m < 1 || m > 32) throw std::invalid_argument("m out of range [1, 32]");
    if (points.size() != (std::size_t{1} << m)) throw std::invalid_argument("point count must equal 2^m");
    if (points.precision() < m) throw std::invalid_argument("point precision below m");
}

double B_fast_with(const DyadicPointSet& points, int m, const WeightScheme& w, const Cube& cube, Formula f) {
    check_points(points, m);
    const auto table = phi_table(m);
    const int shift = points.precision() - m;
    const std::size_t s = points.dim();
    return criterion_core(points.size(), s, w, cube, f, true, [&](std::size_t n, std::size_t i) {
        return static_cast<double>(table[points.num(n, i) >> shift]);
    });
}

void check_irreducible_modulus(Gf2Poly f) {
    if (f.degree() < 1 || f.degree() > 32) throw std::invalid_argument("modulus degree must be in [1, 32]");
    if (!is_irreducible(f)) throw std::invalid_argument("CBC guarantee requires irreducible modulus");
}

/// column[h] = phi({h g / f}_m) for every h.
void phi_column(Gf2Poly g, Gf2Poly f, const std::vector<std::uint64_t>& lf, const std::vector<std::int8_t>& table,
                std::vector<std::int8_t>& column) {
    const int m = f.degree();
    const std::size_t q = std::size_t{1} << m;
    std::uint64_t basis[64];
    Gf2Poly xg = poly_mod(g, f);
    for (int j = 0; j < m; ++j) {
        basis[j] = xg.bits();
        xg = poly_mulmod(xg, Gf2Poly{2}, f);
    }
    column.resize(q);
    // h g mod f is linear in h; walk h in order reusing h with its lowest bit cleared.
    thread_local std::vector<std::uint64_t> prod;
    prod.assign(q, 0);
    column[0] = table[0];
    for (std::size_t h = 1; h < q; ++h) {
        prod[h] = prod[h & (h - 1)] ^ basis[std::countr_zero(h)];
        column[h] = table[lf[prod[h]]];
    }
}

}  // namespace

double B_fast(const DyadicPointSet& points, int m, const WeightScheme& w, const Cube& cube) {
    return B_fast_with(points, m, w, cube, formula_for(w));
}

double B_fast_general(const DyadicPointSet& points, int m, const WeightScheme& w, const Cube& cube) {
    return B_fast_with(points, m, w, cube, Formula::General);
}

double B_dual(const PolyLatticeRule& rule, const WeightScheme& w, const Cube& cube, std::uint64_t guard) {
    rule.validate();
    const std::size_t s = rule.dim();
    check_dims(w, cube, s);
    require_enumerable(s, "B from the dual net");
    CompensatedSum total;
    for (Subset u = 1; u <= full_subset(s); ++u) {
        const Dyadic e = E_dual(rule, u, guard);
        if (e.is_zero()) continue;
        total.add(w.gamma(u) * cube.side_product(u) * e.to_double());
    }
    return total.value();
}

std::vector<std::uint64_t> laurent_table(Gf2Poly f) {
    const int m = f.degree();
    if (m < 1 || m > 32) throw std::invalid_argument("modulus degree must be in [1, 32]");
    std::vector<std::uint64_t> lf(std::size_t{1} << m);
    for (std::size_t r = 0; r < lf.size(); ++r) lf[r] = laurent_fraction(poly_from_index(r), f, m);
    return lf;
}

double average_formula(int m, std::size_t s, const WeightScheme& w, const Cube& cube) {
    if (m < 1) throw std::invalid_argument("m must be positive");
    const double half_m = 0.5 * m;
    return std::ldexp(weighted_subset_sum(w, cube, s, [&](int k) { return std::pow(half_m, k); }), -m);
}

Dyadic average_formula_exact(int m, std::size_t s, const WeightScheme& w, const Cube& cube) {
    if (m < 1) throw std::invalid_argument("m must be positive");
    return weighted_subset_sum_exact(w, cube, s, [&](int k) {
               Dyadic p = Dyadic::from_int(1);
               for (int j = 0; j < k; ++j) p = p * Dyadic(m, 1);
               return p;
           })
        .scaled(-m);
}

CbcResult cbc_construct(Gf2Poly f, std::size_t s, const WeightScheme& w, const Cube& cube) {
    check_irreducible_modulus(f);
    if (s < 1) throw std::invalid_argument("dimension must be at least 1");
    check_dims(w, cube, s);
    const Formula formula = formula_for(w);
    if (formula == Formula::General) require_enumerable(s, "CBC with general weights");
    const int m = f.degree();
    const std::size_t q = std::size_t{1} << m;
    const auto lf = laurent_table(f);
    const auto table = phi_table(m);

    CbcResult result;
    // Columns of phi values for the chosen components, point-major per column.
    std::vector<std::vector<std::int8_t>> chosen;
    chosen.emplace_back();
    phi_column(Gf2Poly{1}, f, lf, table, chosen.back());
    result.g.push_back(Gf2Poly{1});

    auto evaluate = [&](std::size_t d, const std::vector<std::int8_t>& candidate) {
        return criterion_core(q, d, w, cube, formula, false, [&](std::size_t n, std::size_t i) {
            return static_cast<double>(i + 1 == d ? candidate[n] : chosen[i][n]);
        });
    };
    result.stage_B.push_back(evaluate(1, chosen[0]));
    result.stage_bound.push_back(average_formula(m, 1, w, cube));

    std::vector<double> values(q);
    for (std::size_t d = 2; d <= s; ++d) {
        parallel_for(q, 1, [&](std::size_t b, std::size_t e) {
            std::vector<std::int8_t> column;
            for (std::size_t g = b; g < e; ++g) {
                phi_column(poly_from_index(g), f, lf, table, column);
                values[g] = evaluate(d, column);
            }
        });
        std::size_t best = 0;
        for (std::size_t g = 1; g < q; ++g) {
            if (values[g] < values[best]) best = g;
        }
        result.g.push_back(poly_from_index(best));
        result.stage_B.push_back(values[best]);
        result.stage_bound.push_back(average_formula(m, d, w, cube));
        chosen.emplace_back();
        phi_column(poly_from_index(best), f, lf, table, chosen.back());
    }
    PolyLatticeRule rule{f, result.g};
    result.B = B_fast(plps(rule), m, w, cube);
    return result;
}

AverageResult average_B(Gf2Poly f, std::size_t s, const WeightScheme& w, const Cube& cube) {
    check_irreducible_modulus(f);
    if (s < 1) throw std::invalid_argument("dimension must be at least 1");
    check_dims(w, cube, s);
    require_enumerable(s, "average of B");
    const int m = f.degree();
    if (static_cast<std::uint64_t>(m) * s > kMaxEnumerationBits) {
        throw WorkGuardError("enumeration of G_m^s exceeds 2^" + std::to_string(kMaxEnumerationBits) + " vectors");
    }
    // Dual enumeration for |u| = r costs 2^{m r} rules times 2^{m (r - 1)} candidates.
    std::uint64_t work = 0;
    for (std::size_t r = 1; r <= s; ++r) {
        const std::uint64_t bits = static_cast<std::uint64_t>(m) * (2 * r - 1);
        if (bits > 40) throw WorkGuardError("exact averaging exceeds the work guard");
        work += std::uint64_t{1} << bits;
    }
    if (work > (std::uint64_t{1} << 34)) throw WorkGuardError("exact averaging exceeds the work guard");

    AverageResult out;
    out.mean_E.assign(std::size_t{1} << s, Dyadic{});
    const std::uint64_t q = std::uint64_t{1} << m;
    // E(., u) depends on g_u only; memoize by |u|-tuple shape via a per-size table.
    std::vector<std::optional<Dyadic>> by_size(s + 1);
    for (Subset u = 1; u <= full_subset(s); ++u) {
        const int r = subset_size(u);
        if (!by_size[static_cast<std::size_t>(r)]) {
            const std::uint64_t n_rules = std::uint64_t{1} << (m * r);
            constexpr std::size_t grain = 64;
            const std::size_t n_chunks = static_cast<std::size_t>((n_rules + grain - 1) / grain);
            std::vector<Dyadic> partial(n_chunks);
            parallel_for(static_cast<std::size_t>(n_rules), grain, [&](std::size_t b, std::size_t e) {
                PolyLatticeRule rule{f, std::vector<Gf2Poly>(static_cast<std::size_t>(r))};
                Dyadic acc;
                for (std::size_t idx = b; idx < e; ++idx) {
                    for (int j = 0; j < r; ++j) rule.g[j] = poly_from_index((idx >> (m * j)) & (q - 1));
                    acc += E_dual(rule, full_subset(static_cast<std::size_t>(r)), std::uint64_t{1} << 40);
                }
                partial[b / grain] = acc;
            });
            Dyadic sum;
            for (const auto& p : partial) sum += p;
            // Mean over G_m^s: the other s - r coordinates contribute a factor 2^{m(s-r)}
            // to the sum, which the division by 2^{sm} turns into 2^{-m r}.
            by_size[static_cast<std::size_t>(r)] = sum.scaled(-m * r);
        }
        out.mean_E[u] = *by_size[static_cast<std::size_t>(r)];
    }
    CompensatedSum total;
    for (Subset u = 1; u <= full_subset(s); ++u) {
        total.add(w.gamma(u) * cube.side_product(u) * out.mean_E[u].to_double());
    }
    out.value = total.value();
    try {
        Dyadic exact;
        for (Subset u = 1; u <= full_subset(s); ++u) {
            Dyadic term = w.gamma_exact(u) * out.mean_E[u];
            for (auto i : subset_members(u)) term = term * Dyadic::from_double(cube.side(i));
            exact += term;
        }
        out.exact = exact;
    } catch (const std::overflow_error&) {
        out.exact.reset();
    }
    return out;
}

MarkovResult markov_fraction(Gf2Poly f, std::size_t s, const WeightScheme& w, const Cube& cube, double c) {
    if (std::isnan(c) || c < 1.0) throw std::invalid_argument("Markov constant c must be >= 1");
    check_irreducible_modulus(f);
    if (s < 1) throw std::invalid_argument("dimension must be at least 1");
    check_dims(w, cube, s);
    const int m = f.degree();
    const std::uint64_t bits = static_cast<std::uint64_t>(m) * s;
    if (bits > kMaxEnumerationBits || bits + static_cast<std::uint64_t>(m) > 32) {
        throw WorkGuardError("enumeration of G_m^s exceeds the work guard");
    }
    const Formula formula = formula_for(w);
    if (formula == Formula::General) require_enumerable(s, "Markov count with general weights");

    MarkovResult out;
    out.total = std::uint64_t{1} << bits;
    out.average = average_formula(m, s, w, cube);
    const double threshold_real = std::isinf(c) ? static_cast<double>(out.total)
                                                : std::ldexp(1.0 - 1.0 / c, static_cast<int>(bits));
    out.threshold = static_cast<std::uint64_t>(std::floor(threshold_real));
    const double limit = c * out.average;
    const double slack = std::isinf(limit) ? 0.0 : 1e-12 * limit;

    const auto lf = laurent_table(f);
    const auto table = phi_table(m);
    const std::size_t q = std::size_t{1} << m;
    const std::uint64_t mask = q - 1;
    constexpr std::size_t grain = 16;
    const std::size_t n_chunks = static_cast<std::size_t>((out.total + grain - 1) / grain);
    std::vector<std::uint64_t> counts(n_chunks, 0);
    parallel_for(static_cast<std::size_t>(out.total), grain, [&](std::size_t b, std::size_t e) {
        std::vector<std::vector<std::int8_t>> cols(s);
        std::uint64_t local = 0;
        for (std::size_t idx = b; idx < e; ++idx) {
            for (std::size_t i = 0; i < s; ++i) {
                phi_column(poly_from_index((idx >> (m * i)) & mask), f, lf, table, cols[i]);
            }
            const double value = criterion_core(q, s, w, cube, formula, false,
                                                [&](std::size_t n, std::size_t i) { return static_cast<double>(cols[i][n]); });
            if (value <= limit + slack) ++local;
        }
        counts[b / grain] = local;
    });
    for (auto v : counts) out.count += v;
    return out;
}

}  // namespace wqmc
