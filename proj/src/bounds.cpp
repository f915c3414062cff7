#include "wqmc/bounds.hpp"

#include "wqmc/summation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wqmc {

void BoundContext::validate() const {
    if (m < 0) throw std::invalid_argument("m must be nonnegative");
    if (s < 1) throw std::invalid_argument("s must be at least 1");
    require_enumerable(s, "bound evaluation");
    if (!(q >= 1.0)) throw std::invalid_argument("q must be >= 1 or infinity");
    check_dims(weights, cube, s);
    for (const auto& [u, t] : t_map) {
        if (t < 0 || t > m) throw std::invalid_argument("t_u must lie in [0, m]");
    }
}

namespace {

/// l_q aggregation of nonnegative terms; q = infinity gives the max.
class QNorm {
public:
    explicit QNorm(double q) : q_(q) {}
    void add(double term) {
        if (std::isinf(q_)) {
            max_ = std::max(max_, term);
        } else {
            sum_.add(q_ == 1.0 ? term : std::pow(term, q_));
        }
    }
    double value() const {
        if (std::isinf(q_)) return max_;
        return q_ == 1.0 ? sum_.value() : std::pow(sum_.value(), 1.0 / q_);
    }

private:
    double q_;
    double max_ = 0.0;
    CompensatedSum sum_;
};

int t_of(const BoundContext& ctx, Subset u) {
    const auto it = ctx.t_map.find(u);
    if (it == ctx.t_map.end()) throw std::invalid_argument("missing t_u for u = " + subset_label(u));
    return it->second;
}

double ld(double x) { return std::log2(x); }

}  // namespace

double thm1_bound(const BoundContext& ctx, const std::map<Subset, Dyadic>& E_map) {
    ctx.validate();
    QNorm acc(ctx.q);
    for (Subset u = 1; u <= full_subset(ctx.s); ++u) {
        const auto it = E_map.find(u);
        if (it == E_map.end()) throw std::invalid_argument("missing E(P,u) for u = " + subset_label(u));
        const double inner = std::ldexp(1.0, subset_size(u) - ctx.m) + it->second.to_double();
        acc.add(ctx.weights.gamma(u) * ctx.cube.side_product(u) * inner);
    }
    return acc.value();
}

double net_bound(const BoundContext& ctx) {
    ctx.validate();
    QNorm acc(ctx.q);
    for (Subset u = 1; u <= full_subset(ctx.s); ++u) {
        const int k = subset_size(u);
        acc.add(ctx.weights.gamma(u) * std::ldexp(1.0, k + t_of(ctx, u)) * std::pow(ctx.m, k) *
                ctx.cube.side_product(u));
    }
    return std::ldexp(3.0, -ctx.m) * acc.value();
}

double seq_bound(std::uint64_t n_points, const BoundContext& ctx) {
    if (n_points < 2) throw std::invalid_argument("sequence bound needs N >= 2");
    ctx.validate();
    const double n = static_cast<double>(n_points);
    const double three_log_n = 3.0 * std::log(n);
    QNorm acc(ctx.q);
    for (Subset u = 1; u <= full_subset(ctx.s); ++u) {
        acc.add(ctx.weights.gamma(u) * std::ldexp(1.0, t_of(ctx, u)) * std::pow(three_log_n, subset_size(u)) *
                ctx.cube.side_product(u));
    }
    return (1.0 / n) * (3.0 * std::log(2.0 * n) / std::log(2.0)) * acc.value();
}

double lemma_E_bound(int t_u, int m, int u_size) {
    if (m < 0 || t_u < 0 || t_u > m || u_size < 1) throw std::invalid_argument("lemma bound needs 0 <= t <= m, |u| >= 1");
    return std::ldexp(std::pow(static_cast<double>(m), u_size), u_size + t_u + 1 - m);
}

namespace {

void require_q1(const BoundContext& ctx) {
    if (ctx.q != 1.0) throw std::invalid_argument("lattice bounds stated for q = 1");
}

}  // namespace

double cbc_bound(const BoundContext& ctx) {
    require_q1(ctx);
    check_dims(ctx.weights, ctx.cube, ctx.s);
    const double half_m = 0.5 * ctx.m;
    return std::ldexp(weighted_subset_sum(ctx.weights, ctx.cube, ctx.s,
                                          [&](int k) { return std::ldexp(1.0, k) + std::pow(half_m, k); }),
                      -ctx.m);
}

double avg_formula(const BoundContext& ctx) {
    require_q1(ctx);
    check_dims(ctx.weights, ctx.cube, ctx.s);
    const double half_m = 0.5 * ctx.m;
    return std::ldexp(weighted_subset_sum(ctx.weights, ctx.cube, ctx.s, [&](int k) { return std::pow(half_m, k); }),
                      -ctx.m);
}

double tu_bound_nied(const std::vector<std::size_t>& coords) {
    if (coords.empty()) throw std::invalid_argument("t_u bound needs a nonempty subset");
    double p = 1.0;
    for (auto i : coords) {
        if (i < 1) throw std::invalid_argument("coordinates are 1-based");
        const double x = static_cast<double>(i);
        p *= 4.0 * x * ld(x + 2.0);
    }
    return p;
}

double tu_bound_sobol(const std::vector<std::size_t>& coords, double c) {
    if (coords.empty()) throw std::invalid_argument("t_u bound needs a nonempty subset");
    if (!(c > 0.0)) throw std::invalid_argument("Sobol' constant c must be positive");
    double t = 0.0;
    for (auto i : coords) {
        if (i < 1) throw std::invalid_argument("coordinates are 1-based");
        const double x = static_cast<double>(i);
        t += ld(x) + ld(ld(x + 1.0)) + ld(ld(ld(x + 3.0))) + c;
    }
    return t;
}

ConditionKind parse_condition_kind(const std::string& text) {
    if (text == "nied") return ConditionKind::Niederreiter;
    if (text == "sobol") return ConditionKind::Sobol;
    if (text == "poly") return ConditionKind::Poly;
    throw std::invalid_argument("unknown condition kind '" + text + "' (nied, sobol, poly)");
}

ConditionReport weight_condition_sums(ConditionKind kind, const WeightScheme& w, const Cube& cube,
                                      std::size_t s_max) {
    if (s_max < 1) throw std::invalid_argument("s_max must be at least 1");
    check_dims(w, cube, s_max);
    if (w.kind() == WeightScheme::Kind::General) require_enumerable(s_max, "weight condition with general weights");

    ConditionReport rep;
    rep.terms.reserve(s_max);
    double max_log_ratio = -kInfinity;
    CompensatedSum acc;
    for (std::size_t i = 1; i <= s_max; ++i) {
        const double x = static_cast<double>(i);
        double factor = 1.0;
        switch (kind) {
            case ConditionKind::Niederreiter:
                factor = x * ld(x + 2.0);
                break;
            case ConditionKind::Sobol:
                factor = x * ld(x + 1.0) * ld(ld(x + 3.0));
                break;
            case ConditionKind::Poly:
                break;
        }
        double ratio = 0.0;
        switch (w.kind()) {
            case WeightScheme::Kind::Product:
                ratio = w.coordinate(i - 1);
                break;
            case WeightScheme::Kind::Pod:
                // max over |v| = 0..i-1 of Gamma_{|v|+1} / Gamma_{|v|}, kept in logs.
                max_log_ratio = std::max(max_log_ratio, w.log_order(i) - w.log_order(i - 1));
                ratio = w.coordinate(i - 1) * std::exp(max_log_ratio);
                break;
            case WeightScheme::Kind::General: {
                const Subset bit = Subset{1} << (i - 1);
                for (Subset v = 0; v < bit; ++v) ratio = std::max(ratio, w.gamma(v | bit) / w.gamma(v));
                break;
            }
        }
        const double term = factor * cube.side(i - 1) * ratio;
        rep.terms.push_back(term);
        acc.add(term);
        rep.partial_sums.push_back(acc.value());
    }
    if (s_max >= 4) {
        const std::size_t half = s_max / 2;
        const double early = static_cast<double>(half) * rep.terms[half - 1];
        const double late = static_cast<double>(s_max) * rep.terms[s_max - 1];
        rep.likely_divergent = late >= early;
    }
    return rep;
}

std::uint64_t info_complexity_bound(double C, double delta, double eps) {
    if (!(C > 0.0) || !std::isfinite(C)) throw std::invalid_argument("C must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
    const double v = 2.0 * std::pow(C / eps, 1.0 / (1.0 - delta));
    if (!(v < 1.8e19)) throw std::overflow_error("information complexity bound exceeds 64 bits");
    // Values within rounding of an integer are taken to be that integer.
    const double r = std::round(v);
    if (std::fabs(v - r) <= 1e-9 * r) return static_cast<std::uint64_t>(r);
    return static_cast<std::uint64_t>(std::ceil(v));
}

}  // namespace wqmc
