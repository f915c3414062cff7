#pragma once

#include "wqmc/dyadic.hpp"
#include "wqmc/subset.hpp"
#include "wqmc/weights.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace wqmc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Parameters shared by the worst-case error bounds. q is the dual exponent of the
/// norm's p (1/p + 1/q = 1); kInfinity selects the max over subsets.
struct BoundContext {
    int m = 0;
    std::size_t s = 0;
    WeightScheme weights = WeightScheme::product({1.0});
    Cube cube = Cube::unit(1);
    double q = 1.0;
    /// t_u per nonempty subset; required by net_bound and seq_bound.
    std::map<Subset, int> t_map;

    void validate() const;
};

/// (sum_u gamma_u^q prod(b_i - a_i)^q (2^{|u|}/2^m + E(P,u))^q)^{1/q}.
double thm1_bound(const BoundContext& ctx, const std::map<Subset, Dyadic>& E_map);

/// (3/2^m) (sum_u (gamma_u 2^{|u| + t_u} m^{|u|} prod(b_i - a_i))^q)^{1/q}.
double net_bound(const BoundContext& ctx);

/// (1/N) (3 ln(2N)/ln 2) (sum_u (gamma_u 2^{t_u} (3 ln N)^{|u|} prod(b_i - a_i))^q)^{1/q}, N >= 2.
double seq_bound(std::uint64_t n_points, const BoundContext& ctx);

/// 2^{|u| + t + 1} m^{|u|} / 2^m.
double lemma_E_bound(int t_u, int m, int u_size);

/// (1/2^m) sum_u gamma_u (2^{|u|} + (m/2)^{|u|}) prod(b_i - a_i); requires q = 1.
double cbc_bound(const BoundContext& ctx);
/// (1/2^m) sum_u gamma_u (m/2)^{|u|} prod(b_i - a_i); requires q = 1.
double avg_formula(const BoundContext& ctx);

/// Upper bound on 2^{t_u} for Niederreiter nets: prod_{i in u} 4 i ld(i + 2).
/// Coordinates are 1-based.
double tu_bound_nied(const std::vector<std::size_t>& coords);
/// Upper bound on t_u for Sobol' nets: sum_{i in u} (ld i + ld ld(i+1) + ld ld ld(i+3) + c).
double tu_bound_sobol(const std::vector<std::size_t>& coords, double c);

enum class ConditionKind { Niederreiter, Sobol, Poly };

struct ConditionReport {
    /// terms[i-1] = coordinate factor * (b_i - a_i) * max_{v in [i-1]} gamma_{v+i} / gamma_v.
    std::vector<double> terms;
    std::vector<double> partial_sums;
    /// Heuristic: i * term_i does not decrease over the second half of the range.
    bool likely_divergent = false;
};

/// Partial sums of the weight conditions for i = 1..s_max. General weights need
/// s_max <= 20.
ConditionReport weight_condition_sums(ConditionKind kind, const WeightScheme& w, const Cube& cube,
                                      std::size_t s_max);

ConditionKind parse_condition_kind(const std::string& text);

/// ceil(2 (C/eps)^{1/(1-delta)}).
std::uint64_t info_complexity_bound(double C, double delta, double eps);

}  // namespace wqmc
