#pragma once

#include "wqmc/dyadic.hpp"
#include "wqmc/subset.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace wqmc {

/// Coordinate weights gamma_u, with gamma_{} = 1.
class WeightScheme {
public:
    enum class Kind { Product, Pod, General };

    /// gamma_u = prod_{i in u} gamma_i.
    static WeightScheme product(std::vector<double> gamma);
    /// gamma_u = Gamma_{|u|} prod gamma_i; Gamma holds Gamma_0 = 1, ..., Gamma_s.
    static WeightScheme pod(std::vector<double> Gamma, std::vector<double> gamma);
    /// POD with Gamma_t = (t!)^lambda. Gamma values that overflow a double are kept
    /// in log form only (enough for the weight-condition sums).
    static WeightScheme pod_factorial(double lambda, std::vector<double> gamma);
    /// by_mask[u] for every u in [0, 2^s); entry 0 is ignored and reads as 1.
    static WeightScheme general(std::size_t s, std::vector<double> by_mask);

    Kind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return s_; }

    double gamma(Subset u) const;
    /// Exact value; throws std::overflow_error if it does not fit the dyadic type.
    Dyadic gamma_exact(Subset u) const;

    /// gamma_i (0-based) for Product and POD.
    double coordinate(std::size_t i) const { return gamma_.at(i); }
    const std::vector<double>& coordinates() const noexcept { return gamma_; }
    /// Gamma_l for POD (may be +inf for pod_factorial at large l).
    double order(std::size_t l) const { return Gamma_.at(l); }
    double log_order(std::size_t l) const { return log_Gamma_.at(l); }

    /// Same weights with gamma_u multiplied by c for every nonempty u.
    /// Not available for Product (the class is not closed under it).
    WeightScheme scaled(double c) const;

private:
    Kind kind_ = Kind::Product;
    std::size_t s_ = 0;
    std::vector<double> gamma_;
    std::vector<double> Gamma_;
    std::vector<double> log_Gamma_;
    std::vector<double> by_mask_;
};

/// Box [a, b] with finite a_i < b_i.
struct Cube {
    std::vector<double> a;
    std::vector<double> b;

    static Cube unit(std::size_t s);
    std::size_t dim() const noexcept { return a.size(); }
    double side(std::size_t i) const { return b.at(i) - a.at(i); }
    double side_product(Subset u) const;
    void validate() const;
};

/// sum over nonempty u subset of [s] of gamma_u prod_{i in u}(b_i - a_i) factor(|u|).
/// Product and POD use elementary symmetric sums, General loops over subsets.
double weighted_subset_sum(const WeightScheme& w, const Cube& cube, std::size_t s,
                           const std::function<double(int)>& factor);

/// Exact counterpart with a dyadic factor; throws std::overflow_error when the
/// numerators outgrow 128 bits.
Dyadic weighted_subset_sum_exact(const WeightScheme& w, const Cube& cube, std::size_t s,
                                 const std::function<Dyadic(int)>& factor);

/// Throws std::invalid_argument unless weights and cube cover at least s coordinates.
void check_dims(const WeightScheme& w, const Cube& cube, std::size_t s);

}  // namespace wqmc
