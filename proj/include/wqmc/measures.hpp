#pragma once

#include "wqmc/dyadic.hpp"
#include "wqmc/subset.hpp"
#include "wqmc/walsh_haar.hpp"
#include "wqmc/weights.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wqmc {

/// Probability measure on [a, b] given by a strictly increasing CDF and its inverse.
class CoordinateMeasure {
public:
    enum class Kind { Uniform, Linear, TruncExp, Numeric };

    static CoordinateMeasure uniform(double a, double b);
    /// Density 2x on [0, 1].
    static CoordinateMeasure linear();
    /// Density proportional to exp(-rate x) on [a, b].
    static CoordinateMeasure trunc_exp(double rate, double a, double b);
    /// Any strictly increasing CDF with cdf(a) = 0, cdf(b) = 1; inverted by bisection.
    static CoordinateMeasure numeric(double a, double b, std::function<double(double)> cdf,
                                     std::string label = "numeric");
    /// Piecewise-linear CDF through (x_k, c_k); both columns strictly increasing,
    /// c from 0 to 1.
    static CoordinateMeasure table(std::vector<double> x, std::vector<double> c);
    /// Two whitespace-separated columns "x cdf" per line; '#' comments.
    static CoordinateMeasure load_table(const std::filesystem::path& path);

    Kind kind() const noexcept { return kind_; }
    const std::string& label() const noexcept { return label_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    double cdf(double x) const;
    /// Result clamped to [a, b].
    double inv_cdf(double y) const;

    /// E[g(X)] = integral over (0, 1) of g(inv_cdf(y)) dy, by tanh-sinh quadrature.
    double expectation(const std::function<double(double)>& g) const;

private:
    void validate() const;

    Kind kind_ = Kind::Uniform;
    std::string label_;
    double a_ = 0.0;
    double b_ = 1.0;
    double rate_ = 0.0;
    std::function<double(double)> numeric_cdf_;
};

/// Bisection for cdf(x) = y on [a, b]: tolerance 2^-52 (b - a), at most 80 steps.
double bisect_inverse(const std::function<double(double)>& cdf, double a, double b, double y);

/// N x s real matrix, row-major.
struct Nodes {
    std::size_t n = 0;
    std::size_t s = 0;
    std::vector<double> data;

    std::span<const double> row(std::size_t i) const { return {data.data() + i * s, s}; }
};

/// Applies inv_cdf coordinate-wise to the double value of every point.
Nodes map_points(const DyadicPointSet& points, const std::vector<CoordinateMeasure>& measures);

/// F on the cube, with optional suprema of mixed first derivatives.
struct Integrand {
    std::string name;
    std::size_t dim = 0;
    std::function<double(std::span<const double>)> eval;
    /// sup over the cube of |d^{|u|} F / dx_u|; u = 0 gives sup |F|. Empty when unknown.
    std::function<double(Subset)> derivative_sup;
    /// Integral against the product measure, when available in closed form up to
    /// one-dimensional moments.
    std::function<double(const std::vector<CoordinateMeasure>&)> reference;
};

/// Names accepted by builtin_integrand.
std::vector<std::string> builtin_integrand_names();

/// "constant" (F = value), "linear" (sum x_i), "product" (prod x_i),
/// "smooth-exp" (exp(sum x_i)). Derivative suprema are taken over `cube`.
Integrand builtin_integrand(const std::string& name, const Cube& cube, double value = 1.0);

/// (1/N) sum_n F(node_n) with compensated, thread-count independent summation.
double qmc_estimate(const Integrand& f, const Nodes& nodes);

/// estimate - reference.
double integration_error(const Integrand& f, const std::vector<CoordinateMeasure>& measures,
                         const DyadicPointSet& points, double reference);

/// ||F||_{p,s,gamma} from the derivative suprema; p = infinity gives the max.
double weighted_norm(const Integrand& f, const WeightScheme& w, double p);

/// (inv_cdf((m+1)/2^j) - inv_cdf(m/2^j)) / 2.
double lambda_jm(const CoordinateMeasure& measure, int j, std::uint64_t m);

/// h_{j,m}(cdf(x)), decided by comparing x with inv_cdf of the interval endpoints so
/// that the value at x = inv_cdf(y) equals h_{j,m}(y) for dyadic y.
double haar_phi(const CoordinateMeasure& measure, HaarIndex idx, double x);

inline constexpr std::uint64_t kDefaultQuadGuard = std::uint64_t{1} << 26;

/// Haar coefficient of F for levels j_u and shifts m_u on the coordinates of u
/// (other coordinates carry (-1, 0)), by the midpoint rule on the 2^-quad_level grid
/// in the unit cube after substituting x = inv_cdf(y).
double haar_coeff(const Integrand& f, const std::vector<CoordinateMeasure>& measures,
                  std::span<const int> j_u, std::span<const std::uint64_t> m_u, Subset u, int quad_level,
                  std::uint64_t guard = kDefaultQuadGuard);

/// 2^{-|j_u|/2} prod lambda_{j_i,m_i} sup |d^{|u|} F / dx_u|.
double lemma1_bound(const Integrand& f, const std::vector<CoordinateMeasure>& measures,
                    std::span<const int> j_u, std::span<const std::uint64_t> m_u, Subset u);

}  // namespace wqmc
