#include "wqmc/measures.hpp"

#include "wqmc/errors.hpp"
#include "wqmc/summation.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wqmc {

namespace {

void check_interval(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        throw std::invalid_argument("measure needs finite a < b");
    }
}

}  // namespace

double bisect_inverse(const std::function<double(double)>& cdf, double a, double b, double y) {
    if (y <= 0.0) return a;
    if (y >= 1.0) return b;
    const double tol = std::ldexp(b - a, -52);
    double lo = a;
    double hi = b;
    for (int it = 0; it < 80 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < y) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

CoordinateMeasure CoordinateMeasure::uniform(double a, double b) {
    check_interval(a, b);
    CoordinateMeasure mu;
    mu.kind_ = Kind::Uniform;
    mu.label_ = "uniform";
    mu.a_ = a;
    mu.b_ = b;
    mu.validate();
    return mu;
}

CoordinateMeasure CoordinateMeasure::linear() {
    CoordinateMeasure mu;
    mu.kind_ = Kind::Linear;
    mu.label_ = "linear";
    mu.validate();
    return mu;
}

CoordinateMeasure CoordinateMeasure::trunc_exp(double rate, double a, double b) {
    check_interval(a, b);
    if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("trunc_exp needs rate > 0");
    CoordinateMeasure mu;
    mu.kind_ = Kind::TruncExp;
    mu.label_ = "trunc_exp";
    mu.a_ = a;
    mu.b_ = b;
    mu.rate_ = rate;
    mu.validate();
    return mu;
}

CoordinateMeasure CoordinateMeasure::numeric(double a, double b, std::function<double(double)> cdf,
                                             std::string label) {
    check_interval(a, b);
    if (!cdf) throw std::invalid_argument("numeric measure needs a CDF");
    CoordinateMeasure mu;
    mu.kind_ = Kind::Numeric;
    mu.label_ = std::move(label);
    mu.a_ = a;
    mu.b_ = b;
    mu.numeric_cdf_ = std::move(cdf);
    mu.validate();
    return mu;
}

CoordinateMeasure CoordinateMeasure::table(std::vector<double> x, std::vector<double> c) {
    if (x.size() != c.size() || x.size() < 2) throw std::invalid_argument("CDF table needs at least two rows");
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!std::isfinite(x[k]) || !std::isfinite(c[k])) throw std::invalid_argument("CDF table has non-finite entries");
        if (k > 0 && !(x[k] > x[k - 1])) throw std::invalid_argument("CDF table x column must be strictly increasing");
        if (k > 0 && !(c[k] > c[k - 1])) {
            throw NumericValidationError("CDF table is not strictly increasing at row " + std::to_string(k + 1));
        }
    }
    if (c.front() != 0.0 || c.back() != 1.0) throw NumericValidationError("CDF table must run from 0 to 1");
    auto cdf = [x, c](double t) {
        if (t <= x.front()) return 0.0;
        if (t >= x.back()) return 1.0;
        const auto it = std::upper_bound(x.begin(), x.end(), t);
        const auto k = static_cast<std::size_t>(it - x.begin());
        const double w = (t - x[k - 1]) / (x[k] - x[k - 1]);
        return c[k - 1] + w * (c[k] - c[k - 1]);
    };
    const double a = x.front();
    const double b = x.back();
    return numeric(a, b, cdf, "table");
}

CoordinateMeasure CoordinateMeasure::load_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    std::vector<double> xs, cs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double x = 0, c = 0;
        if (!(ls >> x)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ParseError(line_no, "expected 'x cdf'");
        }
        if (!(ls >> c)) throw ParseError(line_no, "expected 'x cdf'");
        std::string extra;
        if (ls >> extra) throw ParseError(line_no, "trailing field '" + extra + "'");
        xs.push_back(x);
        cs.push_back(c);
    }
    return table(std::move(xs), std::move(cs));
}

double CoordinateMeasure::cdf(double x) const {
    if (x <= a_) return 0.0;
    if (x >= b_) return 1.0;
    switch (kind_) {
        case Kind::Uniform:
            return (x - a_) / (b_ - a_);
        case Kind::Linear:
            return x * x;
        case Kind::TruncExp:
            return std::expm1(-rate_ * (x - a_)) / std::expm1(-rate_ * (b_ - a_));
        case Kind::Numeric:
            return numeric_cdf_(x);
    }
    return 0.0;
}

double CoordinateMeasure::inv_cdf(double y) const {
    if (!(y >= 0.0)) y = 0.0;
    if (y > 1.0) y = 1.0;
    double x = 0.0;
    switch (kind_) {
        case Kind::Uniform:
            x = a_ + y * (b_ - a_);
            break;
        case Kind::Linear:
            x = std::sqrt(y);
            break;
        case Kind::TruncExp:
            x = a_ - std::log1p(y * std::expm1(-rate_ * (b_ - a_))) / rate_;
            break;
        case Kind::Numeric:
            x = bisect_inverse(numeric_cdf_, a_, b_, y);
            break;
    }
    return std::clamp(x, a_, b_);
}

void CoordinateMeasure::validate() const {
    if (kind_ == Kind::Numeric) {
        const double ca = numeric_cdf_(a_);
        const double cb = numeric_cdf_(b_);
        if (std::fabs(ca) > 1e-12 || std::fabs(cb - 1.0) > 1e-12) {
            throw NumericValidationError("CDF must satisfy cdf(a) = 0 and cdf(b) = 1");
        }
    }
    constexpr int grid = 1000;
    double prev = -1.0;
    for (int k = 0; k <= grid; ++k) {
        const double x = a_ + (b_ - a_) * k / grid;
        const double c = cdf(x);
        if (!(c > prev) && k > 0) {
            throw NumericValidationError(label_ + ": CDF not strictly increasing near x = " + std::to_string(x));
        }
        prev = c;
        const double back = inv_cdf(c);
        if (std::fabs(back - x) > 1e-10) {
            throw NumericValidationError(label_ + ": inverse CDF round trip fails at x = " + std::to_string(x));
        }
    }
}

double CoordinateMeasure::expectation(const std::function<double(double)>& g) const {
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate([&](double y) { return g(inv_cdf(y)); }, 0.0, 1.0);
}

Nodes map_points(const DyadicPointSet& points, const std::vector<CoordinateMeasure>& measures) {
    if (measures.size() != points.dim()) {
        throw std::invalid_argument("point dimension " + std::to_string(points.dim()) + " does not match " +
                                    std::to_string(measures.size()) + " measures");
    }
    Nodes out{points.size(), points.dim(), std::vector<double>(points.size() * points.dim())};
    for (std::size_t n = 0; n < points.size(); ++n) {
        for (std::size_t i = 0; i < points.dim(); ++i) {
            out.data[n * out.s + i] = measures[i].inv_cdf(points.value(n, i));
        }
    }
    return out;
}

std::vector<std::string> builtin_integrand_names() { return {"constant", "linear", "product", "smooth-exp"}; }

Integrand builtin_integrand(const std::string& name, const Cube& cube, double value) {
    cube.validate();
    const std::size_t s = cube.dim();
    std::vector<double> absmax(s);
    for (std::size_t i = 0; i < s; ++i) absmax[i] = std::max(std::fabs(cube.a[i]), std::fabs(cube.b[i]));
    Integrand f;
    f.name = name;
    f.dim = s;
    if (name == "constant") {
        f.eval = [value](std::span<const double>) { return value; };
        f.derivative_sup = [value](Subset u) { return u == 0 ? std::fabs(value) : 0.0; };
        f.reference = [value](const std::vector<CoordinateMeasure>&) { return value; };
    } else if (name == "linear") {
        f.eval = [](std::span<const double> x) {
            CompensatedSum acc;
            for (double xi : x) acc.add(xi);
            return acc.value();
        };
        double lo = 0.0, hi = 0.0;
        for (std::size_t i = 0; i < s; ++i) {
            lo += cube.a[i];
            hi += cube.b[i];
        }
        const double sup0 = std::max(std::fabs(lo), std::fabs(hi));
        f.derivative_sup = [sup0](Subset u) { return u == 0 ? sup0 : (subset_size(u) == 1 ? 1.0 : 0.0); };
        f.reference = [](const std::vector<CoordinateMeasure>& ms) {
            CompensatedSum acc;
            for (const auto& mu : ms) acc.add(mu.expectation([](double x) { return x; }));
            return acc.value();
        };
    } else if (name == "product") {
        f.eval = [](std::span<const double> x) {
            double p = 1.0;
            for (double xi : x) p *= xi;
            return p;
        };
        f.derivative_sup = [absmax, s](Subset u) {
            double p = 1.0;
            for (std::size_t i = 0; i < s; ++i) {
                if (!((u >> i) & 1U)) p *= absmax[i];
            }
            return p;
        };
        f.reference = [](const std::vector<CoordinateMeasure>& ms) {
            double p = 1.0;
            for (const auto& mu : ms) p *= mu.expectation([](double x) { return x; });
            return p;
        };
    } else if (name == "smooth-exp") {
        f.eval = [](std::span<const double> x) {
            CompensatedSum acc;
            for (double xi : x) acc.add(xi);
            return std::exp(acc.value());
        };
        double top = 0.0;
        for (std::size_t i = 0; i < s; ++i) top += cube.b[i];
        const double sup = std::exp(top);
        f.derivative_sup = [sup](Subset) { return sup; };
        f.reference = [](const std::vector<CoordinateMeasure>& ms) {
            double p = 1.0;
            for (const auto& mu : ms) p *= mu.expectation([](double x) { return std::exp(x); });
            return p;
        };
    } else {
        throw std::invalid_argument("unknown integrand '" + name + "' (constant, linear, product, smooth-exp)");
    }
    return f;
}

double qmc_estimate(const Integrand& f, const Nodes& nodes) {
    if (nodes.n == 0) throw std::invalid_argument("no nodes");
    if (f.dim != 0 && f.dim != nodes.s) throw std::invalid_argument("integrand dimension does not match the nodes");
    return deterministic_sum(nodes.n, [&](std::size_t n) { return f.eval(nodes.row(n)); }) /
           static_cast<double>(nodes.n);
}

double integration_error(const Integrand& f, const std::vector<CoordinateMeasure>& measures,
                         const DyadicPointSet& points, double reference) {
    return qmc_estimate(f, map_points(points, measures)) - reference;
}

double weighted_norm(const Integrand& f, const WeightScheme& w, double p) {
    if (!f.derivative_sup) throw std::invalid_argument("norm needs derivative suprema");
    if (!(p >= 1.0)) throw std::invalid_argument("norm exponent p must be >= 1");
    const std::size_t s = f.dim;
    require_enumerable(s, "weighted norm");
    if (w.dim() < s) throw std::invalid_argument("weights do not cover the integrand dimension");
    double max_term = 0.0;
    CompensatedSum acc;
    for (Subset u = 0; u <= full_subset(s); ++u) {
        const double sup = f.derivative_sup(u);
        if (sup < 0.0) throw std::invalid_argument("derivative suprema must be nonnegative");
        const double term = sup / w.gamma(u);
        max_term = std::max(max_term, term);
        if (!std::isinf(p)) acc.add(std::pow(term, p));
    }
    return std::isinf(p) ? max_term : std::pow(acc.value(), 1.0 / p);
}

double lambda_jm(const CoordinateMeasure& measure, int j, std::uint64_t m) {
    if (j < 0 || j > 62) throw std::invalid_argument("level j out of range");
    if (m >= (std::uint64_t{1} << j)) throw std::invalid_argument("shift m out of range for level j");
    const double lo = std::ldexp(static_cast<double>(m), -j);
    const double hi = std::ldexp(static_cast<double>(m + 1), -j);
    return 0.5 * (measure.inv_cdf(hi) - measure.inv_cdf(lo));
}

double haar_phi(const CoordinateMeasure& measure, HaarIndex idx, double x) {
    if (idx.j == -1) return haar(idx, 0.0);
    haar_sign(idx, 0.0);  // range check
    const double lo = measure.inv_cdf(std::ldexp(static_cast<double>(idx.m), -idx.j));
    const double mid = measure.inv_cdf(std::ldexp(2.0 * static_cast<double>(idx.m) + 1.0, -idx.j - 1));
    const double hi = measure.inv_cdf(std::ldexp(static_cast<double>(idx.m + 1), -idx.j));
    const double scale = haar_scale(idx.j);
    // The last interval is closed at b since inv_cdf(1) = b.
    const bool last = idx.m + 1 == (std::uint64_t{1} << idx.j);
    if (x < lo || x > hi || (x == hi && !last)) return 0.0;
    if (x == hi) return -scale;
    return x < mid ? scale : -scale;
}

namespace {

void check_haar_args(const std::vector<CoordinateMeasure>& measures, std::span<const int> j_u,
                     std::span<const std::uint64_t> m_u, Subset u) {
    const auto members = subset_members(u);
    if (members.size() != j_u.size() || members.size() != m_u.size()) {
        throw std::invalid_argument("j_u and m_u need one entry per member of u");
    }
    for (std::size_t t = 0; t < members.size(); ++t) {
        if (members[t] >= measures.size()) throw std::out_of_range("subset coordinate out of range");
        if (j_u[t] < 0 || j_u[t] > 40) throw std::invalid_argument("level j out of range");
        if (m_u[t] >= (std::uint64_t{1} << j_u[t])) throw std::invalid_argument("shift m out of range for level j");
    }
}

}  // namespace

double haar_coeff(const Integrand& f, const std::vector<CoordinateMeasure>& measures, std::span<const int> j_u,
                  std::span<const std::uint64_t> m_u, Subset u, int quad_level, std::uint64_t guard) {
    check_haar_args(measures, j_u, m_u, u);
    const std::size_t s = measures.size();
    if (f.dim != 0 && f.dim != s) throw std::invalid_argument("integrand dimension does not match the measures");
    int max_j = 0;
    for (int j : j_u) max_j = std::max(max_j, j);
    if (quad_level < max_j + 4) throw std::invalid_argument("quad_level must be at least max j + 4");
    if (quad_level > 30) throw std::invalid_argument("quad_level must be at most 30");

    // Per coordinate: mapped midpoints and the Haar factor of each active cell.
    const auto members = subset_members(u);
    std::vector<std::vector<double>> nodes(s), factor(s);
    double total_cells = 1.0;
    for (std::size_t i = 0; i < s; ++i) {
        std::uint64_t first = 0;
        std::uint64_t count = std::uint64_t{1} << quad_level;
        double scale = 1.0;
        int j = -1;
        std::uint64_t mm = 0;
        for (std::size_t t = 0; t < members.size(); ++t) {
            if (members[t] == i) {
                j = j_u[t];
                mm = m_u[t];
            }
        }
        if (j >= 0) {
            count = std::uint64_t{1} << (quad_level - j);
            first = mm * count;
            scale = haar_scale(j);
        }
        total_cells *= static_cast<double>(count);
        if (total_cells > static_cast<double>(guard)) {
            throw WorkGuardError("Haar quadrature grid exceeds the work guard");
        }
        for (std::uint64_t c = 0; c < count; ++c) {
            const double y = std::ldexp(static_cast<double>(first + c) + 0.5, -quad_level);
            nodes[i].push_back(measures[i].inv_cdf(y));
            factor[i].push_back(j < 0 ? 1.0 : (2 * c < count ? scale : -scale));
        }
    }
    const auto n_cells = static_cast<std::size_t>(total_cells);
    std::vector<std::size_t> sizes(s);
    for (std::size_t i = 0; i < s; ++i) sizes[i] = nodes[i].size();
    const double sum = deterministic_sum(n_cells, [&](std::size_t flat) {
        thread_local std::vector<double> x;
        x.resize(s);
        double h = 1.0;
        for (std::size_t i = 0; i < s; ++i) {
            const std::size_t c = flat % sizes[i];
            flat /= sizes[i];
            x[i] = nodes[i][c];
            h *= factor[i][c];
        }
        return f.eval(x) * h;
    });
    return std::ldexp(sum, -quad_level * static_cast<int>(s));
}

double lemma1_bound(const Integrand& f, const std::vector<CoordinateMeasure>& measures, std::span<const int> j_u,
                    std::span<const std::uint64_t> m_u, Subset u) {
    check_haar_args(measures, j_u, m_u, u);
    if (!f.derivative_sup) throw std::invalid_argument("Haar coefficient bound needs derivative suprema");
    const auto members = subset_members(u);
    int j_total = 0;
    double prod = 1.0;
    for (std::size_t t = 0; t < members.size(); ++t) {
        j_total += j_u[t];
        prod *= lambda_jm(measures[members[t]], j_u[t], m_u[t]);
    }
    const double sup = f.derivative_sup(u);
    if (sup < 0.0) throw std::invalid_argument("derivative suprema must be nonnegative");
    return prod * sup / std::sqrt(std::ldexp(1.0, j_total));
}

}  // namespace wqmc
