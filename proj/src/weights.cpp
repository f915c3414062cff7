#include "wqmc/weights.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wqmc {

namespace {

void require_positive(const std::vector<double>& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
            throw std::invalid_argument(std::string(what) + " entry " + std::to_string(i + 1) +
                                        " must be positive and finite");
        }
    }
}

}  // namespace

WeightScheme WeightScheme::product(std::vector<double> gamma) {
    if (gamma.empty()) throw std::invalid_argument("product weights need at least one gamma");
    require_positive(gamma, "gamma");
    WeightScheme w;
    w.kind_ = Kind::Product;
    w.s_ = gamma.size();
    w.gamma_ = std::move(gamma);
    return w;
}

WeightScheme WeightScheme::pod(std::vector<double> Gamma, std::vector<double> gamma) {
    if (gamma.empty()) throw std::invalid_argument("POD weights need at least one gamma");
    if (Gamma.size() != gamma.size() + 1) {
        throw std::invalid_argument("POD weights need Gamma_0..Gamma_s (" + std::to_string(gamma.size() + 1) +
                                    " values)");
    }
    require_positive(Gamma, "Gamma");
    require_positive(gamma, "gamma");
    if (Gamma[0] != 1.0) throw std::invalid_argument("POD weights require Gamma_0 = 1");
    WeightScheme w;
    w.kind_ = Kind::Pod;
    w.s_ = gamma.size();
    w.gamma_ = std::move(gamma);
    w.log_Gamma_.reserve(Gamma.size());
    for (double g : Gamma) w.log_Gamma_.push_back(std::log(g));
    w.Gamma_ = std::move(Gamma);
    return w;
}

WeightScheme WeightScheme::pod_factorial(double lambda, std::vector<double> gamma) {
    if (gamma.empty()) throw std::invalid_argument("POD weights need at least one gamma");
    if (!std::isfinite(lambda) || lambda < 0.0) throw std::invalid_argument("factorial exponent must be >= 0");
    require_positive(gamma, "gamma");
    WeightScheme w;
    w.kind_ = Kind::Pod;
    w.s_ = gamma.size();
    w.gamma_ = std::move(gamma);
    for (std::size_t t = 0; t <= w.s_; ++t) {
        const double lg = lambda * std::lgamma(static_cast<double>(t) + 1.0);
        w.log_Gamma_.push_back(lg);
        w.Gamma_.push_back(std::exp(lg));
    }
    w.Gamma_[0] = 1.0;
    // Small factorials are integers; keep them exact for lambda = 1.
    if (lambda == 1.0) {
        double f = 1.0;
        for (std::size_t t = 1; t <= w.s_ && t <= 170; ++t) {
            f *= static_cast<double>(t);
            w.Gamma_[t] = f;
        }
    }
    return w;
}

WeightScheme WeightScheme::general(std::size_t s, std::vector<double> by_mask) {
    if (s == 0) throw std::invalid_argument("general weights need s >= 1");
    require_enumerable(s, "general weights");
    if (by_mask.size() != (std::size_t{1} << s)) throw std::invalid_argument("general weights table has wrong size");
    by_mask[0] = 1.0;
    for (std::size_t u = 1; u < by_mask.size(); ++u) {
        if (!(by_mask[u] > 0.0) || !std::isfinite(by_mask[u])) {
            throw std::invalid_argument("general weight for " + subset_label(static_cast<Subset>(u)) +
                                        " missing or not positive");
        }
    }
    WeightScheme w;
    w.kind_ = Kind::General;
    w.s_ = s;
    w.by_mask_ = std::move(by_mask);
    return w;
}

double WeightScheme::gamma(Subset u) const {
    if (u == 0) return 1.0;
    if (s_ < 32 && (u >> s_) != 0) throw std::out_of_range("subset exceeds the weight dimension");
    switch (kind_) {
        case Kind::Product: {
            double g = 1.0;
            for (auto i : subset_members(u)) g *= gamma_[i];
            return g;
        }
        case Kind::Pod: {
            double g = Gamma_[static_cast<std::size_t>(subset_size(u))];
            for (auto i : subset_members(u)) g *= gamma_[i];
            return g;
        }
        case Kind::General:
            return by_mask_[u];
    }
    return 0.0;
}

Dyadic WeightScheme::gamma_exact(Subset u) const {
    if (u == 0) return Dyadic::from_int(1);
    if (s_ < 32 && (u >> s_) != 0) throw std::out_of_range("subset exceeds the weight dimension");
    if (kind_ == Kind::General) return Dyadic::from_double(by_mask_[u]);
    Dyadic g = kind_ == Kind::Pod ? Dyadic::from_double(Gamma_[static_cast<std::size_t>(subset_size(u))])
                                  : Dyadic::from_int(1);
    for (auto i : subset_members(u)) g = g * Dyadic::from_double(gamma_[i]);
    return g;
}

WeightScheme WeightScheme::scaled(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("scale must be positive");
    WeightScheme w = *this;
    switch (kind_) {
        case Kind::Product:
            throw std::invalid_argument("product weights are not closed under global scaling");
        case Kind::Pod:
            for (std::size_t l = 1; l < w.Gamma_.size(); ++l) {
                w.Gamma_[l] *= c;
                w.log_Gamma_[l] += std::log(c);
            }
            break;
        case Kind::General:
            for (std::size_t u = 1; u < w.by_mask_.size(); ++u) w.by_mask_[u] *= c;
            break;
    }
    return w;
}

Cube Cube::unit(std::size_t s) { return Cube{std::vector<double>(s, 0.0), std::vector<double>(s, 1.0)}; }

double Cube::side_product(Subset u) const {
    double p = 1.0;
    for (auto i : subset_members(u)) p *= side(i);
    return p;
}

void Cube::validate() const {
    if (a.size() != b.size()) throw std::invalid_argument("cube bounds have different lengths");
    if (a.empty()) throw std::invalid_argument("cube is empty");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i]) || !(a[i] < b[i])) {
            throw std::invalid_argument("cube coordinate " + std::to_string(i + 1) + " needs finite a < b");
        }
    }
}

void check_dims(const WeightScheme& w, const Cube& cube, std::size_t s) {
    cube.validate();
    if (w.dim() < s) {
        throw std::invalid_argument("weights cover " + std::to_string(w.dim()) + " coordinates, need " +
                                    std::to_string(s));
    }
    if (cube.dim() < s) {
        throw std::invalid_argument("cube covers " + std::to_string(cube.dim()) + " coordinates, need " +
                                    std::to_string(s));
    }
}

namespace {

/// e[l] = elementary symmetric polynomial of degree l in x_0..x_{s-1}.
template <class T>
std::vector<T> elementary_symmetric(const std::vector<T>& x) {
    std::vector<T> e(x.size() + 1, T{});
    e[0] = T(1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t l = i + 1; l >= 1; --l) e[l] = e[l] + x[i] * e[l - 1];
    }
    return e;
}

}  // namespace

double weighted_subset_sum(const WeightScheme& w, const Cube& cube, std::size_t s,
                           const std::function<double(int)>& factor) {
    check_dims(w, cube, s);
    if (w.kind() == WeightScheme::Kind::General) {
        require_enumerable(s, "subset sum");
        double total = 0.0;
        double comp = 0.0;
        for (Subset u = 1; u <= full_subset(s); ++u) {
            const double term = w.gamma(u) * cube.side_product(u) * factor(subset_size(u));
            // Neumaier step.
            const double t = total + term;
            comp += std::fabs(total) >= std::fabs(term) ? (total - t) + term : (term - t) + total;
            total = t;
        }
        return total + comp;
    }
    std::vector<double> x(s);
    for (std::size_t i = 0; i < s; ++i) x[i] = w.coordinate(i) * cube.side(i);
    const auto e = elementary_symmetric(x);
    double total = 0.0;
    for (std::size_t l = 1; l <= s; ++l) {
        const double order = w.kind() == WeightScheme::Kind::Pod ? w.order(l) : 1.0;
        total += order * e[l] * factor(static_cast<int>(l));
    }
    return total;
}

Dyadic weighted_subset_sum_exact(const WeightScheme& w, const Cube& cube, std::size_t s,
                                 const std::function<Dyadic(int)>& factor) {
    check_dims(w, cube, s);
    require_enumerable(s, "exact subset sum");
    Dyadic total;
    for (Subset u = 1; u <= full_subset(s); ++u) {
        Dyadic term = w.gamma_exact(u) * factor(subset_size(u));
        for (auto i : subset_members(u)) term = term * Dyadic::from_double(cube.side(i));
        total += term;
    }
    return total;
}

}  // namespace wqmc
