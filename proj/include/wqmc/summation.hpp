#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace wqmc {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    void add(const CompensatedSum& o) noexcept {
        add(o.sum_);
        add(o.comp_);
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Sum of term(i) for i in [0, n). Terms are grouped into fixed blocks of 4096,
/// each block summed with compensation, and the block partials combined in index
/// order, so the result is independent of the thread count. With parallel = false
/// the blocks run on the calling thread and the result is bit-identical.
double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term,
                         bool parallel = true);

}  // namespace wqmc
