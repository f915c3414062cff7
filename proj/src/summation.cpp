#include "wqmc/summation.hpp"

#include "wqmc/parallel.hpp"

#include <algorithm>
#include <vector>

namespace wqmc {

double deterministic_sum(std::size_t n, const std::function<double(std::size_t)>& term, bool parallel) {
    constexpr std::size_t block = 4096;
    const std::size_t n_blocks = (n + block - 1) / block;
    std::vector<CompensatedSum> partial(n_blocks);
    auto run = [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            const std::size_t end = std::min(n, (b + 1) * block);
            for (std::size_t i = b * block; i < end; ++i) partial[b].add(term(i));
        }
    };
    if (parallel) {
        parallel_for(n_blocks, 1, run);
    } else {
        run(0, n_blocks);
    }
    CompensatedSum total;
    for (const auto& p : partial) total.add(p);
    return total.value();
}

}  // namespace wqmc
