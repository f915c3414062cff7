#include "wqmc/subset.hpp"

#include <stdexcept>

namespace wqmc {

std::vector<std::size_t> subset_members(Subset u) {
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(std::popcount(u)));
    for (; u != 0; u &= u - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(u)));
    return out;
}

Subset subset_from_one_based(const std::vector<int>& coords, std::size_t s) {
    Subset u = 0;
    for (int c : coords) {
        if (c < 1 || static_cast<std::size_t>(c) > s || c > 32) {
            throw std::invalid_argument("coordinate " + std::to_string(c) + " out of range 1.." +
                                        std::to_string(s));
        }
        const Subset bit = Subset{1} << (c - 1);
        if (u & bit) throw std::invalid_argument("duplicate coordinate " + std::to_string(c));
        u |= bit;
    }
    return u;
}

std::string subset_label(Subset u) {
    std::string out = "{";
    bool first = true;
    for (std::size_t i : subset_members(u)) {
        if (!first) out += ",";
        out += std::to_string(i + 1);
        first = false;
    }
    return out + "}";
}

void require_enumerable(std::size_t s, const char* what) {
    if (s > kMaxSubsetDim) {
        throw std::invalid_argument(std::string(what) + ": subset enumeration limited to s <= " +
                                    std::to_string(kMaxSubsetDim) +
                                    "; use product or POD weights");
    }
}

}  // namespace wqmc
