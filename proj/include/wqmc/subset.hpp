#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace wqmc {

/// Coordinate subset as a bit mask: bit i set <=> coordinate i (0-based) is in u.
using Subset = std::uint32_t;

/// Largest dimension for which all 2^s subsets are enumerated.
inline constexpr std::size_t kMaxSubsetDim = 20;

inline int subset_size(Subset u) noexcept { return std::popcount(u); }

inline Subset full_subset(std::size_t s) noexcept {
    return s >= 32 ? ~Subset{0} : (Subset{1} << s) - 1;
}

/// Ascending 0-based member list.
std::vector<std::size_t> subset_members(Subset u);

/// Builds a mask from 1-based coordinates; throws on 0, duplicates or i > s.
Subset subset_from_one_based(const std::vector<int>& coords, std::size_t s);

/// "{1,3}" with 1-based coordinates.
std::string subset_label(Subset u);

/// Throws std::invalid_argument when 2^s subsets would exceed the enumeration limit.
void require_enumerable(std::size_t s, const char* what);

}  // namespace wqmc
