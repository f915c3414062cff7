#pragma once

#include "wqmc/digital_net.hpp"
#include "wqmc/dyadic.hpp"
#include "wqmc/gf2.hpp"
#include "wqmc/subset.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wqmc {

/// Modulus f with deg f = m and generating vector g with deg g_i < m.
struct PolyLatticeRule {
    Gf2Poly f;
    std::vector<Gf2Poly> g;

    int m() const noexcept { return f.degree(); }
    std::size_t dim() const noexcept { return g.size(); }
    void validate() const;
    /// "f=0x7 g=0x1,0x2".
    std::string to_string() const;
};

/// Parses "0x1,0x2".
std::vector<Gf2Poly> parse_poly_list(const std::string& text);

/// Points x_h = ({h g_i / f}_m)_i for h = 0..2^m-1 (h read as a polynomial), precision m.
DyadicPointSet plps(const PolyLatticeRule& rule);

/// The same point set as a digital net: column c of C_i holds the digits of {x^c g_i / f}_m.
NetDefinition plps_net(const PolyLatticeRule& rule);

/// sum_{i in u} k_i g_i == 0 (mod f). k[j] belongs to the j-th member of u.
bool dual_contains(std::span<const std::uint64_t> k, const PolyLatticeRule& rule, Subset u);

/// (1/2^m) sum over the lattice points of wal_k, computed from the points (0 or 1).
int character_sum(const PolyLatticeRule& rule, std::span<const std::uint64_t> k, Subset u);

inline constexpr std::uint64_t kDefaultEGuard = std::uint64_t{1} << 24;

/// E(P(g, f), u) from the dual net. Throws WorkGuardError past `guard` candidates.
Dyadic E_dual(const PolyLatticeRule& rule, Subset u, std::uint64_t guard = kDefaultEGuard);

/// E(P, u) for any 2^m-point set with precision >= m, via a Walsh-Hadamard transform
/// of the digit histogram. Throws WorkGuardError when 2^{m|u|} exceeds `guard`.
Dyadic E_walsh(const DyadicPointSet& points, int m, Subset u, std::uint64_t guard = kDefaultEGuard);

}  // namespace wqmc
