#pragma once

#include "wqmc/dyadic.hpp"
#include "wqmc/gf2.hpp"
#include "wqmc/subset.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace wqmc {

/// Generating matrices C_1..C_s (square, m x m for nets, P x P for sequences) and an
/// optional digital shift given as one `precision`-digit numerator per coordinate.
struct NetDefinition {
    int m = 0;
    std::vector<BitMatrix> matrices;
    std::optional<std::vector<std::uint64_t>> shift;
    /// Output precision; 0 means m.
    int precision = 0;

    std::size_t dim() const noexcept { return matrices.size(); }
    int output_precision() const noexcept { return precision == 0 ? m : precision; }
    /// Throws std::invalid_argument on shape errors.
    void validate() const;
};

/// 2^m points: y = C_i * digits(n), XOR shift.
DyadicPointSet generate_net(const NetDefinition& def);

/// Direction-number table in the "d s a m_i" row format.
struct SobolDirections {
    struct Entry {
        int degree = 0;
        std::uint32_t a = 0;
        std::vector<std::uint64_t> m_init;
    };
    /// entries[0] describes dimension 2.
    std::vector<Entry> entries;

    std::size_t max_dim() const noexcept { return entries.size() + 1; }

    static SobolDirections parse(std::istream& in);
    static SobolDirections load(const std::filesystem::path& path);
    /// The bundled table (dimensions up to 1024).
    static const SobolDirections& bundled();
};

/// Upper-left m x m generating matrices of the first s Sobol' dimensions; dimension 1
/// is the identity. 1 <= m <= 64.
std::vector<BitMatrix> sobol_matrices(std::size_t s, int m,
                                      const SobolDirections& dirs = SobolDirections::bundled());

/// Matrix file: "m s" header, then s blocks of m rows of m bits; '#' starts a comment.
NetDefinition parse_matrices(std::istream& in);
NetDefinition load_matrices(const std::filesystem::path& path);
void write_matrices(std::ostream& out, const NetDefinition& def);
void save_matrices(const std::filesystem::path& path, const NetDefinition& def);

inline constexpr std::uint64_t kDefaultTGuard = 1'000'000;

/// Minimal t_u: the first d_i rows of C_i (i in u) are independent for every
/// composition sum d_i = m - t. Throws WorkGuardError when a level needs more than
/// `guard` compositions.
int exact_t(const NetDefinition& def, Subset u, std::uint64_t guard = kDefaultTGuard);

/// Every coordinate's leading-m-digit prefixes form a permutation of 0..2^m-1.
bool is_projection_regular(const DyadicPointSet& points, int m);

/// Entry k-1 is the exact t of the net generated by the upper-left k x k submatrices,
/// k = 1..m_max. The sequence definition asks for every k; this stops at m_max.
std::vector<int> sequence_t_profile(const NetDefinition& def, int m_max,
                                    std::uint64_t guard = kDefaultTGuard);

struct PrefixBlock {
    int m = 0;
    /// Index of the first sequence point of this block.
    std::uint64_t offset = 0;
    /// One precision-P numerator per coordinate.
    std::vector<std::uint64_t> shift;
    std::vector<BitMatrix> submatrices;
};

/// Blocks in increasing order of m. Offsets place the largest block first.
struct PrefixDecomposition {
    std::vector<PrefixBlock> blocks;
};

struct SequencePrefix {
    DyadicPointSet points;
    PrefixDecomposition decomposition;
};

/// First N points of the digital sequence with P x P matrices (P = def.m), precision P.
/// Matrices must be upper triangular and non-singular.
SequencePrefix sequence_prefix(const NetDefinition& def, std::uint64_t n_points);

/// The shifted net of one block at the sequence precision.
NetDefinition block_net(const PrefixBlock& block, int precision);

/// CSV with one row per point, exact decimal fractions.
void write_points_csv(std::ostream& out, const DyadicPointSet& points);

/// 16-byte little-endian header (magic "WQMP", m:u8, precision:u8, s:u16, N:u64)
/// followed by N*s u64 numerators, row-major.
void write_points_binary(std::ostream& out, const DyadicPointSet& points, int m);
DyadicPointSet read_points_binary(std::istream& in, int* m_out = nullptr);

}  // namespace wqmc
