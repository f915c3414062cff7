#include "wqmc/digital_net.hpp"

#include "wqmc/errors.hpp"
#include "wqmc/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wqmc {

extern const char* const kBundledSobolDirections;

void NetDefinition::validate() const {
    if (m < 0 || m > 64) throw std::invalid_argument("m out of range [0, 64]");
    if (matrices.empty()) throw std::invalid_argument("net needs at least one generating matrix");
    const int prec = output_precision();
    if (prec < m || prec > 64) throw std::invalid_argument("precision must satisfy m <= P <= 64");
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        if (matrices[i].rows() != m || matrices[i].cols() != m) {
            throw std::invalid_argument("matrix " + std::to_string(i + 1) + " is " +
                                        std::to_string(matrices[i].rows()) + "x" +
                                        std::to_string(matrices[i].cols()) + ", expected " +
                                        std::to_string(m) + "x" + std::to_string(m));
        }
    }
    if (shift) {
        if (shift->size() != matrices.size()) throw std::invalid_argument("shift dimension mismatch");
        if (prec < 64) {
            for (auto v : *shift) {
                if (v >> prec) throw std::invalid_argument("shift wider than the precision");
            }
        }
    }
}

DyadicPointSet generate_net(const NetDefinition& def) {
    def.validate();
    if (def.m > 32) throw std::invalid_argument("generate_net requires m <= 32");
    const std::size_t n = std::size_t{1} << def.m;
    const std::size_t s = def.dim();
    const int prec = def.output_precision();
    DyadicPointSet out(n, s, prec);
    parallel_for(n, 1024, [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            for (std::size_t i = 0; i < s; ++i) {
                std::uint64_t y = def.matrices[i].apply(p, prec);
                if (def.shift) y ^= (*def.shift)[i];
                out.num(p, i) = y;
            }
        }
    });
    return out;
}

SobolDirections SobolDirections::parse(std::istream& in) {
    SobolDirections dirs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "d" || first.starts_with("#")) continue;
        Entry e;
        long long d = 0;
        try {
            d = std::stoll(first);
        } catch (const std::exception&) {
            throw ParseError(line_no, "expected dimension index, got '" + first + "'");
        }
        if (d != static_cast<long long>(dirs.entries.size()) + 2) {
            throw ParseError(line_no, "dimensions must be listed consecutively from 2");
        }
        if (!(ls >> e.degree >> e.a) || e.degree < 1 || e.degree > 63) {
            throw ParseError(line_no, "malformed degree or polynomial field");
        }
        if (e.degree > 1 && (e.a >> (e.degree - 1)) != 0) {
            throw ParseError(line_no, "polynomial coefficients exceed the degree");
        }
        for (int k = 1; k <= e.degree; ++k) {
            std::uint64_t mk = 0;
            if (!(ls >> mk)) throw ParseError(line_no, "expected " + std::to_string(e.degree) + " direction numbers");
            if ((mk & 1U) == 0 || (k < 64 && (mk >> k) != 0)) {
                throw ParseError(line_no, "direction number m_" + std::to_string(k) + " must be odd and below 2^" +
                                              std::to_string(k));
            }
            e.m_init.push_back(mk);
        }
        std::string extra;
        if (ls >> extra) throw ParseError(line_no, "trailing field '" + extra + "'");
        dirs.entries.push_back(std::move(e));
    }
    return dirs;
}

SobolDirections SobolDirections::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    return parse(in);
}

const SobolDirections& SobolDirections::bundled() {
    static const SobolDirections dirs = [] {
        std::istringstream in(kBundledSobolDirections);
        return parse(in);
    }();
    return dirs;
}

std::vector<BitMatrix> sobol_matrices(std::size_t s, int m, const SobolDirections& dirs) {
    if (s < 1) throw std::invalid_argument("dimension must be at least 1");
    if (s > dirs.max_dim()) {
        throw std::invalid_argument("dimension " + std::to_string(s) +
                                    " exceeds the direction-number table (limit " +
                                    std::to_string(dirs.max_dim()) + ")");
    }
    if (m < 1 || m > 64) throw std::invalid_argument("m out of range [1, 64]");
    std::vector<BitMatrix> out;
    out.reserve(s);
    out.push_back(BitMatrix::identity(m));
    for (std::size_t d = 2; d <= s; ++d) {
        const auto& e = dirs.entries[d - 2];
        const int deg = e.degree;
        // v[k-1] = m_k, an odd k-bit integer.
        std::vector<std::uint64_t> v(static_cast<std::size_t>(m));
        for (int k = 1; k <= m; ++k) {
            if (k <= deg) {
                v[k - 1] = e.m_init[k - 1];
                continue;
            }
            std::uint64_t x = v[k - deg - 1] ^ (v[k - deg - 1] << deg);
            for (int i = 1; i < deg; ++i) {
                if ((e.a >> (deg - 1 - i)) & 1U) x ^= v[k - i - 1] << i;
            }
            v[k - 1] = x;
        }
        BitMatrix c(m, m);
        for (int k = 1; k <= m; ++k) {
            for (int r = 0; r < k; ++r) {
                if ((v[k - 1] >> (k - 1 - r)) & 1U) c.set(r, k - 1, true);
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

NetDefinition parse_matrices(std::istream& in) {
    NetDefinition def;
    std::string line;
    std::size_t line_no = 0;
    long long m = -1, s = -1;
    std::size_t rows_read = 0;
    std::size_t total_rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        std::string bits;
        std::vector<std::string> toks;
        while (ls >> tok) toks.push_back(tok);
        if (toks.empty()) continue;
        if (m < 0) {
            if (toks.size() != 2) throw ParseError(line_no, "header must be 'm s'");
            try {
                std::size_t used0 = 0, used1 = 0;
                m = std::stoll(toks[0], &used0);
                s = std::stoll(toks[1], &used1);
                if (used0 != toks[0].size() || used1 != toks[1].size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ParseError(line_no, "header must be two integers 'm s'");
            }
            if (m < 1 || m > 64 || s < 1 || s > 1'000'000) throw ParseError(line_no, "header values out of range");
            def.m = static_cast<int>(m);
            def.matrices.assign(static_cast<std::size_t>(s), BitMatrix(def.m, def.m));
            total_rows = static_cast<std::size_t>(m * s);
            continue;
        }
        for (const auto& t : toks) bits += t;
        if (rows_read >= total_rows) {
            throw ParseError(line_no, "unexpected row " + std::to_string(rows_read + 1) + " (expected " +
                                          std::to_string(total_rows) + " rows for m=" + std::to_string(m) +
                                          ", s=" + std::to_string(s) + ")");
        }
        if (bits.size() != static_cast<std::size_t>(m)) {
            throw ParseError(line_no, "row has " + std::to_string(bits.size()) + " digits, expected " +
                                          std::to_string(m));
        }
        std::uint64_t mask = 0;
        for (std::size_t c = 0; c < bits.size(); ++c) {
            if (bits[c] == '1') {
                mask |= std::uint64_t{1} << c;
            } else if (bits[c] != '0') {
                throw ParseError(line_no, std::string("non-binary digit '") + bits[c] + "'");
            }
        }
        const std::size_t block = rows_read / static_cast<std::size_t>(m);
        const int r = static_cast<int>(rows_read % static_cast<std::size_t>(m));
        def.matrices[block].set_row(r, mask);
        ++rows_read;
    }
    if (m < 0) throw ParseError(line_no, "missing 'm s' header");
    if (rows_read != total_rows) {
        throw ParseError(line_no, "expected " + std::to_string(total_rows) + " rows, found " +
                                      std::to_string(rows_read));
    }
    return def;
}

NetDefinition load_matrices(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    return parse_matrices(in);
}

void write_matrices(std::ostream& out, const NetDefinition& def) {
    out << def.m << ' ' << def.dim() << '\n';
    for (std::size_t i = 0; i < def.dim(); ++i) {
        out << "# C_" << (i + 1) << '\n';
        const auto& c = def.matrices[i];
        for (int r = 0; r < c.rows(); ++r) {
            for (int col = 0; col < c.cols(); ++col) {
                if (col) out << ' ';
                out << (c.get(r, col) ? '1' : '0');
            }
            out << '\n';
        }
    }
}

void save_matrices(const std::filesystem::path& path, const NetDefinition& def) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path.string());
    write_matrices(out, def);
}

namespace {

/// Calls visit(d) for every composition of `total` into d.size() nonnegative parts,
/// stopping early when visit returns false. Returns false if stopped.
template <class F>
bool for_each_composition(int total, std::vector<int>& d, std::size_t j, F& visit) {
    if (j + 1 == d.size()) {
        d[j] = total;
        return visit(d);
    }
    for (int v = 0; v <= total; ++v) {
        d[j] = v;
        if (!for_each_composition(total - v, d, j + 1, visit)) return false;
    }
    return true;
}

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
        if (c > cap) return cap + 1;
    }
    return static_cast<std::uint64_t>(c);
}

}  // namespace

int exact_t(const NetDefinition& def, Subset u, std::uint64_t guard) {
    def.validate();
    const auto members = subset_members(u);
    if (members.empty()) throw std::invalid_argument("exact_t needs a nonempty subset");
    for (auto i : members) {
        if (i >= def.dim()) throw std::out_of_range("subset coordinate out of range");
    }
    const int m = def.m;
    const std::size_t r = members.size();
    std::vector<int> d(r);
    std::vector<std::uint64_t> rows;
    int best = m;
    for (int t = m - 1; t >= 0; --t) {
        const int k = m - t;
        if (binomial_capped(static_cast<std::uint64_t>(k) + r - 1, r - 1, guard) > guard) {
            throw WorkGuardError("t-computation too large");
        }
        auto independent = [&](const std::vector<int>& parts) {
            rows.clear();
            for (std::size_t j = 0; j < r; ++j) {
                const auto& c = def.matrices[members[j]];
                for (int row = 0; row < parts[j]; ++row) rows.push_back(c.row(row));
            }
            return f2_rank(rows) == k;
        };
        if (!for_each_composition(k, d, 0, independent)) break;
        best = t;
    }
    return best;
}

bool is_projection_regular(const DyadicPointSet& points, int m) {
    if (m < 0 || m > 32) throw std::invalid_argument("m out of range [0, 32]");
    if (points.size() != (std::size_t{1} << m)) {
        throw std::invalid_argument("point count must equal 2^m");
    }
    if (points.precision() < m) throw std::invalid_argument("point precision below m");
    std::vector<bool> seen(points.size());
    for (std::size_t i = 0; i < points.dim(); ++i) {
        std::fill(seen.begin(), seen.end(), false);
        for (std::size_t n = 0; n < points.size(); ++n) {
            const auto cell = points.coord(n, i).leading(m);
            if (seen[cell]) return false;
            seen[cell] = true;
        }
    }
    return true;
}

std::vector<int> sequence_t_profile(const NetDefinition& def, int m_max, std::uint64_t guard) {
    def.validate();
    if (m_max < 1 || m_max > def.m) throw std::invalid_argument("m_max out of range");
    std::vector<int> out;
    for (int k = 1; k <= m_max; ++k) {
        NetDefinition sub;
        sub.m = k;
        for (const auto& c : def.matrices) sub.matrices.push_back(c.upper_left(k));
        out.push_back(exact_t(sub, full_subset(def.dim()), guard));
    }
    return out;
}

SequencePrefix sequence_prefix(const NetDefinition& def, std::uint64_t n_points) {
    def.validate();
    const int p = def.m;
    if (def.output_precision() != p) throw std::invalid_argument("sequence mode uses precision P = matrix size");
    if (def.shift) throw std::invalid_argument("sequence mode takes no shift");
    for (const auto& c : def.matrices) {
        if (!c.is_upper_triangular()) throw std::invalid_argument("sequence mode requires upper triangular");
        if (!c.is_nonsingular()) throw std::invalid_argument("sequence mode requires non-singular matrices");
    }
    if (n_points < 1) throw std::invalid_argument("N must be at least 1");
    if (p < 64 && n_points > (std::uint64_t{1} << p)) throw std::invalid_argument("N exceeds 2^P");

    const std::size_t s = def.dim();
    SequencePrefix out{DyadicPointSet(n_points, s, p), {}};
    parallel_for(n_points, 1024, [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) {
            for (std::size_t i = 0; i < s; ++i) out.points.num(n, i) = def.matrices[i].apply(n, p);
        }
    });

    // Blocks are aligned at multiples of their size when taken largest first. Within a
    // block n = offset + l with l < 2^mj, so C n = C^(mj x mj) l + (D over V) (offset digits
    // above mj); the second term is the block's shift.
    std::uint64_t offset = 0;
    for (int b = 63; b >= 0; --b) {
        if (((n_points >> b) & 1U) == 0) continue;
        PrefixBlock block;
        block.m = b;
        block.offset = offset;
        const std::uint64_t high_cols = b >= 64 ? 0 : ~((std::uint64_t{1} << b) - 1);
        for (const auto& c : def.matrices) {
            std::uint64_t sigma = 0;
            for (int r = 0; r < p; ++r) {
                if (std::popcount(c.row(r) & high_cols & offset) & 1) sigma |= std::uint64_t{1} << (p - 1 - r);
            }
            block.shift.push_back(sigma);
            block.submatrices.push_back(c.upper_left(b));
        }
        out.decomposition.blocks.push_back(std::move(block));
        offset += std::uint64_t{1} << b;
    }
    std::reverse(out.decomposition.blocks.begin(), out.decomposition.blocks.end());
    return out;
}

NetDefinition block_net(const PrefixBlock& block, int precision) {
    NetDefinition def;
    def.m = block.m;
    def.matrices = block.submatrices;
    def.shift = block.shift;
    def.precision = precision;
    return def;
}

void write_points_csv(std::ostream& out, const DyadicPointSet& points) {
    for (std::size_t n = 0; n < points.size(); ++n) {
        for (std::size_t i = 0; i < points.dim(); ++i) {
            if (i) out << ',';
            out << exact_decimal(points.num(n, i), points.precision());
        }
        out << '\n';
    }
}

namespace {

constexpr char kMagic[4] = {'W', 'Q', 'M', 'P'};

void put_le(std::ostream& out, std::uint64_t v, int bytes) {
    char buf[8];
    for (int b = 0; b < bytes; ++b) buf[b] = static_cast<char>((v >> (8 * b)) & 0xFFU);
    out.write(buf, bytes);
}

std::uint64_t get_le(std::istream& in, int bytes) {
    unsigned char buf[8] = {};
    if (!in.read(reinterpret_cast<char*>(buf), bytes)) throw ParseError(0, "truncated point file");
    std::uint64_t v = 0;
    for (int b = bytes - 1; b >= 0; --b) v = (v << 8) | buf[b];
    return v;
}

}  // namespace

void write_points_binary(std::ostream& out, const DyadicPointSet& points, int m) {
    if (m < 0 || m > 255 || points.dim() > 0xFFFF) throw std::invalid_argument("point set too large for header");
    out.write(kMagic, 4);
    put_le(out, static_cast<std::uint64_t>(m), 1);
    put_le(out, static_cast<std::uint64_t>(points.precision()), 1);
    put_le(out, points.dim(), 2);
    put_le(out, points.size(), 8);
    for (auto v : points.data()) put_le(out, v, 8);
}

DyadicPointSet read_points_binary(std::istream& in, int* m_out) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw ParseError(0, "bad point file magic");
    const auto m = static_cast<int>(get_le(in, 1));
    const auto prec = static_cast<int>(get_le(in, 1));
    const auto s = static_cast<std::size_t>(get_le(in, 2));
    const auto n = static_cast<std::size_t>(get_le(in, 8));
    if (prec > 64) throw ParseError(0, "precision above 64");
    DyadicPointSet points(n, s, prec);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t i = 0; i < s; ++i) points.num(p, i) = get_le(in, 8);
    }
    if (m_out) *m_out = m;
    return points;
}

}  // namespace wqmc
