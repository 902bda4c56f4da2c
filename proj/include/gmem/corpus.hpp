#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmem/pattern.hpp"

namespace gmem {

/// Parameters for a synthetic QR-like corpus. Per-pattern density is drawn
/// from [density_lo, density_hi]; with structural_overlay, three fixed
/// finder-style corner blocks are stamped over every pattern, raising
/// inter-pattern correlation the way real QR codes share their markers.
struct CorpusSpec {
    int count = 1;
    int width = 0;
    int height = 0;
    double density_lo = 0.5;
    double density_hi = 0.5;
    bool structural_overlay = false;
    std::uint64_t seed = 0;
};

namespace detail {

// PBM token scanner: skips whitespace and '#' comments between header tokens.
class PbmReader {
public:
    explicit PbmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::string magic() {
        if (bytes_.size() < 2)
            throw std::runtime_error("PBM: truncated magic");
        std::string m{static_cast<char>(bytes_[0]), static_cast<char>(bytes_[1])};
        pos_ = 2;
        return m;
    }

    int header_int() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
            throw std::runtime_error("PBM: expected integer in header");
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1 << 24)
                throw std::runtime_error("PBM: dimension too large");
            ++pos_;
        }
        return static_cast<int>(value);
    }

    std::uint8_t plain_bit() {
        skip_space_and_comments();
        if (pos_ >= bytes_.size())
            throw std::runtime_error("PBM: truncated raster");
        const char c = static_cast<char>(bytes_[pos_++]);
        if (c != '0' && c != '1')
            throw std::runtime_error("PBM: raster cell must be 0 or 1");
        return static_cast<std::uint8_t>(c - '0');
    }

    // The raster of a binary PBM starts after exactly one whitespace byte.
    std::span<const std::uint8_t> raw_raster() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            throw std::runtime_error("PBM: missing raster separator");
        ++pos_;
        return bytes_.subspan(pos_);
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

// Finder-style block: black border, white ring, black core (QR marker look).
inline void stamp_finder_block(BitPattern& p, int x0, int y0, int side) {
    for (int dy = 0; dy < side; ++dy) {
        for (int dx = 0; dx < side; ++dx) {
            const int ring = std::min(std::min(dx, dy), std::min(side - 1 - dx, side - 1 - dy));
            p.bits[static_cast<std::size_t>(y0 + dy) * p.width + (x0 + dx)] =
                ring == 1 ? 0 : 1;
        }
    }
}

}  // namespace detail

/// Parses a PBM image, plain ("P1") or binary ("P4"). PBM's 1 = black maps
/// to bit 1; binary rasters pad each row to a byte boundary.
inline BitPattern load_pbm(std::span<const std::uint8_t> bytes) {
    detail::PbmReader reader(bytes);
    const std::string magic = reader.magic();
    if (magic != "P1" && magic != "P4")
        throw std::runtime_error("PBM: unsupported magic '" + magic + "'");
    const int width = reader.header_int();
    const int height = reader.header_int();
    if (width < 1 || height < 1)
        throw std::runtime_error("PBM: dimensions must be positive");

    std::vector<std::uint8_t> bits;
    bits.reserve(static_cast<std::size_t>(width) * height);
    if (magic == "P1") {
        for (std::size_t i = 0; i < static_cast<std::size_t>(width) * height; ++i)
            bits.push_back(reader.plain_bit());
    } else {
        const std::span<const std::uint8_t> raster = reader.raw_raster();
        const std::size_t row_bytes = (static_cast<std::size_t>(width) + 7) / 8;
        if (raster.size() < row_bytes * height)
            throw std::runtime_error("PBM: truncated raster");
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const std::uint8_t byte = raster[y * row_bytes + x / 8];
                bits.push_back((byte >> (7 - x % 8)) & 1);
            }
        }
    }
    return make_pattern(width, height, std::move(bits));
}

inline BitPattern load_pbm(const std::vector<std::uint8_t>& bytes) {
    return load_pbm(std::span<const std::uint8_t>(bytes));
}

/// Serializes a pattern as PBM, plain or binary. Round-trips bit-exactly
/// through load_pbm.
inline std::vector<std::uint8_t> save_pbm(const BitPattern& p, bool binary) {
    std::string header = (binary ? "P4\n" : "P1\n") + std::to_string(p.width) + " " +
                         std::to_string(p.height) + "\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    if (binary) {
        const std::size_t row_bytes = (static_cast<std::size_t>(p.width) + 7) / 8;
        for (int y = 0; y < p.height; ++y) {
            std::vector<std::uint8_t> row(row_bytes, 0);
            for (int x = 0; x < p.width; ++x) {
                if (p.at(x, y))
                    row[x / 8] |= static_cast<std::uint8_t>(0x80 >> (x % 8));
            }
            out.insert(out.end(), row.begin(), row.end());
        }
    } else {
        for (int y = 0; y < p.height; ++y) {
            for (int x = 0; x < p.width; ++x) {
                if (x > 0)
                    out.push_back(' ');
                out.push_back(p.at(x, y) ? '1' : '0');
            }
            out.push_back('\n');
        }
    }
    return out;
}

/// Generates `count` random patterns. Realized per-pattern densities always
/// land inside [density_lo, density_hi]: the 1-cell count is drawn uniformly
/// from the realizable counts in that range. Deterministic for a fixed seed.
inline PatternSet generate_corpus(const CorpusSpec& spec) {
    if (spec.count < 1)
        throw std::invalid_argument("corpus count must be at least 1");
    if (spec.width < 1 || spec.height < 1)
        throw std::invalid_argument("corpus dimensions must be positive");
    if (spec.density_lo < 0.0 || spec.density_hi > 1.0 || spec.density_lo > spec.density_hi)
        throw std::invalid_argument("density range must satisfy 0 <= lo <= hi <= 1");

    const std::size_t total =
        static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height);
    const auto lo_count = static_cast<std::size_t>(
        std::ceil(spec.density_lo * static_cast<double>(total)));
    const auto hi_count = static_cast<std::size_t>(
        std::floor(spec.density_hi * static_cast<double>(total)));
    if (lo_count > hi_count)
        throw std::invalid_argument("density range admits no realizable 1-cell count");

    int block_side = 0;
    if (spec.structural_overlay) {
        block_side = std::max(7, spec.width / 8);
        if (block_side > spec.width || block_side > spec.height)
            throw std::invalid_argument("overlay blocks exceed pattern dimensions");
    }

    std::mt19937_64 master(spec.seed);
    PatternSet set;
    set.patterns.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i) {
        const std::size_t ones =
            lo_count + static_cast<std::size_t>(
                           detail::uniform_below(master, hi_count - lo_count + 1));
        const std::uint64_t sub_seed = master();
        BitPattern p = detail::random_pattern_with_count(spec.width, spec.height, ones, sub_seed);
        if (spec.structural_overlay) {
            detail::stamp_finder_block(p, 0, 0, block_side);
            detail::stamp_finder_block(p, spec.width - block_side, 0, block_side);
            detail::stamp_finder_block(p, 0, spec.height - block_side, block_side);
        }
        set.patterns.push_back(std::move(p));
    }
    return set;
}

/// Masks a pattern down to a kept region (presented = kept).
inline MaskedPattern occlude(const BitPattern& p, const RegionSpec& keep) {
    return apply_mask(p, keep);
}

}  // namespace gmem
