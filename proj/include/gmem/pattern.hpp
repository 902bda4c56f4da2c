#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmem {

/// A binary pattern laid out row-major: cell (x, y) lives at index y * width + x.
/// Every cell is exactly 0 or 1; black modules are 1.
struct BitPattern {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    std::size_t cell_count() const { return bits.size(); }

    std::uint8_t at(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                    static_cast<std::size_t>(x)];
    }

    bool operator==(const BitPattern&) const = default;
};

/// A pattern plus a same-length mask of which cells are presented to recall.
/// Cells with presented == 0 are omitted from all activation sums.
struct MaskedPattern {
    BitPattern pattern;
    std::vector<std::uint8_t> presented;

    std::size_t presented_count() const {
        return static_cast<std::size_t>(
            std::count_if(presented.begin(), presented.end(),
                          [](std::uint8_t b) { return b != 0; }));
    }
};

/// An ordered collection of same-sized patterns; index order is storage order.
struct PatternSet {
    std::vector<BitPattern> patterns;

    std::size_t size() const { return patterns.size(); }
    bool empty() const { return patterns.empty(); }
    const BitPattern& operator[](std::size_t i) const { return patterns[i]; }
};

/// Validates that a PatternSet is nonempty and dimensionally uniform.
inline void validate_pattern_set(const PatternSet& set) {
    if (set.empty())
        throw std::invalid_argument("pattern set is empty");
    const int w = set.patterns.front().width;
    const int h = set.patterns.front().height;
    for (const BitPattern& p : set.patterns) {
        if (p.width != w || p.height != h)
            throw std::invalid_argument("pattern set has mixed dimensions");
    }
}

/// A rectangular cell region, either given explicitly or as the axis-aligned
/// bottom-right rectangle covering `fraction` of the pattern area (side scale
/// sqrt(fraction) per axis, floor-rounded, at least one cell per axis).
struct RegionSpec {
    enum class Kind { Rect, KeepBottomRight };

    Kind kind = Kind::Rect;
    int x0 = 0, y0 = 0, w = 0, h = 0;
    double fraction = 0.0;

    static RegionSpec rect(int x0, int y0, int w, int h) {
        RegionSpec r;
        r.kind = Kind::Rect;
        r.x0 = x0;
        r.y0 = y0;
        r.w = w;
        r.h = h;
        return r;
    }

    static RegionSpec bottom_right(double fraction) {
        RegionSpec r;
        r.kind = Kind::KeepBottomRight;
        r.fraction = fraction;
        return r;
    }
};

/// Which corner a keep-fraction rectangle is anchored to.
enum class Corner { TopLeft, TopRight, BottomLeft, BottomRight };

namespace detail {

inline int keep_side(int extent, double fraction) {
    const int side = static_cast<int>(std::floor(extent * std::sqrt(fraction)));
    return std::max(side, 1);
}

// Uniform integer in [0, n) by rejection, avoiding modulo bias.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Pattern with exactly `ones` 1-cells chosen uniformly without replacement.
inline BitPattern random_pattern_with_count(int width, int height, std::size_t ones,
                                            std::uint64_t seed) {
    const std::size_t total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<std::size_t> cells(total);
    std::iota(cells.begin(), cells.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    BitPattern p;
    p.width = width;
    p.height = height;
    p.bits.assign(total, 0);
    // Partial Fisher-Yates: the first `ones` slots end up holding the chosen cells.
    for (std::size_t i = 0; i < ones; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, total - i));
        std::swap(cells[i], cells[j]);
        p.bits[cells[i]] = 1;
    }
    return p;
}

}  // namespace detail

/// Builds a validated pattern; rejects bad dimensions and non-binary cells.
inline BitPattern make_pattern(int width, int height, std::vector<std::uint8_t> bits) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("pattern dimensions must be positive");
    const std::size_t expected =
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bits.size() != expected)
        throw std::invalid_argument("bit count " + std::to_string(bits.size()) +
                                    " does not match " + std::to_string(width) + "x" +
                                    std::to_string(height));
    for (std::uint8_t b : bits) {
        if (b != 0 && b != 1)
            throw std::invalid_argument("pattern cells must be 0 or 1");
    }
    BitPattern p;
    p.width = width;
    p.height = height;
    p.bits = std::move(bits);
    return p;
}

/// Fraction of 1-cells.
inline double density(const BitPattern& p) {
    const auto ones = std::count(p.bits.begin(), p.bits.end(), std::uint8_t{1});
    return static_cast<double>(ones) / static_cast<double>(p.cell_count());
}

/// Marks exactly the cells inside `region` as presented; bits are untouched.
inline MaskedPattern apply_mask(const BitPattern& p, const RegionSpec& region) {
    int x0 = region.x0, y0 = region.y0, w = region.w, h = region.h;
    if (region.kind == RegionSpec::Kind::KeepBottomRight) {
        if (!(region.fraction > 0.0) || region.fraction > 1.0)
            throw std::invalid_argument("keep fraction must be in (0, 1]");
        w = detail::keep_side(p.width, region.fraction);
        h = detail::keep_side(p.height, region.fraction);
        x0 = p.width - w;
        y0 = p.height - h;
    }
    if (w < 1 || h < 1)
        throw std::invalid_argument("mask region is empty");
    if (x0 < 0 || y0 < 0 || x0 + w > p.width || y0 + h > p.height)
        throw std::invalid_argument("mask region out of bounds");

    MaskedPattern m;
    m.pattern = p;
    m.presented.assign(p.cell_count(), 0);
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x)
            m.presented[static_cast<std::size_t>(y) * p.width + x] = 1;
    }
    return m;
}

/// Probe with every cell presented.
inline MaskedPattern present_all(const BitPattern& p) {
    MaskedPattern m;
    m.pattern = p;
    m.presented.assign(p.cell_count(), 1);
    return m;
}

/// Keep-fraction rectangle anchored at `corner`, same side rule as bottom_right.
inline RegionSpec corner_region(int width, int height, double fraction, Corner corner) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("keep fraction must be in (0, 1]");
    const int w = detail::keep_side(width, fraction);
    const int h = detail::keep_side(height, fraction);
    const int x0 = (corner == Corner::TopRight || corner == Corner::BottomRight) ? width - w : 0;
    const int y0 = (corner == Corner::BottomLeft || corner == Corner::BottomRight) ? height - h : 0;
    return RegionSpec::rect(x0, y0, w, h);
}

/// Random pattern with exactly floor(density * width * height) 1-cells,
/// placed uniformly without replacement. Deterministic for a fixed seed.
inline BitPattern random_pattern(int width, int height, double density, std::uint64_t seed) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("pattern dimensions must be positive");
    if (density < 0.0 || density > 1.0)
        throw std::invalid_argument("density must be in [0, 1]");
    const std::size_t total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const std::size_t ones =
        static_cast<std::size_t>(std::floor(density * static_cast<double>(total)));
    return detail::random_pattern_with_count(width, height, ones, seed);
}

}  // namespace gmem
