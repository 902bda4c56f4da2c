#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmem/corpus.hpp"
#include "gmem/net.hpp"
#include "gmem/pattern.hpp"

namespace gmem {

/// Element type for serialized weights.
enum class WeightDType : std::uint8_t { F64 = 0, F32 = 1, F16 = 2 };

// GMEM1 container, all integers and floats little-endian:
//
//   offset  size  field
//   0       6     magic "GMEM1\0"
//   6       2     version (= 1)
//   8       4     N, stored patterns
//   12      4     R, cells per pattern (= width * height)
//   16      4     width
//   20      4     height
//   24      1     dtype (0 = f64, 1 = f32, 2 = f16)
//   25      32    eps_w, eps_v, theta, tau as f64
//   57      -     pattern weights, N x R row-major, dtype elements
//           -     recall weights, N x R row-major, dtype elements
inline constexpr std::size_t weight_header_size = 57;
inline constexpr std::uint16_t weight_format_version = 1;
inline constexpr unsigned char weight_magic[6] = {'G', 'M', 'E', 'M', '1', '\0'};

namespace detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

inline std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t at) {
    return static_cast<std::uint16_t>(in[at] | (in[at + 1] << 8));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i)
        v = (v << 8) | in[at + i];
    return v;
}

inline std::uint64_t get_u64(std::span<const std::uint8_t> in, std::size_t at) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i)
        v = (v << 8) | in[at + i];
    return v;
}

// IEEE binary16 conversion with round-to-nearest-even on narrowing.
inline std::uint16_t f32_to_f16(float value) {
    const std::uint32_t f = std::bit_cast<std::uint32_t>(value);
    const std::uint16_t sign = static_cast<std::uint16_t>((f >> 16) & 0x8000u);
    const std::uint32_t exp32 = (f >> 23) & 0xffu;
    std::uint32_t mant = f & 0x7fffffu;

    if (exp32 == 0xffu)  // inf / nan
        return static_cast<std::uint16_t>(sign | 0x7c00u | (mant ? 0x200u : 0u));

    const int exp16 = static_cast<int>(exp32) - 127 + 15;
    if (exp16 >= 31)  // overflow
        return static_cast<std::uint16_t>(sign | 0x7c00u);
    if (exp16 <= 0) {  // subnormal or zero
        if (exp16 < -10)
            return sign;
        mant |= 0x800000u;
        const int shift = 14 - exp16;
        std::uint32_t half = mant >> shift;
        const std::uint32_t rest = mant & ((1u << shift) - 1);
        const std::uint32_t midpoint = 1u << (shift - 1);
        if (rest > midpoint || (rest == midpoint && (half & 1)))
            ++half;
        return static_cast<std::uint16_t>(sign | half);
    }
    std::uint32_t half = static_cast<std::uint32_t>(exp16 << 10) | (mant >> 13);
    const std::uint32_t rest = mant & 0x1fffu;
    if (rest > 0x1000u || (rest == 0x1000u && (half & 1)))
        ++half;  // may carry into the exponent, which is the correct rounding
    return static_cast<std::uint16_t>(sign | half);
}

inline float f16_to_f32(std::uint16_t h) {
    const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
    const std::uint32_t exp = (h >> 10) & 0x1fu;
    std::uint32_t mant = h & 0x3ffu;
    std::uint32_t bits;
    if (exp == 0) {
        if (mant == 0) {
            bits = sign;
        } else {  // subnormal: renormalize
            int e = -1;
            do {
                mant <<= 1;
                ++e;
            } while (!(mant & 0x400u));
            bits = sign | ((112u - e) << 23) | ((mant & 0x3ffu) << 13);
        }
    } else if (exp == 31) {
        bits = sign | 0x7f800000u | (mant << 13);
    } else {
        bits = sign | ((exp + 112u) << 23) | (mant << 13);
    }
    return std::bit_cast<float>(bits);
}

inline void put_element(std::vector<std::uint8_t>& out, double value, WeightDType dtype) {
    switch (dtype) {
        case WeightDType::F64:
            put_u64(out, std::bit_cast<std::uint64_t>(value));
            break;
        case WeightDType::F32: {
            const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(value));
            put_u32(out, bits);
            break;
        }
        case WeightDType::F16:
            put_u16(out, f32_to_f16(static_cast<float>(value)));
            break;
    }
}

inline double get_element(std::span<const std::uint8_t> in, std::size_t at, WeightDType dtype) {
    switch (dtype) {
        case WeightDType::F64:
            return std::bit_cast<double>(get_u64(in, at));
        case WeightDType::F32:
            return std::bit_cast<float>(get_u32(in, at));
        case WeightDType::F16:
            return f16_to_f32(get_u16(in, at));
    }
    throw std::logic_error("unreachable dtype");
}

}  // namespace detail

inline std::size_t dtype_size(WeightDType dtype) {
    switch (dtype) {
        case WeightDType::F64: return 8;
        case WeightDType::F32: return 4;
        case WeightDType::F16: return 2;
    }
    throw std::invalid_argument("unknown weight dtype");
}

/// Byte size of one serialized N x R matrix.
inline std::uint64_t matrix_payload_size(std::uint32_t n, std::uint32_t r, WeightDType dtype) {
    return static_cast<std::uint64_t>(n) * r * dtype_size(dtype);
}

/// Total container size: header plus both matrices.
inline std::uint64_t expected_file_size(std::uint32_t n, std::uint32_t r, WeightDType dtype) {
    return weight_header_size + 2 * matrix_payload_size(n, r, dtype);
}

/// Serializes a trained net. Narrow dtypes round element-wise; default
/// training only produces {0, 1, eps_v * theta}, which f32 and f16 hold
/// exactly at the default hyperparameters.
inline std::vector<std::uint8_t> save_weights(const MemoryNet& net,
                                              WeightDType dtype = WeightDType::F64) {
    constexpr std::uint64_t u32_max = 0xffffffffu;
    if (net.size() > u32_max || net.cell_count() > u32_max)
        throw std::invalid_argument("net too large for the GMEM1 container");
    const auto n = static_cast<std::uint32_t>(net.size());
    const auto r = static_cast<std::uint32_t>(net.cell_count());

    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(expected_file_size(n, r, dtype)));
    out.insert(out.end(), std::begin(weight_magic), std::end(weight_magic));
    detail::put_u16(out, weight_format_version);
    detail::put_u32(out, n);
    detail::put_u32(out, r);
    detail::put_u32(out, static_cast<std::uint32_t>(net.width()));
    detail::put_u32(out, static_cast<std::uint32_t>(net.height()));
    out.push_back(static_cast<std::uint8_t>(dtype));
    detail::put_u64(out, std::bit_cast<std::uint64_t>(net.params().eps_w));
    detail::put_u64(out, std::bit_cast<std::uint64_t>(net.params().eps_v));
    detail::put_u64(out, std::bit_cast<std::uint64_t>(net.params().theta));
    detail::put_u64(out, std::bit_cast<std::uint64_t>(net.params().tau));

    for (double w : net.pattern_weights())
        detail::put_element(out, w, dtype);
    for (double v : net.recall_weights())
        detail::put_element(out, v, dtype);
    return out;
}

/// Reconstructs a net from GMEM1 bytes, widening narrow dtypes to f64.
inline MemoryNet load_weights(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < weight_header_size)
        throw std::runtime_error("weight file: truncated header");
    if (!std::equal(std::begin(weight_magic), std::end(weight_magic), bytes.begin()))
        throw std::runtime_error("weight file: bad magic");
    if (detail::get_u16(bytes, 6) != weight_format_version)
        throw std::runtime_error("weight file: unsupported version");
    const std::uint32_t n = detail::get_u32(bytes, 8);
    const std::uint32_t r = detail::get_u32(bytes, 12);
    const std::uint32_t width = detail::get_u32(bytes, 16);
    const std::uint32_t height = detail::get_u32(bytes, 20);
    const std::uint8_t dtype_byte = bytes[24];
    if (dtype_byte > 2)
        throw std::runtime_error("weight file: unknown dtype");
    const auto dtype = static_cast<WeightDType>(dtype_byte);
    if (width == 0 || height == 0 ||
        static_cast<std::uint64_t>(width) * height != r)
        throw std::runtime_error("weight file: R does not equal width * height");
    if (bytes.size() != expected_file_size(n, r, dtype))
        throw std::runtime_error("weight file: size does not match header");

    HyperParams params;
    params.eps_w = std::bit_cast<double>(detail::get_u64(bytes, 25));
    params.eps_v = std::bit_cast<double>(detail::get_u64(bytes, 33));
    params.theta = std::bit_cast<double>(detail::get_u64(bytes, 41));
    params.tau = std::bit_cast<double>(detail::get_u64(bytes, 49));
    params.validate();

    const std::size_t elems = static_cast<std::size_t>(n) * r;
    const std::size_t esize = dtype_size(dtype);
    std::vector<double> w(elems), v(elems);
    std::size_t at = weight_header_size;
    for (std::size_t i = 0; i < elems; ++i, at += esize)
        w[i] = detail::get_element(bytes, at, dtype);
    for (std::size_t i = 0; i < elems; ++i, at += esize)
        v[i] = detail::get_element(bytes, at, dtype);
    return MemoryNet::from_weights(static_cast<int>(width), static_cast<int>(height), params,
                                   std::move(w), std::move(v));
}

inline MemoryNet load_weights(const std::vector<std::uint8_t>& bytes) {
    return load_weights(std::span<const std::uint8_t>(bytes));
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

inline void write_file(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

/// Writes a pattern set as PBM files plus an index.txt naming them in
/// pattern order, one filename per line.
inline void save_pattern_dir(const PatternSet& set, const std::filesystem::path& dir,
                             bool binary_pbm = true) {
    validate_pattern_set(set);
    std::filesystem::create_directories(dir);
    std::string index;
    for (std::size_t i = 0; i < set.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "pattern_%04zu.pbm", i);
        write_file(dir / name, save_pbm(set[i], binary_pbm));
        index += name;
        index += '\n';
    }
    write_file(dir / "index.txt",
               std::span<const std::uint8_t>(
                   reinterpret_cast<const std::uint8_t*>(index.data()), index.size()));
}

/// Loads a pattern directory in index order.
inline PatternSet load_pattern_dir(const std::filesystem::path& dir) {
    const std::filesystem::path index_path = dir / "index.txt";
    std::ifstream in(index_path);
    if (!in)
        throw std::runtime_error("cannot open " + index_path.string());
    PatternSet set;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        set.patterns.push_back(load_pbm(read_file(dir / line)));
    }
    validate_pattern_set(set);
    return set;
}

}  // namespace gmem
