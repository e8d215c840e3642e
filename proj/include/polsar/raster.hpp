#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"

namespace polsar {

// .psr raster container.
//
// Layout (all little-endian):
//   bytes 0..7    magic "POLSAR1\0"
//   bytes 8..11   uint32 header length L
//   bytes 12..12+L-1   UTF-8 JSON header:
//       {"width":W,"height":H,"looks":N,"layout":"d3o3","dtype":"f64le"}
//   then W*H*9 doubles, row-major, per pixel:
//       d[0] d[1] d[2] Re(o[0]) Im(o[0]) Re(o[1]) Im(o[1]) Re(o[2]) Im(o[2])
//
// Writes are byte-deterministic for identical images. Read errors carry the
// byte offset of the offending structure.

namespace detail {

inline constexpr char kMagic[8] = {'P', 'O', 'L', 'S', 'A', 'R', '1', '\0'};

inline std::uint64_t to_le64(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xffULL);
    return r;
}

inline void push_f64le(std::string& buf, double v) {
    std::uint64_t bits = to_le64(std::bit_cast<std::uint64_t>(v));
    char raw[8];
    std::memcpy(raw, &bits, 8);
    buf.append(raw, 8);
}

inline double read_f64le(const char* p) {
    std::uint64_t bits;
    std::memcpy(&bits, p, 8);
    return std::bit_cast<double>(to_le64(bits));
}

[[noreturn]] inline void format_error(const std::string& what, std::uint64_t offset) {
    throw std::runtime_error("psr format error at byte " + std::to_string(offset) + ": " + what);
}

}  // namespace detail

inline std::string encode_raster(const PolSarImage& img) {
    if (img.width <= 0 || img.height <= 0 || img.looks < 1)
        throw std::invalid_argument("encode_raster: bad image dimensions");
    std::string header = "{\"width\":" + std::to_string(img.width) +
                         ",\"height\":" + std::to_string(img.height) +
                         ",\"looks\":" + std::to_string(img.looks) +
                         ",\"layout\":\"d3o3\",\"dtype\":\"f64le\"}";
    std::string out;
    out.reserve(12 + header.size() + img.data.size() * 72);
    out.append(detail::kMagic, 8);
    const std::uint32_t len = static_cast<std::uint32_t>(header.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((len >> (8 * i)) & 0xff));
    out += header;
    for (const HermitianCov3& px : img.data) {
        detail::push_f64le(out, px.d[0]);
        detail::push_f64le(out, px.d[1]);
        detail::push_f64le(out, px.d[2]);
        for (int k = 0; k < 3; ++k) {
            detail::push_f64le(out, px.o[k].real());
            detail::push_f64le(out, px.o[k].imag());
        }
    }
    return out;
}

inline void write_raster(const std::string& path, const PolSarImage& img) {
    const std::string bytes = encode_raster(img);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("write_raster: cannot open " + path);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write_raster: short write to " + path);
}

inline PolSarImage decode_raster(const std::string& bytes) {
    if (bytes.size() < 12) detail::format_error("file shorter than fixed preamble", bytes.size());
    if (std::memcmp(bytes.data(), detail::kMagic, 8) != 0) detail::format_error("magic mismatch", 0);
    std::uint32_t len = 0;
    for (int i = 3; i >= 0; --i) len = (len << 8) | static_cast<unsigned char>(bytes[8 + i]);
    if (bytes.size() < 12ull + len) detail::format_error("truncated JSON header", 12);

    nlohmann::json hdr;
    try {
        hdr = nlohmann::json::parse(bytes.substr(12, len));
    } catch (const std::exception& e) {
        detail::format_error(std::string("unparseable header: ") + e.what(), 12);
    }
    for (const char* key : {"width", "height", "looks", "layout", "dtype"})
        if (!hdr.contains(key)) detail::format_error(std::string("header missing \"") + key + "\"", 12);
    if (hdr["layout"] != "d3o3") detail::format_error("unsupported layout", 12);
    if (hdr["dtype"] != "f64le") detail::format_error("unsupported dtype", 12);
    if (!hdr["width"].is_number_integer() || !hdr["height"].is_number_integer() ||
        !hdr["looks"].is_number_integer())
        detail::format_error("dimensions must be integers", 12);
    const std::int64_t w = hdr["width"].get<std::int64_t>();
    const std::int64_t h = hdr["height"].get<std::int64_t>();
    const std::int64_t n = hdr["looks"].get<std::int64_t>();
    if (w < 1 || h < 1 || n < 1 || w > (1 << 20) || h > (1 << 20))
        detail::format_error("dimensions out of range", 12);

    const std::uint64_t payload_at = 12ull + len;
    const std::uint64_t expect = static_cast<std::uint64_t>(w) * static_cast<std::uint64_t>(h) * 72ull;
    const std::uint64_t have = bytes.size() - payload_at;
    if (have < expect)
        detail::format_error("truncated payload: expected " + std::to_string(expect) + " bytes, got " +
                                 std::to_string(have),
                             payload_at);
    if (have > expect)
        detail::format_error("payload size mismatch: " + std::to_string(have - expect) + " trailing bytes",
                             payload_at + expect);

    PolSarImage img(static_cast<int>(w), static_cast<int>(h), static_cast<int>(n));
    const char* p = bytes.data() + payload_at;
    for (HermitianCov3& px : img.data) {
        px.d[0] = detail::read_f64le(p);
        px.d[1] = detail::read_f64le(p + 8);
        px.d[2] = detail::read_f64le(p + 16);
        for (int k = 0; k < 3; ++k)
            px.o[k] = Complex(detail::read_f64le(p + 24 + 16 * k), detail::read_f64le(p + 32 + 16 * k));
        p += 72;
    }
    return img;
}

inline PolSarImage read_raster(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_raster: cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_raster(bytes);
}

}  // namespace polsar
