#include "wrenchval/png.hpp"

#include <cstring>
#include <fstream>

#include <zlib.h>

#include "wrenchval/errors.hpp"

namespace wrenchval {

namespace {

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t n, std::uint32_t seed = 0) {
    return static_cast<std::uint32_t>(::crc32(seed, data, static_cast<uInt>(n)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
    put_u32(out, static_cast<std::uint32_t>(payload.size()));
    std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    put_u32(out, crc32_of(out.data() + start, out.size() - start));
}

}  // namespace

void write_png_rgb(const std::filesystem::path& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb) {
    if (width <= 0 || height <= 0) throw DataError("png dimensions must be positive");
    if (rgb.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3)
        throw DataError("png pixel buffer size mismatch");

    // filter byte 0 (None) in front of each scanline
    const std::size_t stride = static_cast<std::size_t>(width) * 3;
    std::vector<std::uint8_t> raw((stride + 1) * static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        raw[static_cast<std::size_t>(y) * (stride + 1)] = 0;
        std::memcpy(raw.data() + static_cast<std::size_t>(y) * (stride + 1) + 1,
                    rgb.data() + static_cast<std::size_t>(y) * stride, stride);
    }

    uLongf comp_cap = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(comp_cap);
    if (compress2(comp.data(), &comp_cap, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw NumericError("png deflate failed");
    comp.resize(comp_cap);

    std::vector<std::uint8_t> file = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(width));
    put_u32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // color type: truecolor
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter
    ihdr.push_back(0);   // interlace
    append_chunk(file, "IHDR", ihdr);
    append_chunk(file, "IDAT", comp);
    append_chunk(file, "IEND", {});

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write png: " + path.string());
    out.write(reinterpret_cast<const char*>(file.data()), static_cast<std::streamsize>(file.size()));
    if (!out) throw DataError("png write failed: " + path.string());
}

}  // namespace wrenchval
