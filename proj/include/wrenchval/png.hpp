#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace wrenchval {

// Minimal 8-bit RGB PNG writer (zlib deflate). rgb is row-major, 3 bytes per
// pixel, size w*h*3. Deterministic output for identical input.
void write_png_rgb(const std::filesystem::path& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb);

}  // namespace wrenchval
