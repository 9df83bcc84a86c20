#pragma once

#include <filesystem>

#include "wrenchval/nn/graph.hpp"

namespace wrenchval::nn {

// Model file: magic + format version, JSON graph description with a per-tensor
// offset table, then a little-endian f32 weight blob guarded by a CRC32.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

std::uint32_t crc32(const void* data, std::size_t n, std::uint32_t seed = 0);

}  // namespace wrenchval::nn
