#include "wrenchval/nn/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>
#include <zlib.h>

#include "wrenchval/errors.hpp"

static_assert(std::endian::native == std::endian::little, "weight blob is little-endian");

namespace wrenchval::nn {

using nlohmann::json;

std::uint32_t crc32(const void* data, std::size_t n, std::uint32_t seed) {
    return static_cast<std::uint32_t>(
        ::crc32(seed, static_cast<const Bytef*>(data), static_cast<uInt>(n)));
}

namespace {
constexpr char kMagic[4] = {'W', 'V', 'M', '1'};
}

void save_model(const Model& model, const std::filesystem::path& path) {
    std::vector<float> blob;
    json table = json::array();
    for (const auto& [name, tensor] : model.params.tensors) {  // map order: deterministic
        json entry;
        entry["name"] = name;
        entry["shape"] = tensor.shape();
        entry["offset"] = blob.size();
        table.push_back(entry);
        blob.insert(blob.end(), tensor.data(), tensor.data() + tensor.size());
    }

    json header;
    header["format_version"] = 1;
    header["spec"] = model.spec.to_json();
    header["tensors"] = table;
    header["blob_size"] = blob.size();
    header["blob_crc32"] = crc32(blob.data(), blob.size() * sizeof(float));
    const std::string header_str = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path.string());
    out.write(kMagic, 4);
    const auto header_size = static_cast<std::uint32_t>(header_str.size());
    out.write(reinterpret_cast<const char*>(&header_size), sizeof header_size);
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    out.write(reinterpret_cast<const char*>(blob.data()),
              static_cast<std::streamsize>(blob.size() * sizeof(float)));
    if (!out) throw DataError("model write failed: " + path.string());
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path.string());

    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("not a model file (bad magic): " + path.string());

    std::uint32_t header_size = 0;
    in.read(reinterpret_cast<char*>(&header_size), sizeof header_size);
    if (in.gcount() != sizeof header_size) throw DataError("model file truncated: " + path.string());

    std::string header_str(header_size, '\0');
    in.read(header_str.data(), header_size);
    if (in.gcount() != static_cast<std::streamsize>(header_size))
        throw DataError("model file truncated: " + path.string());

    json header;
    try {
        header = json::parse(header_str);
    } catch (const json::exception& e) {
        throw DataError("model header is not valid JSON: " + std::string(e.what()));
    }
    const int version = header.value("format_version", -1);
    if (version != 1)
        throw DataError("unsupported model format_version " + std::to_string(version) + " in " +
                        path.string());

    Model model;
    std::size_t blob_size;
    std::uint32_t expect_crc;
    try {
        model.spec = ModelSpec::from_json(header.at("spec"));
        blob_size = header.at("blob_size").get<std::size_t>();
        expect_crc = header.at("blob_crc32").get<std::uint32_t>();
    } catch (const json::exception& e) {
        throw DataError("model header missing fields: " + std::string(e.what()));
    }

    std::vector<float> blob(blob_size);
    in.read(reinterpret_cast<char*>(blob.data()),
            static_cast<std::streamsize>(blob_size * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(blob_size * sizeof(float)))
        throw DataError("model weight blob truncated: " + path.string());
    if (crc32(blob.data(), blob.size() * sizeof(float)) != expect_crc)
        throw DataError("model weight checksum mismatch: " + path.string());

    try {
        for (const auto& entry : header.at("tensors")) {
            const auto name = entry.at("name").get<std::string>();
            const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
            const auto offset = entry.at("offset").get<std::size_t>();
            const std::size_t count = TensorF::checked_size(shape);
            if (offset + count > blob.size())
                throw DataError("tensor '" + name + "' overruns weight blob");
            model.params.tensors.emplace(
                name, TensorF(shape, std::vector<float>(blob.begin() + static_cast<std::ptrdiff_t>(offset),
                                                        blob.begin() + static_cast<std::ptrdiff_t>(offset + count))));
        }
    } catch (const json::exception& e) {
        throw DataError("model tensor table malformed: " + std::string(e.what()));
    }

    // cross-check the table against the architecture
    if (model.params.count() != parameter_count(model.spec))
        throw DataError("model parameters disagree with architecture: " + path.string());
    return model;
}

}  // namespace wrenchval::nn
