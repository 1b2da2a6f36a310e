#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "peagnn/errors.hpp"

namespace peagnn {

static_assert(std::endian::native == std::endian::little,
              "serialized array formats are little-endian; big-endian hosts need byte swaps");

template <typename T>
void write_array(const std::string& path, const std::vector<T>& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(T)));
    if (!out) throw IngestError("short write to " + path);
}

template <typename T>
std::vector<T> read_array(const std::string& path, std::size_t count) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot read " + path);
    std::vector<T> v(count);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(count * sizeof(T)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(T))
        throw IngestError(path + ": expected " + std::to_string(count * sizeof(T)) + " bytes");
    return v;
}

}  // namespace peagnn
