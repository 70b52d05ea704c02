// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/safetensors.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "core/error.hpp"

namespace ddc {

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(Errc::io, fmt::format("cannot open '{}'", path));
    }
    in.seekg(0, std::ios::end);
    const auto size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<uint8_t> data(static_cast<size_t>(size));
    if (size > 0) in.read(reinterpret_cast<char*>(data.data()), size);
    if (!in) {
        fail(Errc::io, fmt::format("cannot read '{}'", path));
    }
    return data;
}

uint64_t read_u64_le(const uint8_t* p) {
    uint64_t v = 0;
    std::memcpy(&v, p, 8);
    return v;
}

} // namespace

Checkpoint load_checkpoint(const std::string& path) {
    const std::vector<uint8_t> file = read_file(path);
    if (file.size() < 8) {
        fail(Errc::format, fmt::format("'{}': malformed header (file too short)", path));
    }
    const uint64_t header_len = read_u64_le(file.data());
    if (header_len == 0 || header_len > file.size() - 8) {
        fail(Errc::format,
             fmt::format("'{}': malformed header (declared length {} exceeds file)", path,
                         header_len));
    }
    const auto header = nlohmann::ordered_json::parse(
        file.begin() + 8, file.begin() + 8 + ptrdiff_t(header_len), nullptr,
        /*allow_exceptions=*/false);
    if (header.is_discarded() || !header.is_object()) {
        fail(Errc::format, fmt::format("'{}': malformed header JSON", path));
    }

    const uint8_t* payload = file.data() + 8 + header_len;
    const uint64_t payload_size = file.size() - 8 - header_len;

    Checkpoint checkpoint;
    for (const auto& [name, desc] : header.items()) {
        if (name == "__metadata__") continue;
        if (!desc.is_object() || !desc.contains("dtype") || !desc.contains("shape") ||
            !desc.contains("data_offsets")) {
            fail(Errc::format, fmt::format("'{}': malformed entry for tensor '{}'", path, name));
        }
        const std::string dtype_str = desc["dtype"].get<std::string>();
        const auto dtype = dtype_from_name(dtype_str);
        if (!dtype) {
            fail(Errc::format,
                 fmt::format("'{}': unsupported dtype '{}' for tensor '{}'", path, dtype_str,
                             name));
        }
        std::vector<int64_t> shape;
        for (const auto& dim : desc["shape"]) {
            const int64_t d = dim.get<int64_t>();
            if (d <= 0) {
                fail(Errc::format,
                     fmt::format("'{}': non-positive dimension {} in tensor '{}'", path, d, name));
            }
            shape.push_back(d);
        }
        const auto& offsets = desc["data_offsets"];
        if (!offsets.is_array() || offsets.size() != 2) {
            fail(Errc::format, fmt::format("'{}': malformed data_offsets for tensor '{}'", path,
                                           name));
        }
        const uint64_t begin = offsets[0].get<uint64_t>();
        const uint64_t end = offsets[1].get<uint64_t>();
        if (begin > end || end > payload_size) {
            fail(Errc::format,
                 fmt::format("'{}': payload for tensor '{}' at [{}, {}) exceeds data section "
                             "({} bytes); file truncated or offsets corrupt",
                             path, name, begin, end, payload_size));
        }
        int64_t count = 1;
        for (int64_t d : shape) count *= d;
        if (end - begin != uint64_t(count) * dtype_size(*dtype)) {
            fail(Errc::format,
                 fmt::format("'{}': tensor '{}' spans {} bytes but shape implies {}", path, name,
                             end - begin, uint64_t(count) * dtype_size(*dtype)));
        }
        std::vector<float> values(static_cast<size_t>(count));
        widen_payload(*dtype, std::span(payload + begin, end - begin), values);
        checkpoint.add(name, Tensor{*dtype, std::move(shape), std::move(values)});
    }
    return checkpoint;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
    if (checkpoint.empty()) {
        fail(Errc::invalid_argument,
             fmt::format("refusing to write empty checkpoint to '{}'", path));
    }
    nlohmann::ordered_json header = nlohmann::ordered_json::object();
    uint64_t offset = 0;
    for (const auto& [name, tensor] : checkpoint) {
        const uint64_t nbytes = uint64_t(tensor.element_count()) * dtype_size(tensor.dtype);
        header[name] = {
            {"dtype", dtype_name(tensor.dtype)},
            {"shape", tensor.shape},
            {"data_offsets", {offset, offset + nbytes}},
        };
        offset += nbytes;
    }
    std::string header_text = header.dump();
    while (header_text.size() % 8 != 0) header_text.push_back(' ');

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        fail(Errc::io, fmt::format("cannot open '{}' for writing", path));
    }
    const uint64_t header_len = header_text.size();
    out.write(reinterpret_cast<const char*>(&header_len), 8);
    out.write(header_text.data(), ptrdiff_t(header_text.size()));
    std::vector<uint8_t> raw;
    for (const auto& [name, tensor] : checkpoint) {
        raw.resize(tensor.values.size() * dtype_size(tensor.dtype));
        narrow_payload(tensor.dtype, tensor.values, raw);
        out.write(reinterpret_cast<const char*>(raw.data()), ptrdiff_t(raw.size()));
    }
    out.flush();
    if (!out) {
        fail(Errc::io, fmt::format("failed writing '{}'", path));
    }
}

} // namespace ddc
