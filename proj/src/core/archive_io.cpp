// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/archive_io.hpp"

#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "core/error.hpp"

namespace ddc {

namespace {

constexpr uint16_t kFlagRangeF16 = 1u << 0;
constexpr uint8_t kMaxRank = 8;

size_t range_value_size(RangeDtype dtype) {
    return dtype == RangeDtype::F16 ? 2 : 4;
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(uint8_t(v));
    out.push_back(uint8_t(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

void put_f32(std::vector<uint8_t>& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

void put_range(std::vector<uint8_t>& out, double value, RangeDtype dtype) {
    if (dtype == RangeDtype::F16) {
        put_u16(out, float_to_f16_bits(float(value)));
    } else {
        put_f32(out, float(value));
    }
}

// Bounds-checked little-endian reader over the archive header.
struct Reader {
    std::span<const uint8_t> bytes;
    size_t pos = 0;

    void need(size_t count) const {
        if (count > bytes.size() - pos) {
            fail(Errc::format, "archive header truncated");
        }
    }
    uint8_t u8() {
        need(1);
        return bytes[pos++];
    }
    uint16_t u16() {
        need(2);
        uint16_t v = uint16_t(bytes[pos]) | uint16_t(bytes[pos + 1]) << 8;
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= uint32_t(bytes[pos + size_t(i)]) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t(bytes[pos + size_t(i)]) << (8 * i);
        pos += 8;
        return v;
    }
    float f32() {
        uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    double range(RangeDtype dtype) {
        if (dtype == RangeDtype::F16) {
            return double(f16_bits_to_float(u16()));
        }
        return double(f32());
    }
    std::string str(size_t count) {
        need(count);
        std::string s(reinterpret_cast<const char*>(bytes.data() + pos), count);
        pos += count;
        return s;
    }
};

} // namespace

uint64_t record_header_bytes(const CompressedTensor& record, RangeDtype range_dtype) {
    return 2 + record.name.size()                        // name
           + 3                                           // kind, dtype, rank
           + 8 * record.shape.size()                     // dims
           + 5                                           // patch_size, zero_bit_mode
           + 8 + record.bit_widths.size()                // unit count, bit widths
           + record.ranges.size() * range_value_size(range_dtype)
           + 4                                           // gamma
           + 16;                                         // blob offset, length
}

std::vector<uint8_t> encode_archive(const DeltaArchive& archive) {
    if (archive.records.empty()) {
        fail(Errc::invalid_argument, "refusing to write an empty archive");
    }
    std::vector<uint8_t> header;
    uint64_t blob_offset = 0;
    for (const auto& record : archive.records) {
        if (record.name.empty() || record.name.size() > UINT16_MAX) {
            fail(Errc::invalid_argument,
                 fmt::format("record name length {} unsupported", record.name.size()));
        }
        if (record.shape.size() > kMaxRank) {
            fail(Errc::invalid_argument,
                 fmt::format("tensor '{}' has rank {}, limit is {}", record.name,
                             record.shape.size(), kMaxRank));
        }
        if (record.ranges.size() != 2 * record.bit_widths.size()) {
            fail(Errc::internal,
                 fmt::format("record '{}' holds {} ranges for {} units", record.name,
                             record.ranges.size(), record.bit_widths.size()));
        }
        put_u16(header, uint16_t(record.name.size()));
        header.insert(header.end(), record.name.begin(), record.name.end());
        header.push_back(uint8_t(record.kind));
        header.push_back(uint8_t(record.dtype));
        header.push_back(uint8_t(record.shape.size()));
        for (int64_t dim : record.shape) put_u64(header, uint64_t(dim));
        put_u32(header, record.patch_size);
        header.push_back(uint8_t(record.zero_bit_mode));
        put_u64(header, record.bit_widths.size());
        header.insert(header.end(), record.bit_widths.begin(), record.bit_widths.end());
        for (double value : record.ranges) put_range(header, value, archive.range_dtype);
        put_f32(header, record.gamma);
        put_u64(header, blob_offset);
        put_u64(header, record.blob.size());
        blob_offset += record.blob.size();
    }

    std::vector<uint8_t> out;
    out.reserve(16 + header.size() + size_t(blob_offset));
    out.insert(out.end(), kArchiveMagic, kArchiveMagic + 4);
    put_u16(out, archive.version);
    put_u16(out, archive.range_dtype == RangeDtype::F16 ? kFlagRangeF16 : 0);
    put_u64(out, header.size());
    out.insert(out.end(), header.begin(), header.end());
    for (const auto& record : archive.records) {
        out.insert(out.end(), record.blob.begin(), record.blob.end());
    }
    return out;
}

DeltaArchive decode_archive(std::span<const uint8_t> bytes) {
    if (bytes.size() < 16) {
        fail(Errc::format, "truncated archive: shorter than the fixed preamble");
    }
    if (std::memcmp(bytes.data(), kArchiveMagic, 4) != 0) {
        fail(Errc::format, "not a delta archive (bad magic)");
    }
    Reader head{bytes, 4};
    const uint16_t version = head.u16();
    if (version != kArchiveVersion) {
        fail(Errc::format, fmt::format("unsupported archive version {}", version));
    }
    const uint16_t flags = head.u16();
    if ((flags & ~kFlagRangeF16) != 0) {
        fail(Errc::format, fmt::format("unrecognized archive flags {:#06x}", flags));
    }
    const uint64_t header_len = head.u64();
    if (header_len > bytes.size() - 16) {
        fail(Errc::format,
             fmt::format("archive header claims {} bytes, file holds {}", header_len,
                         bytes.size() - 16));
    }
    const std::span<const uint8_t> payload = bytes.subspan(16 + size_t(header_len));

    DeltaArchive archive;
    archive.version = version;
    archive.range_dtype = (flags & kFlagRangeF16) != 0 ? RangeDtype::F16 : RangeDtype::F32;
    Reader reader{bytes.first(16 + size_t(header_len)), 16};
    while (reader.pos < reader.bytes.size()) {
        CompressedTensor record;
        record.name = reader.str(reader.u16());
        if (record.name.empty()) {
            fail(Errc::format, "archive record with empty tensor name");
        }
        const uint8_t kind = reader.u8();
        if (kind > uint8_t(RecordKind::Svd)) {
            fail(Errc::format,
                 fmt::format("record '{}' has unknown kind {}", record.name, kind));
        }
        record.kind = RecordKind(kind);
        const uint8_t dtype = reader.u8();
        if (dtype > uint8_t(Dtype::BF16)) {
            fail(Errc::format,
                 fmt::format("record '{}' has unknown dtype {}", record.name, dtype));
        }
        record.dtype = Dtype(dtype);
        const uint8_t rank = reader.u8();
        if (rank > kMaxRank) {
            fail(Errc::format,
                 fmt::format("record '{}' has rank {}, limit is {}", record.name, rank,
                             kMaxRank));
        }
        uint64_t elements = 1;
        for (uint8_t i = 0; i < rank; ++i) {
            const uint64_t dim = reader.u64();
            if (dim == 0 || dim > (uint64_t(1) << 48) ||
                elements > (uint64_t(1) << 48) / dim) {
                fail(Errc::format,
                     fmt::format("record '{}' has implausible dimensions", record.name));
            }
            elements *= dim;
            record.shape.push_back(int64_t(dim));
        }
        record.patch_size = reader.u32();
        const uint8_t mode = reader.u8();
        if (mode > uint8_t(ZeroBitMode::DctMean)) {
            fail(Errc::format,
                 fmt::format("record '{}' has unknown zero-bit mode {}", record.name, mode));
        }
        record.zero_bit_mode = ZeroBitMode(mode);
        const uint64_t units = reader.u64();
        if (units > (uint64_t(1) << 32)) {
            fail(Errc::format,
                 fmt::format("record '{}' claims {} units", record.name, units));
        }
        record.bit_widths.resize(size_t(units));
        for (auto& w : record.bit_widths) w = reader.u8();
        record.ranges.resize(2 * size_t(units));
        for (auto& r : record.ranges) r = reader.range(archive.range_dtype);
        record.gamma = reader.f32();
        const uint64_t blob_offset = reader.u64();
        const uint64_t blob_len = reader.u64();
        if (blob_offset > payload.size() || blob_len > payload.size() - blob_offset) {
            fail(Errc::format,
                 fmt::format("blob for tensor '{}' at [{}, {}) exceeds payload ({} bytes); "
                             "file truncated or offsets corrupt",
                             record.name, blob_offset, blob_offset + blob_len,
                             payload.size()));
        }
        const auto blob = payload.subspan(size_t(blob_offset), size_t(blob_len));
        record.blob.assign(blob.begin(), blob.end());
        archive.records.push_back(std::move(record));
    }
    if (archive.records.empty()) {
        fail(Errc::format, "archive holds no records");
    }
    return archive;
}

void write_archive(const std::string& path, const DeltaArchive& archive) {
    const std::vector<uint8_t> bytes = encode_archive(archive);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        fail(Errc::io, fmt::format("cannot open '{}' for writing", path));
    }
    file.write(reinterpret_cast<const char*>(bytes.data()),
               std::streamsize(bytes.size()));
    if (!file) {
        fail(Errc::io, fmt::format("failed writing '{}'", path));
    }
}

DeltaArchive read_archive(const std::string& path) {
    std::ifstream file(path, std::ios::binary | std::ios::ate);
    if (!file) {
        fail(Errc::io, fmt::format("cannot open '{}'", path));
    }
    const std::streamsize size = file.tellg();
    file.seekg(0);
    std::vector<uint8_t> bytes(static_cast<size_t>(size));
    if (size > 0) {
        file.read(reinterpret_cast<char*>(bytes.data()), size);
    }
    if (!file) {
        fail(Errc::io, fmt::format("failed reading '{}'", path));
    }
    return decode_archive(bytes);
}

} // namespace ddc
