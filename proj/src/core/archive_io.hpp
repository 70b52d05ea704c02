// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0
//
// On-disk container for compressed checkpoint deltas.
//
//   magic "DDC1" | version u16 | flags u16 | header_len u64
//   header: one entry per record, in checkpoint order
//     name_len u16, name bytes
//     kind u8, dtype u8, rank u8, dims u64[rank]
//     patch_size u32, zero_bit_mode u8
//     unit_count u64, bit_widths u8[unit_count]
//     ranges: 2*unit_count values in the range dtype (f32 or f16)
//     gamma f32
//     blob_offset u64, blob_len u64   (relative to the payload section)
//   payload: concatenated record blobs
//
// All integers are little-endian. Flag bit 0 selects the range dtype
// (0 = f32, 1 = f16); the remaining bits are reserved and must be zero.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/codec.hpp"

namespace ddc {

inline constexpr char kArchiveMagic[4] = {'D', 'D', 'C', '1'};
inline constexpr uint16_t kArchiveVersion = 1;

// Serialized size of one record's header entry, in bytes.
uint64_t record_header_bytes(const CompressedTensor& record, RangeDtype range_dtype);

std::vector<uint8_t> encode_archive(const DeltaArchive& archive);
DeltaArchive decode_archive(std::span<const uint8_t> bytes);

void write_archive(const std::string& path, const DeltaArchive& archive);
DeltaArchive read_archive(const std::string& path);

} // namespace ddc
