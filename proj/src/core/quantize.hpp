// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ddc {

// Precision at which per-block lo/hi bounds are stored.
enum class RangeDtype : uint8_t {
    F32 = 0,
    F16 = 1,
};

// What a 0-bit block keeps: the mean of the spatial patch (reconstruction
// bypasses the inverse transform) or the mean of the DCT coefficients
// (reconstruction runs through it).
enum class ZeroBitMode : uint8_t {
    SpatialMean = 0,
    DctMean = 1,
};

// One uniformly quantized block.
//
// For bits B >= 1 the mapping is
//   step = (hi - lo) / (2^B - 1)
//   code = clamp(floor((x - lo) / step + 0.5), 0, 2^B - 1)
// i.e. round-half-away-from-zero on the non-negative normalized value, and
// dequantization returns lo + code * step. hi == lo degenerates to all-zero
// codes that dequantize to lo. For B == 0 no codes are stored and lo == hi
// holds the block's mean level.
struct QuantizedBlock {
    uint32_t bits = 0;
    double lo = 0.0; // canonical: exactly representable in the range dtype
    double hi = 0.0;
    std::vector<uint32_t> codes; // empty when bits == 0
};

// Narrows x to the range dtype and widens it back. f16 saturates to +/-65504
// so a degenerate bound can never become infinite.
double canonical_range_value(double x, RangeDtype range_dtype);

// Quantizes `values` (row-major DCT coefficients of one block) at the given
// width. `spatial_mean` is consulted only when bits == 0 in SpatialMean mode.
// Bounds are canonicalized to range_dtype before the code mapping so that a
// decoder reading the serialized bounds reproduces reconstruction exactly.
QuantizedBlock quantize_block(std::span<const double> values, uint32_t bits, ZeroBitMode mode,
                              double spatial_mean, RangeDtype range_dtype);

std::vector<double> dequantize_block(const QuantizedBlock& block, size_t count);

// Code packing: each code contributes its B bits starting at the least
// significant end of the stream; bit j of the stream lives in byte j/8 at
// position j%8. Multi-byte codes therefore land little-endian. The stream is
// padded with zero bits to a whole byte.
std::vector<uint8_t> pack_codes(std::span<const uint32_t> codes, uint32_t bits);
std::vector<uint32_t> unpack_codes(std::span<const uint8_t> bytes, uint32_t bits, size_t count);

// Packed size in bytes of `count` codes at width `bits`.
uint64_t packed_size(uint64_t count, uint32_t bits);

} // namespace ddc
