// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/quantize.hpp"

#include <cmath>

#include <fmt/format.h>

#include "core/dtype.hpp"
#include "core/error.hpp"

namespace ddc {

namespace {

double level_step(const QuantizedBlock& block) {
    return (block.hi - block.lo) / double((uint64_t(1) << block.bits) - 1);
}

} // namespace

double canonical_range_value(double x, RangeDtype range_dtype) {
    if (range_dtype == RangeDtype::F32) {
        return double(float(x));
    }
    const uint16_t bits = float_to_f16_bits(float(x));
    const float value = f16_bits_to_float(bits);
    if (!std::isfinite(value)) {
        return std::copysign(65504.0, x);
    }
    return double(value);
}

QuantizedBlock quantize_block(std::span<const double> values, uint32_t bits, ZeroBitMode mode,
                              double spatial_mean, RangeDtype range_dtype) {
    if (bits > 32) {
        fail(Errc::invalid_argument, fmt::format("bit-width {} exceeds 32", bits));
    }
    if (values.empty()) {
        fail(Errc::invalid_argument, "cannot quantize an empty block");
    }
    QuantizedBlock block;
    block.bits = bits;
    if (bits == 0) {
        double level;
        if (mode == ZeroBitMode::SpatialMean) {
            level = spatial_mean;
        } else {
            double acc = 0.0;
            for (double v : values) acc += v;
            level = acc / double(values.size());
        }
        if (!std::isfinite(level)) {
            fail(Errc::invalid_argument, "non-finite input values");
        }
        block.lo = block.hi = canonical_range_value(level, range_dtype);
        return block;
    }

    double lo = values[0], hi = values[0];
    for (double v : values) {
        if (!std::isfinite(v)) {
            fail(Errc::invalid_argument, "non-finite input values");
        }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    block.lo = canonical_range_value(lo, range_dtype);
    block.hi = canonical_range_value(hi, range_dtype);
    block.codes.resize(values.size(), 0);
    if (block.hi > block.lo) {
        const double step = level_step(block);
        const double top = double((uint64_t(1) << bits) - 1);
        for (size_t i = 0; i < values.size(); ++i) {
            const double q = std::floor((values[i] - block.lo) / step + 0.5);
            block.codes[i] = q <= 0.0 ? 0u : (q >= top ? uint32_t(top) : uint32_t(q));
        }
    }
    return block;
}

std::vector<double> dequantize_block(const QuantizedBlock& block, size_t count) {
    if (block.bits == 0) {
        if (!block.codes.empty()) {
            fail(Errc::mismatch, "zero-bit block carries codes");
        }
        return std::vector<double>(count, block.lo);
    }
    if (block.codes.size() != count) {
        fail(Errc::mismatch, fmt::format("block has {} codes, expected {}", block.codes.size(),
                                         count));
    }
    std::vector<double> values(count, block.lo);
    if (block.hi > block.lo) {
        const double step = level_step(block);
        const uint64_t top = (uint64_t(1) << block.bits) - 1;
        for (size_t i = 0; i < count; ++i) {
            if (block.codes[i] > top) {
                fail(Errc::format,
                     fmt::format("code {} out of range for {}-bit block", block.codes[i],
                                 block.bits));
            }
            values[i] = block.lo + double(block.codes[i]) * step;
        }
    }
    return values;
}

uint64_t packed_size(uint64_t count, uint32_t bits) {
    return (count * bits + 7) / 8;
}

std::vector<uint8_t> pack_codes(std::span<const uint32_t> codes, uint32_t bits) {
    if (bits == 0) return {};
    if (bits > 32) {
        fail(Errc::invalid_argument, fmt::format("bit-width {} exceeds 32", bits));
    }
    const uint64_t top = (uint64_t(1) << bits) - 1;
    std::vector<uint8_t> bytes;
    bytes.reserve(packed_size(codes.size(), bits));
    uint64_t acc = 0;
    uint32_t filled = 0;
    for (uint32_t code : codes) {
        if (code > top) {
            fail(Errc::invalid_argument,
                 fmt::format("code {} does not fit in {} bits", code, bits));
        }
        acc |= uint64_t(code) << filled;
        filled += bits;
        while (filled >= 8) {
            bytes.push_back(uint8_t(acc & 0xFF));
            acc >>= 8;
            filled -= 8;
        }
    }
    if (filled > 0) {
        bytes.push_back(uint8_t(acc & 0xFF));
    }
    return bytes;
}

std::vector<uint32_t> unpack_codes(std::span<const uint8_t> bytes, uint32_t bits, size_t count) {
    if (bits == 0) return {};
    if (bits > 32) {
        fail(Errc::invalid_argument, fmt::format("bit-width {} exceeds 32", bits));
    }
    if (bytes.size() < packed_size(count, bits)) {
        fail(Errc::format, fmt::format("byte stream holds {} bytes, {} codes of {} bits need {}",
                                       bytes.size(), count, bits, packed_size(count, bits)));
    }
    const uint64_t mask = (uint64_t(1) << bits) - 1;
    std::vector<uint32_t> codes(count);
    uint64_t acc = 0;
    uint32_t filled = 0;
    size_t next_byte = 0;
    for (size_t i = 0; i < count; ++i) {
        while (filled < bits) {
            acc |= uint64_t(bytes[next_byte++]) << filled;
            filled += 8;
        }
        codes[i] = uint32_t(acc & mask);
        acc >>= bits;
        filled -= bits;
    }
    return codes;
}

} // namespace ddc
