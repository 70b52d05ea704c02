// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/dtype.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include <fmt/format.h>

#include "core/error.hpp"

namespace ddc {

static_assert(std::endian::native == std::endian::little,
              "payload codecs assume a little-endian host");

const char* dtype_name(Dtype dtype) {
    switch (dtype) {
    case Dtype::F32: return "F32";
    case Dtype::F16: return "F16";
    case Dtype::BF16: return "BF16";
    }
    return "?";
}

std::optional<Dtype> dtype_from_name(std::string_view name) {
    if (name == "F32") return Dtype::F32;
    if (name == "F16") return Dtype::F16;
    if (name == "BF16") return Dtype::BF16;
    return std::nullopt;
}

size_t dtype_size(Dtype dtype) {
    return dtype == Dtype::F32 ? 4 : 2;
}

float f16_bits_to_float(uint16_t bits) {
    const uint32_t sign = (uint32_t(bits) & 0x8000u) << 16;
    const uint32_t exponent = (bits >> 10) & 0x1Fu;
    const uint32_t mantissa = bits & 0x3FFu;
    if (exponent == 0) {
        // Zero or subnormal: magnitude = mantissa * 2^-24, exact in float.
        const float magnitude = float(mantissa) * 0x1p-24f;
        return sign != 0 ? -magnitude : magnitude;
    }
    if (exponent == 31) {
        return std::bit_cast<float>(sign | 0x7F800000u | (mantissa << 13));
    }
    return std::bit_cast<float>(sign | ((exponent + 112u) << 23) | (mantissa << 13));
}

uint16_t float_to_f16_bits(float value) {
    const uint32_t fb = std::bit_cast<uint32_t>(value);
    const uint16_t sign = uint16_t((fb >> 16) & 0x8000u);
    const uint32_t magnitude = fb & 0x7FFFFFFFu;
    if (magnitude >= 0x7F800000u) { // inf or nan
        if (magnitude == 0x7F800000u) return uint16_t(sign | 0x7C00u);
        return uint16_t(sign | 0x7E00u | ((magnitude >> 13) & 0x1FFu));
    }
    const double a = std::fabs(double(value));
    if (a >= 65520.0) return uint16_t(sign | 0x7C00u); // rounds past the largest finite half
    // Quantize onto the half-precision grid: step 2^(e-10) for normals,
    // 2^-24 in the subnormal range. All double arithmetic below is exact.
    int exp2 = 0;
    std::frexp(a, &exp2);
    --exp2; // a = m * 2^exp2, m in [1, 2)
    const int step_exp = std::max(exp2 - 10, -24);
    const double units = std::nearbyint(std::ldexp(a, -step_exp)); // ties to even
    const double rounded = std::ldexp(units, step_exp);
    if (rounded == 0.0) return sign;
    if (rounded < 0x1p-14) { // subnormal result
        return uint16_t(sign | uint32_t(std::ldexp(rounded, 24)));
    }
    int rexp = 0;
    std::frexp(rounded, &rexp);
    --rexp;
    const uint32_t mantissa = uint32_t(std::ldexp(rounded, 10 - rexp)) - 1024u;
    return uint16_t(sign | uint32_t((rexp + 15) << 10) | mantissa);
}

float bf16_bits_to_float(uint16_t bits) {
    return std::bit_cast<float>(uint32_t(bits) << 16);
}

uint16_t float_to_bf16_bits(float value) {
    const uint32_t fb = std::bit_cast<uint32_t>(value);
    if ((fb & 0x7FFFFFFFu) > 0x7F800000u) { // nan: truncate payload, force quiet
        return uint16_t((fb >> 16) | 0x0040u);
    }
    const uint32_t rounding = 0x7FFFu + ((fb >> 16) & 1u);
    return uint16_t((fb + rounding) >> 16);
}

void widen_payload(Dtype dtype, std::span<const uint8_t> raw, std::span<float> values) {
    if (raw.size() != values.size() * dtype_size(dtype)) {
        fail(Errc::internal, fmt::format("payload size {} does not match {} {} elements",
                                         raw.size(), values.size(), dtype_name(dtype)));
    }
    switch (dtype) {
    case Dtype::F32:
        std::memcpy(values.data(), raw.data(), raw.size());
        break;
    case Dtype::F16:
        for (size_t i = 0; i < values.size(); ++i) {
            uint16_t bits;
            std::memcpy(&bits, raw.data() + 2 * i, 2);
            values[i] = f16_bits_to_float(bits);
        }
        break;
    case Dtype::BF16:
        for (size_t i = 0; i < values.size(); ++i) {
            uint16_t bits;
            std::memcpy(&bits, raw.data() + 2 * i, 2);
            values[i] = bf16_bits_to_float(bits);
        }
        break;
    }
}

void narrow_payload(Dtype dtype, std::span<const float> values, std::span<uint8_t> raw) {
    if (raw.size() != values.size() * dtype_size(dtype)) {
        fail(Errc::internal, fmt::format("payload size {} does not match {} {} elements",
                                         raw.size(), values.size(), dtype_name(dtype)));
    }
    switch (dtype) {
    case Dtype::F32:
        std::memcpy(raw.data(), values.data(), raw.size());
        break;
    case Dtype::F16:
        for (size_t i = 0; i < values.size(); ++i) {
            const uint16_t bits = float_to_f16_bits(values[i]);
            std::memcpy(raw.data() + 2 * i, &bits, 2);
        }
        break;
    case Dtype::BF16:
        for (size_t i = 0; i < values.size(); ++i) {
            const uint16_t bits = float_to_bf16_bits(values[i]);
            std::memcpy(raw.data() + 2 * i, &bits, 2);
        }
        break;
    }
}

} // namespace ddc
