// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace ddc {

// Storage dtypes of checkpoint tensors. The enum values double as the dtype
// codes of the delta archive format, so they must not be reordered.
enum class Dtype : uint8_t {
    F32 = 0,
    F16 = 1,
    BF16 = 2,
};

// safetensors spelling: "F32", "F16", "BF16".
const char* dtype_name(Dtype dtype);
std::optional<Dtype> dtype_from_name(std::string_view name);
size_t dtype_size(Dtype dtype); // bytes per element

// Scalar conversions. Widening is exact; narrowing rounds to nearest, ties to
// even (NaNs are quieted, payload truncated).
float f16_bits_to_float(uint16_t bits);
uint16_t float_to_f16_bits(float value);
float bf16_bits_to_float(uint16_t bits);
uint16_t float_to_bf16_bits(float value);

// Buffer conversions between raw little-endian payloads and float32 working
// values. raw.size() must equal values.size() * dtype_size(dtype).
void widen_payload(Dtype dtype, std::span<const uint8_t> raw, std::span<float> values);
void narrow_payload(Dtype dtype, std::span<const float> values, std::span<uint8_t> raw);

} // namespace ddc
