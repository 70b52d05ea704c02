// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "core/tensor.hpp"

namespace ddc {

/*
 * safetensors container:
 *
 *   u64 little-endian header length N
 *   N bytes of UTF-8 JSON: { "tensor.name": { "dtype": "F32"|"F16"|"BF16",
 *                                             "shape": [d0, d1, ...],
 *                                             "data_offsets": [begin, end] },
 *                            ..., "__metadata__": { ... } }
 *   raw little-endian tensor payload; data_offsets index into it
 *
 * Tensors are returned in the header's declared order. "__metadata__" is
 * ignored. Only the three floating dtypes above are accepted.
 */

Checkpoint load_checkpoint(const std::string& path);

// Writes tensors in map order with contiguous payload offsets; the header is
// space-padded to a multiple of 8 bytes. Refuses to write an empty map.
void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);

} // namespace ddc
