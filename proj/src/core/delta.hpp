// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "core/tensor.hpp"

namespace ddc {

// Elementwise difference of one weight matrix, float32 working precision.
struct DeltaMatrix {
    std::string name;
    Dtype dtype = Dtype::F32; // dtype of the fine-tuned tensor
    int64_t rows = 0;
    int64_t cols = 0;
    std::vector<float> values; // row-major, fine-tuned minus base
    size_t source_index = 0;   // position in the fine-tuned checkpoint
};

// Tensor carried through uncompressed (1-D, small, or pattern-matched).
struct PassthroughTensor {
    std::string name;
    Tensor tensor; // copy of the fine-tuned tensor
    size_t source_index = 0;
};

struct DeltaSet {
    std::vector<DeltaMatrix> compressible;
    std::vector<PassthroughTensor> passthrough;
};

struct DeltaOptions {
    // 2-D tensors need both dimensions >= min_dim to be compressible.
    int64_t min_dim = 1;
    std::vector<std::string> passthrough_patterns;
};

// Glob with '*' (any run) and '?' (any one character).
bool glob_match(std::string_view pattern, std::string_view text);

// Embedding and head matrices carry token-identity structure that patchwise
// transforms handle poorly, so they default to passthrough.
std::vector<std::string> default_passthrough_patterns();

// Splits finetuned - base into compressible matrices and passthrough tensors.
// The tensor name sets must be equal and shapes/dtypes must match per name.
// Both partitions preserve the fine-tuned checkpoint's order.
DeltaSet compute_delta(const Checkpoint& finetuned, const Checkpoint& base,
                       const DeltaOptions& options);

} // namespace ddc
