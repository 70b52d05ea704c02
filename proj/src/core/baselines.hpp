// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/quantize.hpp"

namespace ddc {

// Sign quantization: one bit per entry (1 iff value > 0, so zeros go
// negative) plus a single scale alpha = mean(|values|). Reconstruction is
// +alpha / -alpha.
struct SignCompressed {
    int64_t rows = 0;
    int64_t cols = 0;
    double alpha = 0.0;          // exact double mean; serialized as float32
    std::vector<uint8_t> bitmap; // LSB-first, row-major, zero-padded to a byte
};

SignCompressed sign_compress(std::span<const float> values, int64_t rows, int64_t cols);
std::vector<float> sign_reconstruct(const SignCompressed& sc);

// Contiguous singular-value ranks [rank_begin, rank_end) quantized at one
// width.
struct SvdGroup {
    uint32_t bits = 0;
    int64_t rank_begin = 0;
    int64_t rank_end = 0;

    int64_t rank_count() const { return rank_end - rank_begin; }
};

// Low-rank factorization delta = U * (S V^T) with per-column / per-row
// uniform round quantization of the factors, mixed across rank groups.
struct SvdMixedCompressed {
    int64_t rows = 0;
    int64_t cols = 0;
    std::vector<SvdGroup> groups;
    std::vector<QuantizedBlock> u_columns; // one per rank, group order, length rows
    std::vector<QuantizedBlock> vt_rows;   // one per rank, group order, length cols
};

// Default 8/3/2-bit groups with rank ratio 1:8:16, sized so the stored bits
// approximate a 1-bit-per-parameter budget, clamped to min(rows, cols).
std::vector<SvdGroup> default_svd_groups(int64_t rows, int64_t cols);

// Sign convention: the largest-magnitude entry of each U column (first one
// on ties) is made non-negative, with the matching S V^T row flipped too, so
// the factorization is deterministic up to the SVD backend.
SvdMixedCompressed svd_mixed_compress(std::span<const float> values, int64_t rows, int64_t cols,
                                      std::span<const SvdGroup> groups, RangeDtype range_dtype);
std::vector<float> svd_mixed_reconstruct(const SvdMixedCompressed& sc);

} // namespace ddc
