// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ddc {

// A matrix split into p*p patches. The source is zero-padded at the bottom
// and right edges up to multiples of p; patches are stored in raster order
// (row-major over patch rows, then patch columns), row-major within a patch.
struct PatchGrid {
    int64_t rows = 0; // original extent
    int64_t cols = 0;
    int64_t padded_rows = 0;
    int64_t padded_cols = 0;
    uint32_t patch_size = 0;
    std::vector<float> data; // patch_count() * p * p values

    int64_t patch_rows() const { return padded_rows / patch_size; }
    int64_t patch_cols() const { return padded_cols / patch_size; }
    int64_t patch_count() const { return patch_rows() * patch_cols(); }
    std::span<const float> patch(int64_t k) const;
    std::span<float> patch(int64_t k);
};

PatchGrid patchlize(std::span<const float> values, int64_t rows, int64_t cols,
                    uint32_t patch_size);

// Inverse of patchlize: padded matrix reassembled, then cropped to the
// original extent. Exact round trip for any input.
std::vector<float> reassemble(const PatchGrid& grid);

// Per-patch importance: L2 (Frobenius) norm, accumulated in float64. Zero
// padding contributes nothing, and the scores are invariant under the
// orthonormal DCT up to float64 rounding.
std::vector<double> importance_scores(const PatchGrid& grid);

struct BitPlanLevel {
    uint32_t bits = 0; // 0..32
    double ratio = 0.0;
};

// Mixed-precision plan: bit-widths strictly decreasing, ratios in [0, 1]
// summing to 1 within 1e-9.
struct BitPlan {
    std::vector<BitPlanLevel> levels;

    void validate() const;
    std::string to_string() const;

    // Grammar: "bit:ratio,bit:ratio,..." e.g. "2:0.5,0:0.5".
    static BitPlan parse(std::string_view spec);
};

BitPlan default_bit_plan(); // 2:0.5,0:0.5

// Largest-remainder apportionment of patch_count patches over the plan's
// levels: floor(ratio*count) each, leftovers one apiece by descending
// fractional part, ties toward the higher bit-width.
std::vector<int64_t> level_counts(const BitPlan& plan, int64_t patch_count);

// Per-patch bit-widths: patches ranked by descending score (ties broken by
// ascending patch index), the first count[0] get levels[0].bits, and so on.
// Higher-scored patches never receive fewer bits than lower-scored ones.
std::vector<uint8_t> allocate_bits(std::span<const double> scores, const BitPlan& plan);

} // namespace ddc
