// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/baselines.hpp"
#include "core/delta.hpp"
#include "core/patch.hpp"
#include "core/quantize.hpp"
#include "core/tensor.hpp"

namespace ddc {

enum class Method : uint8_t {
    Dct = 1,
    Sign = 2,
    Svd = 3,
};

const char* method_name(Method method);

struct CompressConfig {
    Method method = Method::Dct;
    uint32_t patch_size = 16;
    BitPlan plan = default_bit_plan();
    RangeDtype range_dtype = RangeDtype::F32;
    ZeroBitMode zero_bit_mode = ZeroBitMode::SpatialMean;
    std::vector<std::string> passthrough_patterns = default_passthrough_patterns();
    std::vector<SvdGroup> svd_groups; // empty = sized per tensor
    uint32_t threads = 0;             // 0 = all cores; never affects outputs

    void validate() const;
};

// On-disk record kinds; values are the archive's kind bytes.
enum class RecordKind : uint8_t {
    Raw = 0,  // passthrough tensor, blob = raw payload in `dtype`
    Dct = 1,  // patchwise mixed-precision DCT codes
    Sign = 2, // 1-bit sign bitmap, gamma holds the scale alpha
    Svd = 3,  // quantized low-rank factors: U columns then S*V^T rows
};

// One archive record. For Dct, `bit_widths`/`ranges` are per patch in raster
// order and `blob` is the per-patch byte-aligned code streams concatenated.
// For Svd the units are the 2R quantized factor vectors (R = widths/2, U
// columns of length rows first, then S*V^T rows of length cols).
struct CompressedTensor {
    std::string name;
    RecordKind kind = RecordKind::Raw;
    Dtype dtype = Dtype::F32;
    std::vector<int64_t> shape;
    uint32_t patch_size = 0;
    ZeroBitMode zero_bit_mode = ZeroBitMode::SpatialMean;
    std::vector<uint8_t> bit_widths;
    std::vector<double> ranges; // lo,hi pairs, canonical in the range dtype
    float gamma = 1.0f;         // Dct rescale factor; Sign scale; 1 otherwise
    std::vector<uint8_t> blob;

    int64_t rows() const { return shape.size() == 2 ? shape[0] : 0; }
    int64_t cols() const { return shape.size() == 2 ? shape[1] : 0; }
    int64_t element_count() const;
};

struct DeltaArchive {
    uint16_t version = 1;
    RangeDtype range_dtype = RangeDtype::F32;
    std::vector<CompressedTensor> records; // fine-tuned checkpoint order
};

// Patchwise mixed-precision DCT compression of one delta matrix:
// patchlize, score, allocate widths, per-patch DCT + uniform quantization,
// then gamma = sum|delta| / sum|reconstruction| computed from the stored
// representation (gamma = 1 if either sum is zero).
CompressedTensor compress_tensor(const DeltaMatrix& delta, const CompressConfig& config);

// Decodes one record back to the delta matrix (gamma applied), float32
// working precision, original (cropped) extent.
std::vector<float> reconstruct_tensor(const CompressedTensor& record);

// Full pipeline: delta partition, per-tensor compression on `threads`
// workers, passthrough tensors stored raw. Record order follows the
// fine-tuned checkpoint.
DeltaArchive compress_checkpoint(const Checkpoint& base, const Checkpoint& finetuned,
                                 const CompressConfig& config);

// base + reconstructed deltas; passthrough records are restored verbatim.
// Output order and dtypes follow the archive records.
Checkpoint apply_archive(const Checkpoint& base, const DeltaArchive& archive);

// Per-patch blob extents of a Dct record (and per-unit extents of an Svd
// record): byte offset of each unit's code stream within the blob.
std::vector<uint64_t> blob_offsets(const CompressedTensor& record);

// The factor groups the Svd method uses for a rows x cols tensor: the
// configured groups clamped to the matrix rank, or the default split when
// none are configured. Shared with storage accounting.
std::vector<SvdGroup> resolve_svd_groups(const CompressConfig& config, int64_t rows,
                                         int64_t cols);

} // namespace ddc
