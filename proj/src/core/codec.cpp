// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/codec.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "core/dct.hpp"
#include "core/error.hpp"
#include "core/parallel.hpp"

namespace ddc {

const char* method_name(Method method) {
    switch (method) {
    case Method::Dct: return "dct";
    case Method::Sign: return "sign";
    case Method::Svd: return "svd";
    }
    return "?";
}

void CompressConfig::validate() const {
    if (patch_size == 0) {
        fail(Errc::invalid_argument, "patch size must be positive");
    }
    plan.validate();
    uint32_t prev_bits = 33;
    for (const auto& group : svd_groups) {
        if (group.bits < 1 || group.bits > 32) {
            fail(Errc::invalid_argument,
                 fmt::format("svd group bit-width {} outside 1..32", group.bits));
        }
        if (group.bits >= prev_bits) {
            fail(Errc::invalid_argument, "svd group bit-widths must be strictly decreasing");
        }
        if (group.rank_count() < 0) {
            fail(Errc::invalid_argument, "svd group rank count must be non-negative");
        }
        prev_bits = group.bits;
    }
}

int64_t CompressedTensor::element_count() const {
    int64_t count = 1;
    for (int64_t dim : shape) count *= dim;
    return count;
}

std::vector<SvdGroup> resolve_svd_groups(const CompressConfig& config, int64_t rows,
                                         int64_t cols) {
    if (config.svd_groups.empty()) {
        return default_svd_groups(rows, cols);
    }
    const int64_t max_rank = std::min(rows, cols);
    std::vector<SvdGroup> groups;
    for (const auto& group : config.svd_groups) {
        SvdGroup clamped{group.bits, std::min(group.rank_begin, max_rank),
                         std::min(group.rank_end, max_rank)};
        if (clamped.rank_count() > 0) groups.push_back(clamped);
    }
    return groups;
}

std::vector<uint64_t> blob_offsets(const CompressedTensor& record) {
    std::vector<uint64_t> offsets(record.bit_widths.size() + 1, 0);
    for (size_t k = 0; k < record.bit_widths.size(); ++k) {
        uint64_t unit_values = 0;
        switch (record.kind) {
        case RecordKind::Dct:
            unit_values = uint64_t(record.patch_size) * record.patch_size;
            break;
        case RecordKind::Svd:
            unit_values = k < record.bit_widths.size() / 2 ? uint64_t(record.rows())
                                                           : uint64_t(record.cols());
            break;
        default:
            fail(Errc::invalid_argument, "record kind has no per-unit blob layout");
        }
        offsets[k + 1] = offsets[k] + packed_size(unit_values, record.bit_widths[k]);
    }
    return offsets;
}

namespace {

void check_finite(const DeltaMatrix& delta) {
    for (float v : delta.values) {
        if (!std::isfinite(v)) {
            fail(Errc::invalid_argument,
                 fmt::format("non-finite values in delta for tensor '{}'", delta.name));
        }
    }
}

// Decodes the patchwise representation back to the cropped spatial delta,
// without the gamma rescale. Shared by reconstruction and by compression,
// which derives gamma from exactly what a decoder will see.
std::vector<float> reconstruct_dct_unscaled(const CompressedTensor& record) {
    const uint32_t p = record.patch_size;
    if (record.shape.size() != 2 || record.rows() <= 0 || record.cols() <= 0 || p == 0) {
        fail(Errc::format, fmt::format("record '{}' has invalid patch geometry", record.name));
    }
    PatchGrid grid;
    grid.rows = record.rows();
    grid.cols = record.cols();
    grid.padded_rows = (grid.rows + p - 1) / p * p;
    grid.padded_cols = (grid.cols + p - 1) / p * p;
    grid.patch_size = p;
    const int64_t patches = grid.patch_count();
    const size_t area = size_t(p) * p;
    if (int64_t(record.bit_widths.size()) != patches ||
        record.ranges.size() != 2 * size_t(patches)) {
        fail(Errc::format,
             fmt::format("record '{}' holds {} patch widths, expected {}", record.name,
                         record.bit_widths.size(), patches));
    }
    const std::vector<uint64_t> offsets = blob_offsets(record);
    if (offsets.back() != record.blob.size()) {
        fail(Errc::format,
             fmt::format("corrupt blob for tensor '{}': {} bytes, layout implies {}",
                         record.name, record.blob.size(), offsets.back()));
    }

    grid.data.resize(size_t(patches) * area);
    const DctBasis& basis = dct_basis(p);
    std::vector<double> coeffs(area);
    std::vector<double> spatial(area);
    for (int64_t k = 0; k < patches; ++k) {
        QuantizedBlock block;
        block.bits = record.bit_widths[size_t(k)];
        block.lo = record.ranges[2 * size_t(k)];
        block.hi = record.ranges[2 * size_t(k) + 1];
        auto patch_out = grid.patch(k);
        if (block.bits == 0 && record.zero_bit_mode == ZeroBitMode::SpatialMean) {
            // The stored level is already spatial; no inverse transform.
            for (size_t i = 0; i < area; ++i) patch_out[i] = float(block.lo);
            continue;
        }
        block.codes = unpack_codes(
            std::span(record.blob).subspan(offsets[size_t(k)],
                                           offsets[size_t(k) + 1] - offsets[size_t(k)]),
            block.bits, area);
        const std::vector<double> deq = dequantize_block(block, area);
        std::copy(deq.begin(), deq.end(), coeffs.begin());
        idct2(basis, coeffs, spatial);
        for (size_t i = 0; i < area; ++i) patch_out[i] = float(spatial[i]);
    }
    return reassemble(grid);
}

std::vector<float> reconstruct_sign(const CompressedTensor& record) {
    if (record.shape.size() != 2 || record.rows() <= 0 || record.cols() <= 0) {
        fail(Errc::format, fmt::format("record '{}' has invalid geometry", record.name));
    }
    SignCompressed sc;
    sc.rows = record.rows();
    sc.cols = record.cols();
    sc.alpha = double(record.gamma);
    sc.bitmap = record.blob;
    if (sc.bitmap.size() != (size_t(sc.rows) * size_t(sc.cols) + 7) / 8) {
        fail(Errc::format,
             fmt::format("corrupt blob for tensor '{}': sign bitmap length mismatch",
                         record.name));
    }
    return sign_reconstruct(sc);
}

std::vector<float> reconstruct_svd(const CompressedTensor& record) {
    if (record.shape.size() != 2 || record.rows() <= 0 || record.cols() <= 0 ||
        record.bit_widths.size() % 2 != 0 ||
        record.ranges.size() != 2 * record.bit_widths.size()) {
        fail(Errc::format, fmt::format("record '{}' has invalid factor layout", record.name));
    }
    const size_t ranks = record.bit_widths.size() / 2;
    const std::vector<uint64_t> offsets = blob_offsets(record);
    if (offsets.back() != record.blob.size()) {
        fail(Errc::format,
             fmt::format("corrupt blob for tensor '{}': {} bytes, layout implies {}",
                         record.name, record.blob.size(), offsets.back()));
    }
    SvdMixedCompressed sc;
    sc.rows = record.rows();
    sc.cols = record.cols();
    for (size_t unit = 0; unit < record.bit_widths.size(); ++unit) {
        QuantizedBlock block;
        block.bits = record.bit_widths[unit];
        block.lo = record.ranges[2 * unit];
        block.hi = record.ranges[2 * unit + 1];
        const size_t count = unit < ranks ? size_t(sc.rows) : size_t(sc.cols);
        block.codes = unpack_codes(
            std::span(record.blob).subspan(offsets[unit], offsets[unit + 1] - offsets[unit]),
            block.bits, count);
        (unit < ranks ? sc.u_columns : sc.vt_rows).push_back(std::move(block));
    }
    return svd_mixed_reconstruct(sc);
}

CompressedTensor sign_record(const DeltaMatrix& delta) {
    const SignCompressed sc = sign_compress(delta.values, delta.rows, delta.cols);
    CompressedTensor record;
    record.name = delta.name;
    record.kind = RecordKind::Sign;
    record.dtype = delta.dtype;
    record.shape = {delta.rows, delta.cols};
    record.gamma = float(sc.alpha);
    record.blob = sc.bitmap;
    return record;
}

CompressedTensor svd_record(const DeltaMatrix& delta, const CompressConfig& config) {
    const std::vector<SvdGroup> groups =
        resolve_svd_groups(config, delta.rows, delta.cols);
    const SvdMixedCompressed sc =
        svd_mixed_compress(delta.values, delta.rows, delta.cols, groups, config.range_dtype);
    CompressedTensor record;
    record.name = delta.name;
    record.kind = RecordKind::Svd;
    record.dtype = delta.dtype;
    record.shape = {delta.rows, delta.cols};
    auto append_unit = [&](const QuantizedBlock& block) {
        record.bit_widths.push_back(uint8_t(block.bits));
        record.ranges.push_back(block.lo);
        record.ranges.push_back(block.hi);
        const std::vector<uint8_t> bytes = pack_codes(block.codes, block.bits);
        record.blob.insert(record.blob.end(), bytes.begin(), bytes.end());
    };
    for (const auto& block : sc.u_columns) append_unit(block);
    for (const auto& block : sc.vt_rows) append_unit(block);
    return record;
}

CompressedTensor raw_record(const PassthroughTensor& pt) {
    CompressedTensor record;
    record.name = pt.name;
    record.kind = RecordKind::Raw;
    record.dtype = pt.tensor.dtype;
    record.shape = pt.tensor.shape;
    record.blob.resize(pt.tensor.values.size() * dtype_size(pt.tensor.dtype));
    narrow_payload(pt.tensor.dtype, pt.tensor.values, record.blob);
    return record;
}

} // namespace

CompressedTensor compress_tensor(const DeltaMatrix& delta, const CompressConfig& config) {
    config.validate();
    check_finite(delta);
    const uint32_t p = config.patch_size;
    const PatchGrid grid = patchlize(delta.values, delta.rows, delta.cols, p);
    const std::vector<double> scores = importance_scores(grid);
    const std::vector<uint8_t> widths = allocate_bits(scores, config.plan);

    CompressedTensor record;
    record.name = delta.name;
    record.kind = RecordKind::Dct;
    record.dtype = delta.dtype;
    record.shape = {delta.rows, delta.cols};
    record.patch_size = p;
    record.zero_bit_mode = config.zero_bit_mode;
    record.bit_widths = widths;
    record.ranges.reserve(2 * widths.size());

    const DctBasis& basis = dct_basis(p);
    const size_t area = size_t(p) * p;
    std::vector<double> patch(area);
    std::vector<double> coeffs(area);
    for (int64_t k = 0; k < grid.patch_count(); ++k) {
        const auto spatial = grid.patch(k);
        double mean_acc = 0.0;
        for (size_t i = 0; i < area; ++i) {
            patch[i] = double(spatial[i]);
            mean_acc += patch[i];
        }
        dct2(basis, patch, coeffs);
        const QuantizedBlock block =
            quantize_block(coeffs, widths[size_t(k)], config.zero_bit_mode,
                           mean_acc / double(area), config.range_dtype);
        record.ranges.push_back(block.lo);
        record.ranges.push_back(block.hi);
        const std::vector<uint8_t> bytes = pack_codes(block.codes, block.bits);
        record.blob.insert(record.blob.end(), bytes.begin(), bytes.end());
    }

    // Rescale factor, from the stored representation so the decode path
    // reproduces it bit for bit.
    const std::vector<float> unscaled = reconstruct_dct_unscaled(record);
    double sum_abs_delta = 0.0;
    for (float v : delta.values) sum_abs_delta += std::fabs(double(v));
    double sum_abs_recon = 0.0;
    for (float v : unscaled) sum_abs_recon += std::fabs(double(v));
    record.gamma = (sum_abs_delta == 0.0 || sum_abs_recon == 0.0)
                       ? 1.0f
                       : float(sum_abs_delta / sum_abs_recon);
    return record;
}

std::vector<float> reconstruct_tensor(const CompressedTensor& record) {
    switch (record.kind) {
    case RecordKind::Dct: {
        std::vector<float> values = reconstruct_dct_unscaled(record);
        for (float& v : values) {
            v = float(double(v) * double(record.gamma));
        }
        return values;
    }
    case RecordKind::Sign:
        return reconstruct_sign(record);
    case RecordKind::Svd:
        return reconstruct_svd(record);
    case RecordKind::Raw:
        break;
    }
    fail(Errc::invalid_argument,
         fmt::format("passthrough record '{}' has no delta to reconstruct", record.name));
}

DeltaArchive compress_checkpoint(const Checkpoint& base, const Checkpoint& finetuned,
                                 const CompressConfig& config) {
    config.validate();
    DeltaOptions options;
    options.min_dim = config.method == Method::Dct ? int64_t(config.patch_size) : 1;
    options.passthrough_patterns = config.passthrough_patterns;
    const DeltaSet deltas = compute_delta(finetuned, base, options);

    DeltaArchive archive;
    archive.range_dtype = config.range_dtype;
    archive.records.resize(finetuned.size());
    for (const auto& pt : deltas.passthrough) {
        archive.records[pt.source_index] = raw_record(pt);
    }
    parallel_for(config.threads, int64_t(deltas.compressible.size()), [&](int64_t i) {
        const DeltaMatrix& delta = deltas.compressible[size_t(i)];
        CompressedTensor record;
        switch (config.method) {
        case Method::Dct:
            record = compress_tensor(delta, config);
            break;
        case Method::Sign:
            record = sign_record(delta);
            break;
        case Method::Svd:
            record = svd_record(delta, config);
            break;
        }
        archive.records[delta.source_index] = std::move(record);
    });
    return archive;
}

Checkpoint apply_archive(const Checkpoint& base, const DeltaArchive& archive) {
    Checkpoint output;
    for (const auto& record : archive.records) {
        if (record.kind == RecordKind::Raw) {
            std::vector<float> values(size_t(record.element_count()));
            if (record.blob.size() != values.size() * dtype_size(record.dtype)) {
                fail(Errc::format,
                     fmt::format("corrupt blob for passthrough tensor '{}'", record.name));
            }
            widen_payload(record.dtype, record.blob, values);
            output.add(record.name, Tensor{record.dtype, record.shape, std::move(values)});
            continue;
        }
        const Tensor* bt = base.find(record.name);
        if (bt == nullptr) {
            fail(Errc::mismatch,
                 fmt::format("base checkpoint lacks tensor '{}'", record.name));
        }
        if (bt->shape != record.shape) {
            fail(Errc::mismatch, fmt::format("shape mismatch for tensor '{}'", record.name));
        }
        if (bt->dtype != record.dtype) {
            fail(Errc::mismatch,
                 fmt::format("dtype mismatch for tensor '{}' ({} vs {})", record.name,
                             dtype_name(record.dtype), dtype_name(bt->dtype)));
        }
        const std::vector<float> delta = reconstruct_tensor(record);
        std::vector<float> values(delta.size());
        for (size_t i = 0; i < delta.size(); ++i) {
            values[i] = float(double(bt->values[i]) + double(delta[i]));
        }
        output.add(record.name, Tensor{record.dtype, record.shape, std::move(values)});
    }
    return output;
}

} // namespace ddc
