// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "core/error.hpp"

namespace ddc {

void FidelityAccumulator::add(std::span<const float> original,
                              std::span<const float> reconstructed) {
    if (original.size() != reconstructed.size()) {
        fail(Errc::mismatch,
             fmt::format("fidelity inputs hold {} and {} values", original.size(),
                         reconstructed.size()));
    }
    for (size_t i = 0; i < original.size(); ++i) {
        const double a = double(original[i]);
        const double b = double(reconstructed[i]);
        const double diff = a - b;
        dot_ += a * b;
        sum_sq_original_ += a * a;
        sum_sq_reconstructed_ += b * b;
        sum_sq_diff_ += diff * diff;
        sum_abs_diff_ += std::fabs(diff);
        max_abs_diff_ = std::max(max_abs_diff_, std::fabs(diff));
    }
    count_ += original.size();
}

Fidelity FidelityAccumulator::finalize() const {
    Fidelity out;
    out.max_abs = max_abs_diff_;
    out.mean_abs = count_ == 0 ? 0.0 : sum_abs_diff_ / double(count_);
    const double norm_original = std::sqrt(sum_sq_original_);
    const double norm_reconstructed = std::sqrt(sum_sq_reconstructed_);
    if (norm_original > 0.0) {
        out.frobenius_relative = std::sqrt(sum_sq_diff_) / norm_original;
    } else {
        out.frobenius_relative = sum_sq_diff_ == 0.0 ? 0.0 : 1.0;
    }
    if (norm_original > 0.0 && norm_reconstructed > 0.0) {
        out.cosine = std::clamp(dot_ / (norm_original * norm_reconstructed), -1.0, 1.0);
    } else {
        out.cosine = (norm_original == 0.0 && norm_reconstructed == 0.0) ? 1.0 : 0.0;
    }
    return out;
}

Fidelity fidelity(std::span<const float> original, std::span<const float> reconstructed) {
    FidelityAccumulator acc;
    acc.add(original, reconstructed);
    return acc.finalize();
}

std::vector<HistogramBin> histogram(std::span<const float> values, uint32_t bins,
                                    std::optional<std::pair<double, double>> range) {
    if (values.empty()) {
        fail(Errc::invalid_argument, "cannot histogram an empty tensor");
    }
    if (bins == 0) {
        fail(Errc::invalid_argument, "histogram needs at least one bin");
    }
    double lo;
    double hi;
    if (range.has_value()) {
        lo = range->first;
        hi = range->second;
        if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
            fail(Errc::invalid_argument,
                 fmt::format("invalid histogram range [{}, {}]", lo, hi));
        }
    } else {
        lo = double(values[0]);
        hi = double(values[0]);
        for (float v : values) {
            if (!std::isfinite(v)) {
                fail(Errc::invalid_argument, "cannot histogram non-finite values");
            }
            lo = std::min(lo, double(v));
            hi = std::max(hi, double(v));
        }
    }

    std::vector<HistogramBin> out(bins);
    const double width = (hi - lo) / double(bins);
    for (uint32_t i = 0; i < bins; ++i) {
        out[i].left = lo + double(i) * width;
        out[i].right = lo + double(i + 1) * width;
    }
    out.front().left = lo;
    out.back().right = hi;
    for (float v : values) {
        size_t index = bins - 1;
        if (width > 0.0 && double(v) < hi) {
            const double offset = (double(v) - lo) / width;
            index = offset <= 0.0 ? 0 : std::min(size_t(offset), size_t(bins - 1));
        }
        ++out[index].count;
    }
    return out;
}

namespace {

uint64_t range_value_bits(RangeDtype dtype) {
    return dtype == RangeDtype::F16 ? 16 : 32;
}

void finalize_entry(StorageEntry& entry) {
    const double params = double(entry.params);
    entry.bits_per_param = double(entry.payload_bits + entry.range_bits) / params;
    entry.total_bits_per_param = double(entry.payload_bits + entry.range_bits +
                                        entry.scale_bits + entry.header_bits) /
                                 params;
    entry.alpha16 = entry.bits_per_param / 16.0;
    entry.alpha32 = entry.bits_per_param / 32.0;
}

} // namespace

StorageReport storage_from_archive(const DeltaArchive& archive) {
    StorageReport report;
    report.total.name = "TOTAL";
    uint64_t header_bytes = 0;
    for (const auto& record : archive.records) {
        StorageEntry entry;
        entry.name = record.name;
        entry.params = uint64_t(record.element_count());
        entry.payload_bits = uint64_t(record.blob.size()) * 8;
        entry.range_bits = uint64_t(record.ranges.size()) * range_value_bits(archive.range_dtype);
        entry.scale_bits = 32;
        const uint64_t entry_bytes = record_header_bytes(record, archive.range_dtype);
        entry.header_bits = entry_bytes * 8 - entry.range_bits - entry.scale_bits;
        finalize_entry(entry);

        report.total.params += entry.params;
        report.total.payload_bits += entry.payload_bits;
        report.total.range_bits += entry.range_bits;
        report.total.scale_bits += entry.scale_bits;
        report.total.header_bits += entry.header_bits;
        header_bytes += entry_bytes;
        report.tensors.push_back(std::move(entry));
    }
    report.total.header_bits += 16 * 8; // container preamble
    finalize_entry(report.total);
    report.archive_bytes = 16 + header_bytes + report.total.payload_bits / 8;
    return report;
}

StorageEntry analytic_storage(const CompressConfig& config, int64_t rows, int64_t cols) {
    config.validate();
    if (rows <= 0 || cols <= 0) {
        fail(Errc::invalid_argument, "storage accounting needs a positive extent");
    }
    StorageEntry entry;
    entry.params = uint64_t(rows) * uint64_t(cols);
    entry.scale_bits = 32;
    const uint64_t range_bits = range_value_bits(config.range_dtype);
    switch (config.method) {
    case Method::Dct: {
        const uint32_t p = config.patch_size;
        const uint64_t patches = uint64_t((rows + p - 1) / p) * uint64_t((cols + p - 1) / p);
        const std::vector<int64_t> counts = level_counts(config.plan, int64_t(patches));
        const uint64_t area = uint64_t(p) * p;
        for (size_t i = 0; i < counts.size(); ++i) {
            entry.payload_bits +=
                uint64_t(counts[i]) * packed_size(area, config.plan.levels[i].bits) * 8;
        }
        entry.range_bits = 2 * patches * range_bits;
        break;
    }
    case Method::Sign:
        entry.payload_bits = packed_size(entry.params, 1) * 8;
        break;
    case Method::Svd: {
        for (const auto& group : resolve_svd_groups(config, rows, cols)) {
            const uint64_t ranks = uint64_t(group.rank_count());
            entry.payload_bits += ranks * (packed_size(uint64_t(rows), group.bits) +
                                           packed_size(uint64_t(cols), group.bits)) *
                                  8;
            entry.range_bits += ranks * 4 * range_bits; // lo+hi per factor vector
        }
        break;
    }
    }
    finalize_entry(entry);
    return entry;
}

} // namespace ddc
