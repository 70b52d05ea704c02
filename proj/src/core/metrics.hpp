// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/archive_io.hpp"
#include "core/codec.hpp"

namespace ddc {

// Reconstruction quality of one tensor (or of a whole checkpoint when
// accumulated). Conventions for degenerate inputs: comparing zero against
// zero reports error 0 and similarity 1; a zero original against a nonzero
// reconstruction reports relative error 1 and similarity 0, keeping every
// field finite.
struct Fidelity {
    double frobenius_relative = 0.0;
    double max_abs = 0.0;
    double mean_abs = 0.0;
    double cosine = 1.0;
};

class FidelityAccumulator {
public:
    void add(std::span<const float> original, std::span<const float> reconstructed);
    Fidelity finalize() const;

private:
    double dot_ = 0.0;
    double sum_sq_original_ = 0.0;
    double sum_sq_reconstructed_ = 0.0;
    double sum_sq_diff_ = 0.0;
    double sum_abs_diff_ = 0.0;
    double max_abs_diff_ = 0.0;
    uint64_t count_ = 0;
};

Fidelity fidelity(std::span<const float> original, std::span<const float> reconstructed);

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    uint64_t count = 0;
};

// Uniform bins over [min, max] of the data, or over the given range with
// out-of-range values clamped into the edge bins; either way the counts sum
// to the element count. A value on the top edge lands in the last bin; a
// zero-width range puts everything there too.
std::vector<HistogramBin> histogram(std::span<const float> values, uint32_t bins,
                                    std::optional<std::pair<double, double>> range = {});

// Storage cost of one record. The headline bits_per_param covers what scales
// with the tensor (code payload plus stored ranges); the per-tensor scale
// (32-bit gamma) and serialization bookkeeping are reported separately so
// the headline matches the analytic formula exactly.
struct StorageEntry {
    std::string name;
    uint64_t params = 0;
    uint64_t payload_bits = 0;
    uint64_t range_bits = 0;
    uint64_t scale_bits = 0;  // per-tensor gamma
    uint64_t header_bits = 0; // names, dims, offsets; container preamble in totals
    double bits_per_param = 0.0;       // (payload + range) / params
    double total_bits_per_param = 0.0; // everything / params
    double alpha16 = 0.0;              // bits_per_param / 16
    double alpha32 = 0.0;              // bits_per_param / 32
};

struct StorageReport {
    std::vector<StorageEntry> tensors;
    StorageEntry total;           // sums over all records plus the preamble
    uint64_t archive_bytes = 0;   // byte-exact size of the serialized archive
};

// Accounting for an archive; total.header_bits includes the 16-byte preamble
// and archive_bytes equals the serialized size exactly.
StorageReport storage_from_archive(const DeltaArchive& archive);

// Predicted cost of compressing a rows x cols tensor under `config`, without
// serializing anything. header_bits stays 0 (it depends on the tensor name);
// the headline fields match storage_from_archive for the same tensor.
StorageEntry analytic_storage(const CompressConfig& config, int64_t rows, int64_t cols);

} // namespace ddc
