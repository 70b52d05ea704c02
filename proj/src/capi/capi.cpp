// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0
//
// C binding over the core library. Every entry point converts exceptions
// into status codes and stashes the message in a thread-local slot.

#include "ddc/ddc.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "core/archive_io.hpp"
#include "core/codec.hpp"
#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/safetensors.hpp"

struct ddc_checkpoint {
    ddc::Checkpoint value;
};

struct ddc_archive {
    ddc::DeltaArchive value;
    // Computed on first use; entry name pointers handed to callers live here.
    mutable std::unique_ptr<ddc::StorageReport> storage;
    mutable std::mutex storage_mutex;
};

struct ddc_config {
    ddc::CompressConfig value;
};

namespace {

thread_local std::string t_last_error;

ddc_status status_of(ddc::Errc code) {
    switch (code) {
    case ddc::Errc::invalid_argument: return DDC_ERR_INVALID_ARGUMENT;
    case ddc::Errc::io: return DDC_ERR_IO;
    case ddc::Errc::format: return DDC_ERR_FORMAT;
    case ddc::Errc::mismatch: return DDC_ERR_MISMATCH;
    case ddc::Errc::not_found: return DDC_ERR_NOT_FOUND;
    case ddc::Errc::internal: return DDC_ERR_INTERNAL;
    }
    return DDC_ERR_INTERNAL;
}

template <typename Fn>
ddc_status guarded(Fn&& fn) {
    try {
        fn();
        return DDC_OK;
    } catch (const ddc::Error& e) {
        t_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return DDC_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) {
        ddc::fail(ddc::Errc::invalid_argument, what);
    }
}

const ddc::StorageReport& storage_report(const ddc_archive* archive) {
    std::lock_guard lock(archive->storage_mutex);
    if (!archive->storage) {
        archive->storage =
            std::make_unique<ddc::StorageReport>(ddc::storage_from_archive(archive->value));
    }
    return *archive->storage;
}

void fill_entry(const ddc::StorageEntry& in, ddc_storage_entry* out) {
    out->name = in.name.c_str();
    out->params = in.params;
    out->payload_bits = in.payload_bits;
    out->range_bits = in.range_bits;
    out->scale_bits = in.scale_bits;
    out->header_bits = in.header_bits;
    out->bits_per_param = in.bits_per_param;
    out->total_bits_per_param = in.total_bits_per_param;
    out->alpha16 = in.alpha16;
    out->alpha32 = in.alpha32;
}

void fill_fidelity(const ddc::Fidelity& in, ddc_fidelity* out) {
    out->frobenius_relative = in.frobenius_relative;
    out->max_abs = in.max_abs;
    out->mean_abs = in.mean_abs;
    out->cosine = in.cosine;
}

const ddc::CompressedTensor& record_by_name(const ddc::DeltaArchive& archive,
                                            const char* name) {
    for (const auto& record : archive.records) {
        if (record.name == name) {
            return record;
        }
    }
    ddc::fail(ddc::Errc::not_found, std::string("no record named '") + name + "'");
}

const char* record_kind_name(ddc::RecordKind kind) {
    switch (kind) {
    case ddc::RecordKind::Raw: return "raw";
    case ddc::RecordKind::Dct: return "dct";
    case ddc::RecordKind::Sign: return "sign";
    case ddc::RecordKind::Svd: return "svd";
    }
    return "?";
}

} // namespace

extern "C" {

const char* ddc_status_name(ddc_status status) {
    switch (status) {
    case DDC_OK: return "ok";
    case DDC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DDC_ERR_IO: return "io error";
    case DDC_ERR_FORMAT: return "format error";
    case DDC_ERR_MISMATCH: return "mismatch";
    case DDC_ERR_NOT_FOUND: return "not found";
    case DDC_ERR_INTERNAL: return "internal error";
    }
    return "?";
}

const char* ddc_last_error(void) {
    return t_last_error.c_str();
}

const char* ddc_version(void) {
    return "0.1.0";
}

/* ---- configuration -------------------------------------------------- */

ddc_status ddc_config_create(ddc_config** out) {
    return guarded([&] {
        require(out != nullptr, "null output pointer");
        *out = new ddc_config{};
    });
}

void ddc_config_destroy(ddc_config* config) {
    delete config;
}

ddc_status ddc_config_set_method(ddc_config* config, const char* name) {
    return guarded([&] {
        require(config != nullptr && name != nullptr, "null argument");
        if (std::strcmp(name, "dct") == 0) {
            config->value.method = ddc::Method::Dct;
        } else if (std::strcmp(name, "sign") == 0) {
            config->value.method = ddc::Method::Sign;
        } else if (std::strcmp(name, "svd") == 0) {
            config->value.method = ddc::Method::Svd;
        } else {
            ddc::fail(ddc::Errc::invalid_argument,
                      std::string("unknown method '") + name + "' (want dct, sign, or svd)");
        }
    });
}

ddc_status ddc_config_set_patch_size(ddc_config* config, uint32_t patch_size) {
    return guarded([&] {
        require(config != nullptr, "null argument");
        require(patch_size > 0, "patch size must be positive");
        config->value.patch_size = patch_size;
    });
}

ddc_status ddc_config_set_bit_plan(ddc_config* config, const char* spec) {
    return guarded([&] {
        require(config != nullptr && spec != nullptr, "null argument");
        config->value.plan = ddc::BitPlan::parse(spec);
    });
}

ddc_status ddc_config_set_range_dtype(ddc_config* config, const char* name) {
    return guarded([&] {
        require(config != nullptr && name != nullptr, "null argument");
        if (std::strcmp(name, "f32") == 0) {
            config->value.range_dtype = ddc::RangeDtype::F32;
        } else if (std::strcmp(name, "f16") == 0) {
            config->value.range_dtype = ddc::RangeDtype::F16;
        } else {
            ddc::fail(ddc::Errc::invalid_argument,
                      std::string("unknown range dtype '") + name + "' (want f32 or f16)");
        }
    });
}

ddc_status ddc_config_set_zero_bit_mode(ddc_config* config, const char* name) {
    return guarded([&] {
        require(config != nullptr && name != nullptr, "null argument");
        if (std::strcmp(name, "spatial-mean") == 0) {
            config->value.zero_bit_mode = ddc::ZeroBitMode::SpatialMean;
        } else if (std::strcmp(name, "dct-mean") == 0) {
            config->value.zero_bit_mode = ddc::ZeroBitMode::DctMean;
        } else {
            ddc::fail(ddc::Errc::invalid_argument,
                      std::string("unknown zero-bit mode '") + name +
                          "' (want spatial-mean or dct-mean)");
        }
    });
}

ddc_status ddc_config_set_threads(ddc_config* config, uint32_t threads) {
    return guarded([&] {
        require(config != nullptr, "null argument");
        config->value.threads = threads;
    });
}

ddc_status ddc_config_set_passthrough(ddc_config* config, const char* const* patterns,
                                      uint64_t count) {
    return guarded([&] {
        require(config != nullptr, "null argument");
        require(count == 0 || patterns != nullptr, "null pattern list");
        std::vector<std::string> list;
        list.reserve(size_t(count));
        for (uint64_t i = 0; i < count; ++i) {
            require(patterns[i] != nullptr, "null pattern");
            list.emplace_back(patterns[i]);
        }
        config->value.passthrough_patterns = std::move(list);
    });
}

/* ---- checkpoints ---------------------------------------------------- */

ddc_status ddc_checkpoint_load(const char* path, ddc_checkpoint** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        auto handle = std::make_unique<ddc_checkpoint>();
        handle->value = ddc::load_checkpoint(path);
        *out = handle.release();
    });
}

ddc_status ddc_checkpoint_save(const ddc_checkpoint* checkpoint, const char* path) {
    return guarded([&] {
        require(checkpoint != nullptr && path != nullptr, "null argument");
        ddc::save_checkpoint(checkpoint->value, path);
    });
}

void ddc_checkpoint_destroy(ddc_checkpoint* checkpoint) {
    delete checkpoint;
}

ddc_status ddc_checkpoint_tensor_count(const ddc_checkpoint* checkpoint, uint64_t* out) {
    return guarded([&] {
        require(checkpoint != nullptr && out != nullptr, "null argument");
        *out = checkpoint->value.size();
    });
}

ddc_status ddc_checkpoint_tensor_name(const ddc_checkpoint* checkpoint, uint64_t index,
                                      const char** out) {
    return guarded([&] {
        require(checkpoint != nullptr && out != nullptr, "null argument");
        if (index >= checkpoint->value.size()) {
            ddc::fail(ddc::Errc::invalid_argument, "tensor index out of range");
        }
        *out = checkpoint->value.entry(size_t(index)).first.c_str();
    });
}

ddc_status ddc_checkpoint_tensor_values(const ddc_checkpoint* checkpoint, const char* name,
                                        const float** values, uint64_t* count) {
    return guarded([&] {
        require(checkpoint != nullptr && name != nullptr, "null argument");
        const ddc::Tensor& tensor = checkpoint->value.at(name);
        if (values != nullptr) {
            *values = tensor.values.data();
        }
        if (count != nullptr) {
            *count = tensor.values.size();
        }
    });
}

ddc_status ddc_checkpoint_tensor_shape(const ddc_checkpoint* checkpoint, const char* name,
                                       const char** dtype, int64_t* dims,
                                       uint64_t dims_capacity, uint64_t* rank) {
    return guarded([&] {
        require(checkpoint != nullptr && name != nullptr, "null argument");
        const ddc::Tensor& tensor = checkpoint->value.at(name);
        if (dtype != nullptr) {
            *dtype = ddc::dtype_name(tensor.dtype);
        }
        if (dims != nullptr) {
            const uint64_t n = std::min<uint64_t>(dims_capacity, tensor.shape.size());
            for (uint64_t i = 0; i < n; ++i) {
                dims[i] = tensor.shape[size_t(i)];
            }
        }
        if (rank != nullptr) {
            *rank = tensor.shape.size();
        }
    });
}

/* ---- compression / reconstruction ----------------------------------- */

ddc_status ddc_compress(const ddc_checkpoint* base, const ddc_checkpoint* finetuned,
                        const ddc_config* config, ddc_archive** out) {
    return guarded([&] {
        require(base != nullptr && finetuned != nullptr && config != nullptr &&
                    out != nullptr,
                "null argument");
        auto handle = std::make_unique<ddc_archive>();
        handle->value =
            ddc::compress_checkpoint(base->value, finetuned->value, config->value);
        *out = handle.release();
    });
}

ddc_status ddc_apply(const ddc_checkpoint* base, const ddc_archive* archive,
                     ddc_checkpoint** out) {
    return guarded([&] {
        require(base != nullptr && archive != nullptr && out != nullptr, "null argument");
        auto handle = std::make_unique<ddc_checkpoint>();
        handle->value = ddc::apply_archive(base->value, archive->value);
        *out = handle.release();
    });
}

ddc_status ddc_archive_write(const ddc_archive* archive, const char* path) {
    return guarded([&] {
        require(archive != nullptr && path != nullptr, "null argument");
        ddc::write_archive(path, archive->value);
    });
}

ddc_status ddc_archive_read(const char* path, ddc_archive** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        auto handle = std::make_unique<ddc_archive>();
        handle->value = ddc::read_archive(path);
        *out = handle.release();
    });
}

void ddc_archive_destroy(ddc_archive* archive) {
    delete archive;
}

/* ---- archive introspection ------------------------------------------ */

ddc_status ddc_archive_record_count(const ddc_archive* archive, uint64_t* out) {
    return guarded([&] {
        require(archive != nullptr && out != nullptr, "null argument");
        *out = archive->value.records.size();
    });
}

ddc_status ddc_archive_record_info(const ddc_archive* archive, uint64_t index,
                                   ddc_record_info* out) {
    return guarded([&] {
        require(archive != nullptr && out != nullptr, "null argument");
        if (index >= archive->value.records.size()) {
            ddc::fail(ddc::Errc::invalid_argument, "record index out of range");
        }
        const ddc::CompressedTensor& record = archive->value.records[size_t(index)];
        *out = ddc_record_info{};
        out->name = record.name.c_str();
        out->kind = record_kind_name(record.kind);
        out->dtype = ddc::dtype_name(record.dtype);
        out->rank = record.shape.size();
        const uint64_t n = std::min<uint64_t>(record.shape.size(), 8);
        for (uint64_t i = 0; i < n; ++i) {
            out->dims[i] = record.shape[size_t(i)];
        }
        out->params = uint64_t(record.element_count());
        out->patch_size = record.patch_size;
        out->unit_count = record.bit_widths.size();
        out->gamma = record.gamma;
    });
}

ddc_status ddc_archive_storage_entry(const ddc_archive* archive, uint64_t index,
                                     ddc_storage_entry* out) {
    return guarded([&] {
        require(archive != nullptr && out != nullptr, "null argument");
        const ddc::StorageReport& report = storage_report(archive);
        if (index >= report.tensors.size()) {
            ddc::fail(ddc::Errc::invalid_argument, "record index out of range");
        }
        fill_entry(report.tensors[size_t(index)], out);
    });
}

ddc_status ddc_archive_storage_total(const ddc_archive* archive, ddc_storage_entry* out,
                                     uint64_t* archive_bytes) {
    return guarded([&] {
        require(archive != nullptr && out != nullptr, "null argument");
        const ddc::StorageReport& report = storage_report(archive);
        fill_entry(report.total, out);
        if (archive_bytes != nullptr) {
            *archive_bytes = report.archive_bytes;
        }
    });
}

ddc_status ddc_archive_reconstruct(const ddc_archive* archive, const char* name,
                                   float** values, uint64_t* count) {
    return guarded([&] {
        require(archive != nullptr && name != nullptr && values != nullptr &&
                    count != nullptr,
                "null argument");
        const ddc::CompressedTensor& record = record_by_name(archive->value, name);
        std::vector<float> decoded;
        if (record.kind == ddc::RecordKind::Raw) {
            decoded.resize(size_t(record.element_count()));
            if (record.blob.size() != decoded.size() * ddc::dtype_size(record.dtype)) {
                ddc::fail(ddc::Errc::format, std::string("corrupt blob for passthrough tensor '") +
                                                 record.name + "'");
            }
            ddc::widen_payload(record.dtype, record.blob, decoded);
        } else {
            decoded = ddc::reconstruct_tensor(record);
        }
        float* buffer = new float[decoded.size()];
        std::memcpy(buffer, decoded.data(), decoded.size() * sizeof(float));
        *values = buffer;
        *count = decoded.size();
    });
}

void ddc_values_free(float* values) {
    delete[] values;
}

/* ---- comparison and analysis ---------------------------------------- */

ddc_status ddc_diff(const ddc_checkpoint* a, const ddc_checkpoint* b, ddc_fidelity* out) {
    return guarded([&] {
        require(a != nullptr && b != nullptr && out != nullptr, "null argument");
        for (const auto& [name, tensor] : b->value) {
            (void)tensor;
            if (a->value.find(name) == nullptr) {
                ddc::fail(ddc::Errc::mismatch,
                          "tensor '" + name + "' only in the second checkpoint");
            }
        }
        ddc::FidelityAccumulator acc;
        for (const auto& [name, tensor] : a->value) {
            const ddc::Tensor* other = b->value.find(name);
            if (other == nullptr) {
                ddc::fail(ddc::Errc::mismatch,
                          "tensor '" + name + "' only in the first checkpoint");
            }
            if (other->shape != tensor.shape) {
                ddc::fail(ddc::Errc::mismatch, "shape mismatch for tensor '" + name + "'");
            }
            acc.add(tensor.values, other->values);
        }
        fill_fidelity(acc.finalize(), out);
    });
}

ddc_status ddc_diff_tensor(const ddc_checkpoint* a, const ddc_checkpoint* b,
                           const char* name, ddc_fidelity* out) {
    return guarded([&] {
        require(a != nullptr && b != nullptr && name != nullptr && out != nullptr,
                "null argument");
        const ddc::Tensor& ta = a->value.at(name);
        const ddc::Tensor& tb = b->value.at(name);
        if (ta.shape != tb.shape) {
            ddc::fail(ddc::Errc::mismatch,
                      std::string("shape mismatch for tensor '") + name + "'");
        }
        fill_fidelity(ddc::fidelity(ta.values, tb.values), out);
    });
}

ddc_status ddc_histogram(const float* values, uint64_t count, uint32_t bins,
                         const double* range_lo, const double* range_hi, double* bin_left,
                         double* bin_right, uint64_t* bin_count) {
    return guarded([&] {
        require(values != nullptr || count == 0, "null values");
        std::optional<std::pair<double, double>> range;
        if (range_lo != nullptr && range_hi != nullptr) {
            range = std::make_pair(*range_lo, *range_hi);
        }
        const std::vector<ddc::HistogramBin> result =
            ddc::histogram(std::span(values, size_t(count)), bins, range);
        for (size_t i = 0; i < result.size(); ++i) {
            if (bin_left != nullptr) {
                bin_left[i] = result[i].left;
            }
            if (bin_right != nullptr) {
                bin_right[i] = result[i].right;
            }
            if (bin_count != nullptr) {
                bin_count[i] = result[i].count;
            }
        }
    });
}

} /* extern "C" */
