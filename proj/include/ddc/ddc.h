/* Copyright 2026 The ddc Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the delta-checkpoint codec library.
 *
 * The library compresses the difference between a fine-tuned and a base
 * checkpoint (safetensors files) into a compact archive, and applies such an
 * archive back onto the base to recover the fine-tuned weights.
 *
 * Conventions:
 *   - Every fallible function returns a ddc_status; DDC_OK is 0.
 *   - On failure, ddc_last_error() returns a thread-local message describing
 *     what went wrong. The message is overwritten by the next failure on the
 *     same thread.
 *   - Objects are opaque handles created and destroyed by this library.
 *     Destroy functions accept NULL.
 *   - Returned const char* pointers stay valid while the handle they came
 *     from is alive (for ddc_last_error: until the next failing call).
 */

#ifndef DDC_H_
#define DDC_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define DDC_API __attribute__((visibility("default")))

typedef enum ddc_status {
    DDC_OK = 0,
    DDC_ERR_INVALID_ARGUMENT = 1, /* bad parameter or malformed spec string */
    DDC_ERR_IO = 2,               /* file unreadable or unwritable */
    DDC_ERR_FORMAT = 3,           /* corrupt or unsupported file contents */
    DDC_ERR_MISMATCH = 4,         /* incompatible checkpoints or archives */
    DDC_ERR_NOT_FOUND = 5,        /* unknown tensor name */
    DDC_ERR_INTERNAL = 6
} ddc_status;

DDC_API const char* ddc_status_name(ddc_status status);
DDC_API const char* ddc_last_error(void);
DDC_API const char* ddc_version(void);

typedef struct ddc_checkpoint ddc_checkpoint;
typedef struct ddc_archive ddc_archive;
typedef struct ddc_config ddc_config;

/* ---- compression configuration ------------------------------------- */

/* A fresh config holds the defaults: dct method, patch size 16, bit plan
 * "2:0.5,0:0.5", f32 ranges, spatial-mean zero-bit patches, the built-in
 * passthrough patterns, and threads = 0 (all cores). */
DDC_API ddc_status ddc_config_create(ddc_config** out);
DDC_API void ddc_config_destroy(ddc_config* config);

DDC_API ddc_status ddc_config_set_method(ddc_config* config, const char* name);
    /* "dct", "sign", or "svd" */
DDC_API ddc_status ddc_config_set_patch_size(ddc_config* config, uint32_t patch_size);
DDC_API ddc_status ddc_config_set_bit_plan(ddc_config* config, const char* spec);
    /* comma-separated bits:ratio pairs, e.g. "2:0.5,0:0.5" */
DDC_API ddc_status ddc_config_set_range_dtype(ddc_config* config, const char* name);
    /* "f32" or "f16" */
DDC_API ddc_status ddc_config_set_zero_bit_mode(ddc_config* config, const char* name);
    /* "spatial-mean" or "dct-mean" */
DDC_API ddc_status ddc_config_set_threads(ddc_config* config, uint32_t threads);
/* Replaces the passthrough pattern list with `count` glob patterns
 * ('*' and '?'); count 0 disables passthrough entirely. */
DDC_API ddc_status ddc_config_set_passthrough(ddc_config* config, const char* const* patterns,
                                              uint64_t count);

/* ---- checkpoints ---------------------------------------------------- */

DDC_API ddc_status ddc_checkpoint_load(const char* path, ddc_checkpoint** out);
DDC_API ddc_status ddc_checkpoint_save(const ddc_checkpoint* checkpoint, const char* path);
DDC_API void ddc_checkpoint_destroy(ddc_checkpoint* checkpoint);

DDC_API ddc_status ddc_checkpoint_tensor_count(const ddc_checkpoint* checkpoint,
                                               uint64_t* out);
DDC_API ddc_status ddc_checkpoint_tensor_name(const ddc_checkpoint* checkpoint,
                                              uint64_t index, const char** out);
/* Working values of one tensor (row-major float32), valid while the
 * checkpoint lives. Any of the out parameters may be NULL. */
DDC_API ddc_status ddc_checkpoint_tensor_values(const ddc_checkpoint* checkpoint,
                                                const char* name, const float** values,
                                                uint64_t* count);
/* Shape and dtype of one tensor. dims receives up to dims_capacity leading
 * dimensions; *rank always reports the full rank. */
DDC_API ddc_status ddc_checkpoint_tensor_shape(const ddc_checkpoint* checkpoint,
                                               const char* name, const char** dtype,
                                               int64_t* dims, uint64_t dims_capacity,
                                               uint64_t* rank);

/* ---- compression / reconstruction ----------------------------------- */

DDC_API ddc_status ddc_compress(const ddc_checkpoint* base, const ddc_checkpoint* finetuned,
                                const ddc_config* config, ddc_archive** out);
DDC_API ddc_status ddc_apply(const ddc_checkpoint* base, const ddc_archive* archive,
                             ddc_checkpoint** out);

DDC_API ddc_status ddc_archive_write(const ddc_archive* archive, const char* path);
DDC_API ddc_status ddc_archive_read(const char* path, ddc_archive** out);
DDC_API void ddc_archive_destroy(ddc_archive* archive);

/* ---- archive introspection ------------------------------------------ */

typedef struct ddc_record_info {
    const char* name;
    const char* kind;  /* "raw", "dct", "sign", "svd" */
    const char* dtype; /* "F32", "F16", "BF16" */
    uint64_t rank;
    int64_t dims[8];
    uint64_t params;
    uint32_t patch_size; /* 0 unless kind == "dct" */
    uint64_t unit_count; /* quantized patches or factor vectors */
    float gamma;
} ddc_record_info;

/* Storage cost of one record (or of the whole archive for the total). The
 * headline bits_per_param covers the quantized payload plus stored ranges;
 * gamma (scale_bits) and serialization bookkeeping (header_bits) are kept
 * separate. alpha16/alpha32 relate bits_per_param to 16- and 32-bit storage
 * of the original parameters. */
typedef struct ddc_storage_entry {
    const char* name;
    uint64_t params;
    uint64_t payload_bits;
    uint64_t range_bits;
    uint64_t scale_bits;
    uint64_t header_bits;
    double bits_per_param;
    double total_bits_per_param;
    double alpha16;
    double alpha32;
} ddc_storage_entry;

DDC_API ddc_status ddc_archive_record_count(const ddc_archive* archive, uint64_t* out);
DDC_API ddc_status ddc_archive_record_info(const ddc_archive* archive, uint64_t index,
                                           ddc_record_info* out);
DDC_API ddc_status ddc_archive_storage_entry(const ddc_archive* archive, uint64_t index,
                                             ddc_storage_entry* out);
/* archive_bytes (optional) receives the exact serialized size. */
DDC_API ddc_status ddc_archive_storage_total(const ddc_archive* archive,
                                             ddc_storage_entry* out,
                                             uint64_t* archive_bytes);

/* Decodes one record's delta (gamma applied) into a fresh buffer; release it
 * with ddc_values_free. Passthrough records decode to their stored values. */
DDC_API ddc_status ddc_archive_reconstruct(const ddc_archive* archive, const char* name,
                                           float** values, uint64_t* count);
DDC_API void ddc_values_free(float* values);

/* ---- comparison and analysis ---------------------------------------- */

typedef struct ddc_fidelity {
    double frobenius_relative; /* |a - b|_F / |a|_F; 0 when both sides are zero */
    double max_abs;
    double mean_abs;
    double cosine; /* of the flattened tensors, in [-1, 1]; 1 for zero vs zero */
} ddc_fidelity;

/* Tensor-by-tensor comparison of two checkpoints with equal tensor sets. */
DDC_API ddc_status ddc_diff(const ddc_checkpoint* a, const ddc_checkpoint* b,
                            ddc_fidelity* out);
DDC_API ddc_status ddc_diff_tensor(const ddc_checkpoint* a, const ddc_checkpoint* b,
                                   const char* name, ddc_fidelity* out);

/* Uniform histogram of `count` values over [min, max], or over [*range_lo,
 * *range_hi] when both are non-NULL (out-of-range values land in the edge
 * bins). Fills `bins` entries of each non-NULL output array; counts sum to
 * `count`, and a value on the top edge lands in the last bin. */
DDC_API ddc_status ddc_histogram(const float* values, uint64_t count, uint32_t bins,
                                 const double* range_lo, const double* range_hi,
                                 double* bin_left, double* bin_right, uint64_t* bin_count);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DDC_H_ */
