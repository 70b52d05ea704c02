// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <vector>

#include "doctest.h"

#include "core/archive_io.hpp"
#include "core/codec.hpp"
#include "core/dct.hpp"
#include "core/error.hpp"
#include "test_util.hpp"

using namespace ddc;

namespace {

DeltaMatrix make_delta(const std::string& name, int64_t rows, int64_t cols, uint32_t seed,
                       float lo = -1.0f, float hi = 1.0f) {
    DeltaMatrix delta;
    delta.name = name;
    delta.rows = rows;
    delta.cols = cols;
    delta.values = ddc_test::random_values(size_t(rows * cols), seed, lo, hi);
    return delta;
}

CompressConfig small_config(uint32_t patch_size = 4) {
    CompressConfig config;
    config.patch_size = patch_size;
    return config;
}

Checkpoint random_checkpoint(uint32_t seed) {
    Checkpoint ckpt;
    ckpt.add("blocks.0.attn.weight",
             Tensor{Dtype::F32, {12, 8}, ddc_test::random_values(96, seed)});
    ckpt.add("blocks.0.mlp.weight",
             Tensor{Dtype::F16, {8, 8}, ddc_test::lattice_values(64, seed + 1)});
    ckpt.add("embed_tokens.weight",
             Tensor{Dtype::F32, {16, 4}, ddc_test::random_values(64, seed + 2)});
    ckpt.add("final_norm.bias",
             Tensor{Dtype::BF16, {8}, std::vector<float>(8, 0.25f)});
    return ckpt;
}

Checkpoint perturb(const Checkpoint& base, uint32_t seed, float scale) {
    Checkpoint out;
    uint32_t salt = 0;
    for (const auto& [name, tensor] : base) {
        Tensor t = tensor;
        const std::vector<float> noise =
            ddc_test::lattice_values(t.values.size(), seed + salt++);
        for (size_t i = 0; i < t.values.size(); ++i) {
            t.values[i] = float(double(t.values[i]) + double(noise[i]) * double(scale));
        }
        out.add(name, std::move(t));
    }
    return out;
}

} // namespace

TEST_CASE("compressed record structure matches the plan") {
    const DeltaMatrix delta = make_delta("w", 10, 13, 5); // 4x4 patches -> 3x4 grid
    const CompressConfig config = small_config(4);
    const CompressedTensor record = compress_tensor(delta, config);

    CHECK(record.name == "w");
    CHECK(record.kind == RecordKind::Dct);
    CHECK(record.dtype == Dtype::F32);
    CHECK(record.shape == std::vector<int64_t>{10, 13});
    CHECK(record.patch_size == 4);
    CHECK(record.zero_bit_mode == ZeroBitMode::SpatialMean);

    const int64_t patches = 3 * 4;
    REQUIRE(record.bit_widths.size() == size_t(patches));
    REQUIRE(record.ranges.size() == size_t(2 * patches));

    // Width histogram equals the plan's level counts: 6 patches at 2 bits.
    std::map<uint8_t, int> histogram;
    for (uint8_t w : record.bit_widths) histogram[w]++;
    CHECK(histogram[2] == 6);
    CHECK(histogram[0] == 6);

    uint64_t expect_blob = 0;
    for (uint8_t w : record.bit_widths) expect_blob += packed_size(16, w);
    CHECK(record.blob.size() == expect_blob);

    // Ranges are ordered lo <= hi and canonical in f32.
    for (int64_t k = 0; k < patches; ++k) {
        const double lo = record.ranges[size_t(2 * k)];
        const double hi = record.ranges[size_t(2 * k) + 1];
        CHECK(lo <= hi);
        CHECK(lo == double(float(lo)));
        CHECK(hi == double(float(hi)));
    }

    const auto offsets = blob_offsets(record);
    REQUIRE(offsets.size() == size_t(patches) + 1);
    CHECK(offsets.back() == record.blob.size());
}

TEST_CASE("zero delta compresses to gamma one and exact zeros") {
    DeltaMatrix delta;
    delta.name = "w";
    delta.rows = 8;
    delta.cols = 8;
    delta.values.assign(64, 0.0f);
    const CompressedTensor record = compress_tensor(delta, small_config(4));
    CHECK(record.gamma == 1.0f);
    const std::vector<float> back = reconstruct_tensor(record);
    for (float v : back) CHECK(v == 0.0f);
}

TEST_CASE("rescale preserves the delta's total magnitude") {
    for (uint32_t seed : {1u, 2u, 3u}) {
        const DeltaMatrix delta = make_delta("w", 24, 16, seed);
        const CompressedTensor record = compress_tensor(delta, small_config(8));
        const std::vector<float> back = reconstruct_tensor(record);
        REQUIRE(back.size() == delta.values.size());
        double sum_orig = 0.0, sum_back = 0.0;
        for (float v : delta.values) sum_orig += std::fabs(double(v));
        for (float v : back) sum_back += std::fabs(double(v));
        CHECK(sum_back == doctest::Approx(sum_orig).epsilon(1e-6));
    }
}

TEST_CASE("identical checkpoints restore the base bitwise") {
    const Checkpoint base = random_checkpoint(42);
    CompressConfig config = small_config(4);
    const DeltaArchive archive = compress_checkpoint(base, base, config);
    const Checkpoint restored = apply_archive(base, archive);

    REQUIRE(restored.size() == base.size());
    for (size_t i = 0; i < base.size(); ++i) {
        const auto& [name, want] = base.entry(i);
        const auto& [got_name, got] = restored.entry(i);
        CHECK(got_name == name);
        CHECK(got.dtype == want.dtype);
        CHECK(got.shape == want.shape);
        REQUIRE(got.values.size() == want.values.size());
        for (size_t j = 0; j < want.values.size(); ++j) {
            uint32_t a = 0, b = 0;
            std::memcpy(&a, &want.values[j], 4);
            std::memcpy(&b, &got.values[j], 4);
            CHECK(a == b);
        }
    }
}

TEST_CASE("checkpoint compression partitions records in source order") {
    const Checkpoint base = random_checkpoint(7);
    const Checkpoint ft = perturb(base, 100, 0.01f);
    CompressConfig config = small_config(4);
    const DeltaArchive archive = compress_checkpoint(base, ft, config);

    REQUIRE(archive.records.size() == 4);
    CHECK(archive.records[0].name == "blocks.0.attn.weight");
    CHECK(archive.records[0].kind == RecordKind::Dct);
    CHECK(archive.records[1].name == "blocks.0.mlp.weight");
    CHECK(archive.records[1].kind == RecordKind::Dct);
    CHECK(archive.records[1].dtype == Dtype::F16);
    CHECK(archive.records[2].name == "embed_tokens.weight"); // default passthrough
    CHECK(archive.records[2].kind == RecordKind::Raw);
    CHECK(archive.records[3].name == "final_norm.bias"); // 1-D passthrough
    CHECK(archive.records[3].kind == RecordKind::Raw);

    // Raw blobs hold the fine-tuned tensor narrowed to its dtype.
    const Tensor& embed = ft.at("embed_tokens.weight");
    const CompressedTensor& raw = archive.records[2];
    REQUIRE(raw.blob.size() == embed.values.size() * 4);
    for (size_t i = 0; i < embed.values.size(); ++i) {
        uint32_t want = 0, got = 0;
        std::memcpy(&want, &embed.values[i], 4);
        std::memcpy(&got, raw.blob.data() + 4 * i, 4);
        CHECK(want == got);
    }
    CHECK(archive.records[3].blob.size() == 8 * 2); // bf16 payload
}

TEST_CASE("thread count never changes the archive bytes") {
    const Checkpoint base = random_checkpoint(21);
    const Checkpoint ft = perturb(base, 300, 0.05f);
    CompressConfig config = small_config(4);

    config.threads = 1;
    const std::vector<uint8_t> serial = encode_archive(compress_checkpoint(base, ft, config));
    config.threads = 4;
    const std::vector<uint8_t> parallel = encode_archive(compress_checkpoint(base, ft, config));
    config.threads = 0;
    const std::vector<uint8_t> automatic = encode_archive(compress_checkpoint(base, ft, config));

    CHECK(serial == parallel);
    CHECK(serial == automatic);

    // And the whole encoder is deterministic run to run.
    config.threads = 4;
    CHECK(encode_archive(compress_checkpoint(base, ft, config)) == parallel);
}

TEST_CASE("zero-bit modes differ in how the stored level reconstructs") {
    // One 8x8 patch compressed to 0 bits, so the whole record is the stored
    // mean level. Spatial mode broadcasts it directly; coefficient mode runs
    // it through the inverse transform.
    const DeltaMatrix delta = make_delta("w", 8, 8, 31);
    CompressConfig config = small_config(8);
    config.plan = BitPlan::parse("0:1.0");

    config.zero_bit_mode = ZeroBitMode::SpatialMean;
    const CompressedTensor spatial = compress_tensor(delta, config);
    CHECK(spatial.bit_widths == std::vector<uint8_t>{0});
    CHECK(spatial.blob.empty());
    const std::vector<float> flat = reconstruct_tensor(spatial);
    for (float v : flat) CHECK(v == flat[0]); // constant block

    config.zero_bit_mode = ZeroBitMode::DctMean;
    const CompressedTensor dct_mode = compress_tensor(delta, config);
    CHECK(dct_mode.zero_bit_mode == ZeroBitMode::DctMean);
    const std::vector<float> shaped = reconstruct_tensor(dct_mode);

    // The stored level is the mean DCT coefficient; reconstruction is the
    // inverse transform of a constant coefficient block, scaled by gamma.
    std::vector<double> block(64), coeffs(64), level_block(64), spatial_back(64);
    for (size_t i = 0; i < 64; ++i) block[i] = double(delta.values[i]);
    dct2(dct_basis(8), block, coeffs);
    double mean = 0.0;
    for (double c : coeffs) mean += c;
    mean = double(float(mean / 64.0)); // canonical f32 range value
    CHECK(dct_mode.ranges[0] == mean);
    CHECK(dct_mode.ranges[1] == mean);
    level_block.assign(64, mean);
    idct2(dct_basis(8), level_block, spatial_back);
    double sum_delta = 0.0, sum_recon = 0.0;
    for (size_t i = 0; i < 64; ++i) {
        sum_delta += std::fabs(double(delta.values[i]));
        sum_recon += std::fabs(double(float(spatial_back[i])));
    }
    const float gamma = float(sum_delta / sum_recon);
    CHECK(dct_mode.gamma == gamma);
    for (size_t i = 0; i < 64; ++i) {
        CHECK(shaped[i] == float(double(float(spatial_back[i])) * double(gamma)));
    }

    // A non-constant reconstruction, unlike spatial mode.
    bool varies = false;
    for (float v : shaped) varies = varies || (v != shaped[0]);
    CHECK(varies);
}

TEST_CASE("f16 range storage survives serialization bitwise") {
    const DeltaMatrix delta = make_delta("w", 12, 12, 77);
    CompressConfig config = small_config(4);
    config.range_dtype = RangeDtype::F16;
    const CompressedTensor record = compress_tensor(delta, config);
    const std::vector<float> direct = reconstruct_tensor(record);

    DeltaArchive archive;
    archive.range_dtype = RangeDtype::F16;
    archive.records.push_back(record);
    const DeltaArchive decoded = decode_archive(encode_archive(archive));
    REQUIRE(decoded.records.size() == 1);
    CHECK(decoded.records[0].ranges == record.ranges); // canonical -> lossless
    const std::vector<float> roundtrip = reconstruct_tensor(decoded.records[0]);
    REQUIRE(roundtrip.size() == direct.size());
    for (size_t i = 0; i < direct.size(); ++i) {
        uint32_t a = 0, b = 0;
        std::memcpy(&a, &direct[i], 4);
        std::memcpy(&b, &roundtrip[i], 4);
        CHECK(a == b);
    }
}

TEST_CASE("apply_archive validates against the base checkpoint") {
    const Checkpoint base = random_checkpoint(55);
    const Checkpoint ft = perturb(base, 700, 0.01f);
    const DeltaArchive archive = compress_checkpoint(base, ft, small_config(4));

    SUBCASE("missing tensor") {
        Checkpoint other;
        other.add("something.else", Tensor{Dtype::F32, {2, 2}, std::vector<float>(4, 0.0f)});
        try {
            (void)apply_archive(other, archive);
            FAIL("expected mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::mismatch);
            CHECK(std::string(e.what()).find("base checkpoint lacks tensor") !=
                  std::string::npos);
        }
    }
    SUBCASE("shape mismatch") {
        Checkpoint other;
        for (const auto& [name, tensor] : base) {
            if (name == "blocks.0.attn.weight") {
                other.add(name, Tensor{tensor.dtype, {8, 12},
                                       std::vector<float>(96, 0.0f)});
            } else {
                other.add(name, tensor);
            }
        }
        CHECK_THROWS_AS((void)apply_archive(other, archive), Error);
    }
    SUBCASE("dtype mismatch") {
        Checkpoint other;
        for (const auto& [name, tensor] : base) {
            Tensor t = tensor;
            if (name == "blocks.0.mlp.weight") t.dtype = Dtype::BF16;
            other.add(name, t);
        }
        try {
            (void)apply_archive(other, archive);
            FAIL("expected mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::mismatch);
            CHECK(std::string(e.what()).find("dtype mismatch") != std::string::npos);
        }
    }
}

TEST_CASE("raw records cannot be reconstructed as deltas") {
    CompressedTensor record;
    record.name = "embed";
    record.kind = RecordKind::Raw;
    record.dtype = Dtype::F32;
    record.shape = {2, 2};
    record.blob.assign(16, 0);
    try {
        (void)reconstruct_tensor(record);
        FAIL("expected invalid_argument");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_argument);
    }
}

TEST_CASE("corrupt blobs are rejected with a format error") {
    const DeltaMatrix delta = make_delta("w", 8, 8, 13);
    CompressedTensor record = compress_tensor(delta, small_config(4));
    record.blob.pop_back();
    try {
        (void)reconstruct_tensor(record);
        FAIL("expected format error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::format);
        CHECK(std::string(e.what()).find("corrupt blob") != std::string::npos);
    }
}

TEST_CASE("config validation") {
    CompressConfig config;
    SUBCASE("zero patch size") {
        config.patch_size = 0;
        CHECK_THROWS_AS(config.validate(), Error);
    }
    SUBCASE("bad plan") {
        config.plan = BitPlan{{{2, 0.5}, {2, 0.5}}};
        CHECK_THROWS_AS(config.validate(), Error);
    }
    SUBCASE("svd group widths must strictly decrease and stay in range") {
        config.method = Method::Svd;
        config.svd_groups = {{8, 0, 1}, {8, 1, 2}};
        CHECK_THROWS_AS(config.validate(), Error);
        config.svd_groups = {{0, 0, 1}};
        CHECK_THROWS_AS(config.validate(), Error);
        config.svd_groups = {{33, 0, 1}};
        CHECK_THROWS_AS(config.validate(), Error);
        config.svd_groups = {{8, 0, 1}, {3, 1, 4}};
        CHECK_NOTHROW(config.validate());
    }
    SUBCASE("defaults validate") {
        CHECK_NOTHROW(config.validate());
    }
}
