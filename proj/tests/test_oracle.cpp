// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Bit-level agreement between the production codec and the straight-line
// reference implementation, across shapes, patch sizes, plans, and modes.

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"

#include "core/codec.hpp"
#include "reference_codec.hpp"
#include "test_util.hpp"

using namespace ddc;

namespace {

struct PlanPair {
    const char* spec;
    std::vector<ddc_ref::RefPlanLevel> ref;
};

const std::vector<PlanPair>& plan_pairs() {
    static const std::vector<PlanPair> pairs = {
        {"2:0.5,0:0.5", {{2, 0.5}, {0, 0.5}}},
        {"8:0.1,3:0.4,2:0.5", {{8, 0.1}, {3, 0.4}, {2, 0.5}}},
        {"1:1.0", {{1, 1.0}}},
    };
    return pairs;
}

uint32_t float_bits(float v) {
    uint32_t bits = 0;
    std::memcpy(&bits, &v, 4);
    return bits;
}

void compare_against_reference(int64_t rows, int64_t cols, uint32_t patch_size,
                               const PlanPair& plan, ZeroBitMode mode, uint32_t seed) {
    CAPTURE(rows);
    CAPTURE(cols);
    CAPTURE(patch_size);
    CAPTURE(plan.spec);
    CAPTURE(int(mode));

    DeltaMatrix delta;
    delta.name = "t";
    delta.rows = rows;
    delta.cols = cols;
    delta.values = ddc_test::random_values(size_t(rows * cols), seed);

    CompressConfig config;
    config.patch_size = patch_size;
    config.plan = BitPlan::parse(plan.spec);
    config.zero_bit_mode = mode;

    const CompressedTensor record = compress_tensor(delta, config);
    const ddc_ref::RefCompressed ref = ddc_ref::reference_compress(
        delta.values, rows, cols, patch_size, plan.ref, int(mode));

    REQUIRE(record.bit_widths.size() == ref.widths.size());
    CHECK(record.bit_widths == ref.widths);
    REQUIRE(record.ranges.size() == 2 * ref.lows.size());
    for (size_t k = 0; k < ref.lows.size(); ++k) {
        CHECK(record.ranges[2 * k] == ref.lows[k]);
        CHECK(record.ranges[2 * k + 1] == ref.highs[k]);
    }
    CHECK(record.blob == ref.blob);
    CHECK(float_bits(record.gamma) == float_bits(ref.gamma));

    const std::vector<float> got = reconstruct_tensor(record);
    const std::vector<float> want =
        ddc_ref::reference_reconstruct(ref, rows, cols, patch_size, int(mode));
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) {
        CHECK(float_bits(got[i]) == float_bits(want[i]));
    }
}

} // namespace

TEST_CASE("codec agrees with the reference on every small shape") {
    uint32_t seed = 1;
    for (int64_t rows = 1; rows <= 16; ++rows) {
        for (int64_t cols = 1; cols <= 16; ++cols) {
            for (uint32_t patch_size : {2u, 4u}) {
                compare_against_reference(rows, cols, patch_size, plan_pairs()[0],
                                          ZeroBitMode::SpatialMean, seed++);
            }
        }
    }
}

TEST_CASE("codec agrees with the reference across plans and modes") {
    uint32_t seed = 5000;
    const int64_t shapes[][2] = {{5, 9}, {8, 8}, {12, 7}, {16, 16}, {3, 14}, {16, 1}};
    for (const auto& shape : shapes) {
        for (uint32_t patch_size : {2u, 4u}) {
            for (const PlanPair& plan : plan_pairs()) {
                for (ZeroBitMode mode : {ZeroBitMode::SpatialMean, ZeroBitMode::DctMean}) {
                    compare_against_reference(shape[0], shape[1], patch_size, plan, mode,
                                              seed++);
                }
            }
        }
    }
}

TEST_CASE("codec agrees with the reference on larger blocks") {
    uint32_t seed = 9000;
    compare_against_reference(40, 24, 8, plan_pairs()[0], ZeroBitMode::SpatialMean, seed++);
    compare_against_reference(33, 17, 8, plan_pairs()[1], ZeroBitMode::DctMean, seed++);
    compare_against_reference(32, 48, 16, plan_pairs()[0], ZeroBitMode::SpatialMean, seed++);
    compare_against_reference(20, 20, 16, plan_pairs()[2], ZeroBitMode::DctMean, seed++);
}
