// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"

#include "core/baselines.hpp"
#include "core/error.hpp"
#include "test_util.hpp"

using namespace ddc;

TEST_CASE("sign quantization") {
    SUBCASE("alpha is the exact mean absolute value") {
        const std::vector<float> values = ddc_test::random_values(31, 8, -3.0f, 3.0f);
        const SignCompressed sc = sign_compress(values, 1, 31);
        double acc = 0.0;
        for (float v : values) acc += std::fabs(double(v));
        CHECK(sc.alpha == acc / 31.0);
    }
    SUBCASE("bitmap is LSB-first with zeros treated as negative") {
        //                          +     -    0     +     -     +     +    -    +
        const std::vector<float> v = {1.0f, -1, 0.0f, 2.0f, -0.5f, 3.0f, 4.0f, -2, 5.0f};
        const SignCompressed sc = sign_compress(v, 3, 3);
        REQUIRE(sc.bitmap.size() == 2);
        // bits 0..7: 1,0,0,1,0,1,1,0 -> 0b01101001 = 0x69; bit 8: 1.
        CHECK(sc.bitmap[0] == 0x69);
        CHECK(sc.bitmap[1] == 0x01);
    }
    SUBCASE("round trip yields exactly +/- float(alpha)") {
        const std::vector<float> values = ddc_test::random_values(40, 9);
        const SignCompressed sc = sign_compress(values, 5, 8);
        const std::vector<float> back = sign_reconstruct(sc);
        REQUIRE(back.size() == values.size());
        const float alpha = float(sc.alpha);
        for (size_t i = 0; i < values.size(); ++i) {
            CHECK(back[i] == (values[i] > 0.0f ? alpha : -alpha));
        }
    }
    SUBCASE("all-zero input reconstructs to -alpha = 0") {
        const std::vector<float> zeros(8, 0.0f);
        const SignCompressed sc = sign_compress(zeros, 2, 4);
        CHECK(sc.alpha == 0.0);
        for (uint8_t byte : sc.bitmap) CHECK(byte == 0);
        for (float v : sign_reconstruct(sc)) CHECK(v == 0.0f);
    }
    SUBCASE("rejects bad extents and non-finite values") {
        CHECK_THROWS_AS(sign_compress(std::vector<float>(5, 1.0f), 2, 3), Error);
        CHECK_THROWS_AS(sign_compress(std::vector<float>(4, 1.0f), 0, 4), Error);
        std::vector<float> values(4, 1.0f);
        values[2] = std::numeric_limits<float>::quiet_NaN();
        CHECK_THROWS_AS(sign_compress(values, 2, 2), Error);
    }
    SUBCASE("reconstruct validates the bitmap length") {
        SignCompressed sc;
        sc.rows = 2;
        sc.cols = 5;
        sc.alpha = 1.0;
        sc.bitmap = {0xFF}; // 10 entries need 2 bytes
        CHECK_THROWS_AS(sign_reconstruct(sc), Error);
    }
}

TEST_CASE("default factor groups") {
    SUBCASE("64x64 sizes the 1:8:16 split from the bit budget") {
        // t = max(1, round(4096 / (64*128))) = max(1, round(0.5)) = 1.
        const auto groups = default_svd_groups(64, 64);
        REQUIRE(groups.size() == 3);
        CHECK(groups[0].bits == 8);
        CHECK(groups[0].rank_begin == 0);
        CHECK(groups[0].rank_end == 1);
        CHECK(groups[1].bits == 3);
        CHECK(groups[1].rank_begin == 1);
        CHECK(groups[1].rank_end == 9);
        CHECK(groups[2].bits == 2);
        CHECK(groups[2].rank_begin == 9);
        CHECK(groups[2].rank_end == 25);
    }
    SUBCASE("1024x1024 scales t linearly") {
        // t = round(1024*1024 / (64*2048)) = 8 -> ranks 8/64/128.
        const auto groups = default_svd_groups(1024, 1024);
        REQUIRE(groups.size() == 3);
        CHECK(groups[0].rank_end == 8);
        CHECK(groups[1].rank_end == 8 + 64);
        CHECK(groups[2].rank_end == 8 + 64 + 128);
    }
    SUBCASE("small matrices clamp to the available rank") {
        const auto groups = default_svd_groups(4, 100);
        REQUIRE(groups.size() == 2); // 8-bit takes 1, 3-bit takes the other 3
        CHECK(groups[0].bits == 8);
        CHECK(groups[0].rank_end == 1);
        CHECK(groups[1].bits == 3);
        CHECK(groups[1].rank_end == 4);
        int64_t total = 0;
        for (const auto& g : groups) total += g.rank_count();
        CHECK(total == 4);
    }
    SUBCASE("rejects non-positive extents") {
        CHECK_THROWS_AS(default_svd_groups(0, 4), Error);
    }
}

TEST_CASE("factorized compression") {
    SUBCASE("group validation") {
        const std::vector<float> values(16, 1.0f);
        // Overlapping / non-contiguous ranks.
        CHECK_THROWS_AS(svd_mixed_compress(values, 4, 4,
                                           std::vector<SvdGroup>{{8, 1, 2}},
                                           RangeDtype::F32),
                        Error);
        // Increasing widths.
        CHECK_THROWS_AS(svd_mixed_compress(values, 4, 4,
                                           std::vector<SvdGroup>{{2, 0, 1}, {8, 1, 2}},
                                           RangeDtype::F32),
                        Error);
        // Rank range past the matrix rank.
        CHECK_THROWS_AS(svd_mixed_compress(values, 4, 4,
                                           std::vector<SvdGroup>{{8, 0, 5}},
                                           RangeDtype::F32),
                        Error);
        // Zero-width codes.
        CHECK_THROWS_AS(svd_mixed_compress(values, 4, 4,
                                           std::vector<SvdGroup>{{0, 0, 1}},
                                           RangeDtype::F32),
                        Error);
    }

    SUBCASE("structure follows the groups") {
        const std::vector<float> values = ddc_test::random_values(12 * 10, 17);
        const std::vector<SvdGroup> groups = {{8, 0, 2}, {3, 2, 5}};
        const SvdMixedCompressed sc = svd_mixed_compress(values, 12, 10, groups, RangeDtype::F32);
        CHECK(sc.rows == 12);
        CHECK(sc.cols == 10);
        REQUIRE(sc.u_columns.size() == 5);
        REQUIRE(sc.vt_rows.size() == 5);
        for (size_t r = 0; r < 5; ++r) {
            const uint32_t want = r < 2 ? 8 : 3;
            CHECK(sc.u_columns[r].bits == want);
            CHECK(sc.vt_rows[r].bits == want);
            CHECK(sc.u_columns[r].codes.size() == 12);
            CHECK(sc.vt_rows[r].codes.size() == 10);
        }
    }

    SUBCASE("deterministic across repeated runs") {
        const std::vector<float> values = ddc_test::random_values(16 * 12, 23);
        const auto groups = default_svd_groups(16, 12);
        const SvdMixedCompressed a = svd_mixed_compress(values, 16, 12, groups, RangeDtype::F32);
        const SvdMixedCompressed b = svd_mixed_compress(values, 16, 12, groups, RangeDtype::F32);
        REQUIRE(a.u_columns.size() == b.u_columns.size());
        for (size_t r = 0; r < a.u_columns.size(); ++r) {
            CHECK(a.u_columns[r].codes == b.u_columns[r].codes);
            CHECK(a.u_columns[r].lo == b.u_columns[r].lo);
            CHECK(a.u_columns[r].hi == b.u_columns[r].hi);
            CHECK(a.vt_rows[r].codes == b.vt_rows[r].codes);
        }
        const std::vector<float> ra = svd_mixed_reconstruct(a);
        const std::vector<float> rb = svd_mixed_reconstruct(b);
        CHECK(ra == rb);
    }

    SUBCASE("recovers a rank-one matrix closely at 8 bits") {
        // outer(u, v) with smooth factors, compressed with one 8-bit rank.
        const int64_t n = 16;
        std::vector<float> values(size_t(n) * n);
        for (int64_t r = 0; r < n; ++r) {
            for (int64_t c = 0; c < n; ++c) {
                values[size_t(r) * n + c] =
                    float((0.5 + double(r) / n) * (1.0 - double(c) / (2.0 * n)));
            }
        }
        const std::vector<SvdGroup> groups = {{8, 0, 1}};
        const SvdMixedCompressed sc = svd_mixed_compress(values, n, n, groups, RangeDtype::F32);
        const std::vector<float> back = svd_mixed_reconstruct(sc);
        double err_sq = 0.0, ref_sq = 0.0;
        for (size_t i = 0; i < values.size(); ++i) {
            err_sq += double(back[i] - values[i]) * double(back[i] - values[i]);
            ref_sq += double(values[i]) * double(values[i]);
        }
        CHECK(std::sqrt(err_sq / ref_sq) < 0.02); // 8-bit factors, ~1% error
    }

    SUBCASE("reconstruct validates factor pairing") {
        SvdMixedCompressed sc;
        sc.rows = 2;
        sc.cols = 2;
        sc.u_columns.resize(1);
        CHECK_THROWS_AS(svd_mixed_reconstruct(sc), Error);
    }

    SUBCASE("rejects non-finite input") {
        std::vector<float> values(16, 0.5f);
        values[7] = std::numeric_limits<float>::infinity();
        CHECK_THROWS_AS(svd_mixed_compress(values, 4, 4, default_svd_groups(4, 4),
                                           RangeDtype::F32),
                        Error);
    }
}
