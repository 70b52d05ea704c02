// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/baselines.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "core/error.hpp"

namespace ddc {

SignCompressed sign_compress(std::span<const float> values, int64_t rows, int64_t cols) {
    if (rows <= 0 || cols <= 0 || int64_t(values.size()) != rows * cols) {
        fail(Errc::invalid_argument,
             fmt::format("cannot sign-quantize a {}x{} matrix with {} values", rows, cols,
                         values.size()));
    }
    SignCompressed sc;
    sc.rows = rows;
    sc.cols = cols;
    sc.bitmap.assign(size_t(values.size() + 7) / 8, 0);
    double acc = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            fail(Errc::invalid_argument, "non-finite input values");
        }
        acc += std::fabs(double(values[i]));
        if (values[i] > 0.0f) {
            sc.bitmap[i >> 3] |= uint8_t(1u << (i & 7));
        }
    }
    sc.alpha = acc / double(values.size());
    return sc;
}

std::vector<float> sign_reconstruct(const SignCompressed& sc) {
    const size_t count = size_t(sc.rows) * size_t(sc.cols);
    if (sc.bitmap.size() != (count + 7) / 8) {
        fail(Errc::mismatch, "sign bitmap length does not match the matrix extent");
    }
    const float alpha = float(sc.alpha);
    std::vector<float> values(count);
    for (size_t i = 0; i < count; ++i) {
        const bool positive = (sc.bitmap[i >> 3] >> (i & 7)) & 1u;
        values[i] = positive ? alpha : -alpha;
    }
    return values;
}

std::vector<SvdGroup> default_svd_groups(int64_t rows, int64_t cols) {
    if (rows <= 0 || cols <= 0) {
        fail(Errc::invalid_argument, "matrix dimensions must be positive");
    }
    // 8/3/2-bit ranks in ratio 1:8:16 store 64*t*(rows+cols) bits; size t so
    // that this meets the 1-bit-per-parameter budget rows*cols.
    const int64_t t = std::max<int64_t>(
        1, llround(double(rows) * double(cols) / (64.0 * double(rows + cols))));
    const int64_t max_rank = std::min(rows, cols);
    std::vector<SvdGroup> groups;
    int64_t begin = 0;
    for (const auto& [bits, want] : {std::pair<uint32_t, int64_t>{8, t},
                                     std::pair<uint32_t, int64_t>{3, 8 * t},
                                     std::pair<uint32_t, int64_t>{2, 16 * t}}) {
        const int64_t take = std::min(want, max_rank - begin);
        if (take > 0) {
            groups.push_back(SvdGroup{bits, begin, begin + take});
            begin += take;
        }
    }
    return groups;
}

namespace {

void validate_groups(std::span<const SvdGroup> groups, int64_t max_rank) {
    int64_t expect_begin = 0;
    uint32_t prev_bits = 33;
    for (const auto& group : groups) {
        if (group.bits < 1 || group.bits > 32) {
            fail(Errc::invalid_argument,
                 fmt::format("group bit-width {} outside 1..32", group.bits));
        }
        if (group.bits >= prev_bits) {
            fail(Errc::invalid_argument, "group bit-widths must be strictly decreasing");
        }
        if (group.rank_begin != expect_begin || group.rank_end < group.rank_begin) {
            fail(Errc::invalid_argument, "rank ranges must be contiguous and ascending");
        }
        if (group.rank_end > max_rank) {
            fail(Errc::invalid_argument,
                 fmt::format("rank range [{}, {}) exceeds min dimension {}", group.rank_begin,
                             group.rank_end, max_rank));
        }
        expect_begin = group.rank_end;
        prev_bits = group.bits;
    }
}

} // namespace

SvdMixedCompressed svd_mixed_compress(std::span<const float> values, int64_t rows, int64_t cols,
                                      std::span<const SvdGroup> groups, RangeDtype range_dtype) {
    if (rows <= 0 || cols <= 0 || int64_t(values.size()) != rows * cols) {
        fail(Errc::invalid_argument,
             fmt::format("cannot factorize a {}x{} matrix with {} values", rows, cols,
                         values.size()));
    }
    validate_groups(groups, std::min(rows, cols));
    for (float v : values) {
        if (!std::isfinite(v)) {
            fail(Errc::invalid_argument, "non-finite input values");
        }
    }

    Eigen::MatrixXd matrix(rows, cols);
    for (int64_t r = 0; r < rows; ++r) {
        for (int64_t c = 0; c < cols; ++c) {
            matrix(r, c) = double(values[size_t(r) * size_t(cols) + size_t(c)]);
        }
    }
    Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXd u = svd.matrixU();
    Eigen::MatrixXd sv = svd.singularValues().asDiagonal() * svd.matrixV().transpose();

    SvdMixedCompressed sc;
    sc.rows = rows;
    sc.cols = cols;
    sc.groups.assign(groups.begin(), groups.end());
    std::vector<double> column(static_cast<size_t>(rows));
    std::vector<double> row(static_cast<size_t>(cols));
    for (const auto& group : groups) {
        for (int64_t rank = group.rank_begin; rank < group.rank_end; ++rank) {
            int64_t peak = 0;
            for (int64_t r = 1; r < rows; ++r) {
                if (std::fabs(u(r, rank)) > std::fabs(u(peak, rank))) peak = r;
            }
            const double flip = u(peak, rank) < 0.0 ? -1.0 : 1.0;
            for (int64_t r = 0; r < rows; ++r) column[size_t(r)] = flip * u(r, rank);
            for (int64_t c = 0; c < cols; ++c) row[size_t(c)] = flip * sv(rank, c);
            sc.u_columns.push_back(quantize_block(column, group.bits, ZeroBitMode::SpatialMean,
                                                  0.0, range_dtype));
            sc.vt_rows.push_back(quantize_block(row, group.bits, ZeroBitMode::SpatialMean, 0.0,
                                                range_dtype));
        }
    }
    return sc;
}

std::vector<float> svd_mixed_reconstruct(const SvdMixedCompressed& sc) {
    if (sc.rows <= 0 || sc.cols <= 0 || sc.u_columns.size() != sc.vt_rows.size()) {
        fail(Errc::mismatch, "factorization state is inconsistent");
    }
    std::vector<double> acc(size_t(sc.rows) * size_t(sc.cols), 0.0);
    for (size_t rank = 0; rank < sc.u_columns.size(); ++rank) {
        const std::vector<double> column = dequantize_block(sc.u_columns[rank], size_t(sc.rows));
        const std::vector<double> row = dequantize_block(sc.vt_rows[rank], size_t(sc.cols));
        for (int64_t r = 0; r < sc.rows; ++r) {
            for (int64_t c = 0; c < sc.cols; ++c) {
                acc[size_t(r) * size_t(sc.cols) + size_t(c)] += column[size_t(r)] * row[size_t(c)];
            }
        }
    }
    std::vector<float> values(acc.size());
    for (size_t i = 0; i < acc.size(); ++i) values[i] = float(acc[i]);
    return values;
}

} // namespace ddc
