// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/patch.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <numeric>

#include <fmt/format.h>

#include "core/error.hpp"

namespace ddc {

std::span<const float> PatchGrid::patch(int64_t k) const {
    const size_t area = size_t(patch_size) * patch_size;
    return std::span(data).subspan(size_t(k) * area, area);
}

std::span<float> PatchGrid::patch(int64_t k) {
    const size_t area = size_t(patch_size) * patch_size;
    return std::span(data).subspan(size_t(k) * area, area);
}

PatchGrid patchlize(std::span<const float> values, int64_t rows, int64_t cols,
                    uint32_t patch_size) {
    if (patch_size == 0) {
        fail(Errc::invalid_argument, "patch size must be positive");
    }
    if (rows <= 0 || cols <= 0 || int64_t(values.size()) != rows * cols) {
        fail(Errc::invalid_argument,
             fmt::format("cannot patchlize a {}x{} matrix with {} values", rows, cols,
                         values.size()));
    }
    const int64_t p = patch_size;
    PatchGrid grid;
    grid.rows = rows;
    grid.cols = cols;
    grid.padded_rows = (rows + p - 1) / p * p;
    grid.padded_cols = (cols + p - 1) / p * p;
    grid.patch_size = patch_size;
    grid.data.assign(size_t(grid.patch_count()) * p * p, 0.0f);
    for (int64_t r = 0; r < rows; ++r) {
        const float* src = values.data() + r * cols;
        for (int64_t c0 = 0; c0 < cols; c0 += p) {
            const int64_t k = (r / p) * grid.patch_cols() + c0 / p;
            float* dst = grid.patch(k).data() + (r % p) * p;
            std::memcpy(dst, src + c0, size_t(std::min(p, cols - c0)) * sizeof(float));
        }
    }
    return grid;
}

std::vector<float> reassemble(const PatchGrid& grid) {
    const int64_t p = grid.patch_size;
    if (p <= 0 || grid.padded_rows % p != 0 || grid.padded_cols % p != 0 ||
        grid.rows <= 0 || grid.cols <= 0 || grid.rows > grid.padded_rows ||
        grid.cols > grid.padded_cols ||
        int64_t(grid.data.size()) != grid.patch_count() * p * p) {
        fail(Errc::mismatch, "patch grid geometry is inconsistent");
    }
    std::vector<float> values(size_t(grid.rows) * grid.cols);
    for (int64_t r = 0; r < grid.rows; ++r) {
        float* dst = values.data() + r * grid.cols;
        for (int64_t c0 = 0; c0 < grid.cols; c0 += p) {
            const int64_t k = (r / p) * grid.patch_cols() + c0 / p;
            const float* src = grid.patch(k).data() + (r % p) * p;
            std::memcpy(dst + c0, src, size_t(std::min(p, grid.cols - c0)) * sizeof(float));
        }
    }
    return values;
}

std::vector<double> importance_scores(const PatchGrid& grid) {
    std::vector<double> scores(size_t(grid.patch_count()));
    for (int64_t k = 0; k < grid.patch_count(); ++k) {
        double acc = 0.0;
        for (float v : grid.patch(k)) {
            acc += double(v) * double(v);
        }
        scores[size_t(k)] = std::sqrt(acc);
    }
    return scores;
}

void BitPlan::validate() const {
    if (levels.empty()) {
        fail(Errc::invalid_argument, "bit plan has no levels");
    }
    double total = 0.0;
    for (size_t i = 0; i < levels.size(); ++i) {
        if (levels[i].bits > 32) {
            fail(Errc::invalid_argument,
                 fmt::format("bit-width {} exceeds 32", levels[i].bits));
        }
        if (i > 0 && levels[i].bits >= levels[i - 1].bits) {
            fail(Errc::invalid_argument, "bit plan levels must be strictly decreasing");
        }
        if (!(levels[i].ratio >= 0.0 && levels[i].ratio <= 1.0)) {
            fail(Errc::invalid_argument,
                 fmt::format("ratio {} outside [0, 1]", levels[i].ratio));
        }
        total += levels[i].ratio;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
        fail(Errc::invalid_argument, fmt::format("bit plan ratios sum to {}, expected 1", total));
    }
}

std::string BitPlan::to_string() const {
    std::string out;
    for (const auto& level : levels) {
        if (!out.empty()) out.push_back(',');
        out += fmt::format("{}:{}", level.bits, level.ratio);
    }
    return out;
}

BitPlan BitPlan::parse(std::string_view spec) {
    BitPlan plan;
    size_t pos = 0;
    while (pos <= spec.size()) {
        const size_t comma = std::min(spec.find(',', pos), spec.size());
        const std::string_view token = spec.substr(pos, comma - pos);
        const size_t colon = token.find(':');
        if (token.empty() || colon == std::string_view::npos) {
            fail(Errc::invalid_argument,
                 fmt::format("malformed bit plan entry '{}' (want bits:ratio)", token));
        }
        BitPlanLevel level;
        const std::string_view bits_text = token.substr(0, colon);
        auto [ptr, ec] = std::from_chars(bits_text.data(), bits_text.data() + bits_text.size(),
                                         level.bits);
        if (ec != std::errc() || ptr != bits_text.data() + bits_text.size()) {
            fail(Errc::invalid_argument,
                 fmt::format("malformed bit-width in plan entry '{}'", token));
        }
        const std::string ratio_text(token.substr(colon + 1));
        size_t used = 0;
        try {
            level.ratio = std::stod(ratio_text, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != ratio_text.size() || ratio_text.empty()) {
            fail(Errc::invalid_argument, fmt::format("malformed ratio in plan entry '{}'", token));
        }
        plan.levels.push_back(level);
        if (comma == spec.size()) break;
        pos = comma + 1;
    }
    plan.validate();
    return plan;
}

BitPlan default_bit_plan() {
    return BitPlan{{{2, 0.5}, {0, 0.5}}};
}

std::vector<int64_t> level_counts(const BitPlan& plan, int64_t patch_count) {
    plan.validate();
    if (patch_count <= 0) {
        fail(Errc::invalid_argument, "patch count must be positive");
    }
    const size_t n = plan.levels.size();
    std::vector<int64_t> counts(n);
    std::vector<double> fractions(n);
    int64_t assigned = 0;
    for (size_t i = 0; i < n; ++i) {
        const double exact = plan.levels[i].ratio * double(patch_count);
        counts[i] = int64_t(std::floor(exact));
        fractions[i] = exact - std::floor(exact);
        assigned += counts[i];
    }
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t(0));
    // Levels are stored in descending bit-width order, so index order is the
    // tie-break toward higher widths.
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return fractions[a] > fractions[b]; });
    for (size_t i = 0; assigned < patch_count; ++i) {
        ++counts[order[i % n]];
        ++assigned;
    }
    return counts;
}

std::vector<uint8_t> allocate_bits(std::span<const double> scores, const BitPlan& plan) {
    if (scores.empty()) {
        fail(Errc::invalid_argument, "cannot allocate bits for zero patches");
    }
    const std::vector<int64_t> counts = level_counts(plan, int64_t(scores.size()));
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t(0));
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    std::vector<uint8_t> widths(scores.size());
    size_t next = 0;
    for (size_t level = 0; level < counts.size(); ++level) {
        for (int64_t i = 0; i < counts[level]; ++i) {
            widths[order[next++]] = uint8_t(plan.levels[level].bits);
        }
    }
    return widths;
}

} // namespace ddc
