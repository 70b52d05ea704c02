// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/dct.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include <fmt/format.h>

#include "core/error.hpp"

namespace ddc {

DctBasis::DctBasis(uint32_t size) : size_(size) {
    if (size == 0) {
        fail(Errc::invalid_argument, "transform size must be positive");
    }
    coeffs_.resize(size_t(size) * size);
    for (uint32_t k = 0; k < size; ++k) {
        const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / double(size));
        for (uint32_t n = 0; n < size; ++n) {
            coeffs_[size_t(k) * size + n] =
                scale * std::cos(std::numbers::pi * (2.0 * n + 1.0) * double(k) /
                                 (2.0 * double(size)));
        }
    }
}

const DctBasis& dct_basis(uint32_t size) {
    static std::mutex mutex;
    static std::unordered_map<uint32_t, std::unique_ptr<const DctBasis>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(size);
    if (it == cache.end()) {
        it = cache.emplace(size, std::make_unique<const DctBasis>(size)).first;
    }
    return *it->second;
}

namespace {

void check_extent(const DctBasis& basis, size_t input, size_t output) {
    const size_t expect = size_t(basis.size()) * basis.size();
    if (input != expect || output != expect) {
        fail(Errc::invalid_argument,
             fmt::format("transform expects {} values, got {} in / {} out", expect, input,
                         output));
    }
}

} // namespace

void dct2(const DctBasis& basis, std::span<const double> input, std::span<double> output) {
    check_extent(basis, input.size(), output.size());
    const uint32_t p = basis.size();
    std::vector<double> temp(size_t(p) * p);
    for (uint32_t u = 0; u < p; ++u) { // temp = C * X
        for (uint32_t m = 0; m < p; ++m) {
            double acc = 0.0;
            for (uint32_t n = 0; n < p; ++n) {
                acc += basis.coeff(u, n) * input[size_t(n) * p + m];
            }
            temp[size_t(u) * p + m] = acc;
        }
    }
    for (uint32_t u = 0; u < p; ++u) { // output = temp * C^T
        for (uint32_t v = 0; v < p; ++v) {
            double acc = 0.0;
            for (uint32_t m = 0; m < p; ++m) {
                acc += temp[size_t(u) * p + m] * basis.coeff(v, m);
            }
            output[size_t(u) * p + v] = acc;
        }
    }
}

void idct2(const DctBasis& basis, std::span<const double> input, std::span<double> output) {
    check_extent(basis, input.size(), output.size());
    const uint32_t p = basis.size();
    std::vector<double> temp(size_t(p) * p);
    for (uint32_t n = 0; n < p; ++n) { // temp = C^T * Y
        for (uint32_t v = 0; v < p; ++v) {
            double acc = 0.0;
            for (uint32_t u = 0; u < p; ++u) {
                acc += basis.coeff(u, n) * input[size_t(u) * p + v];
            }
            temp[size_t(n) * p + v] = acc;
        }
    }
    for (uint32_t n = 0; n < p; ++n) { // output = temp * C
        for (uint32_t m = 0; m < p; ++m) {
            double acc = 0.0;
            for (uint32_t v = 0; v < p; ++v) {
                acc += temp[size_t(n) * p + v] * basis.coeff(v, m);
            }
            output[size_t(n) * p + m] = acc;
        }
    }
}

} // namespace ddc
