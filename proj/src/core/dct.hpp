// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ddc {

// Orthonormal DCT-II basis of one size:
//
//   C[k][n] = s_k * cos(pi * (2n + 1) * k / (2p)),  s_0 = sqrt(1/p), s_k = sqrt(2/p)
//
// so that C * C^T = I and the 2-D transforms below preserve Frobenius norms.
class DctBasis {
public:
    explicit DctBasis(uint32_t size);

    uint32_t size() const { return size_; }
    double coeff(uint32_t k, uint32_t n) const { return coeffs_[size_t(k) * size_ + n]; }

private:
    uint32_t size_;
    std::vector<double> coeffs_;
};

// Returns a process-wide cached basis; safe to call from multiple threads,
// returned reference stays valid for the process lifetime.
const DctBasis& dct_basis(uint32_t size);

// Forward transform Y = C * X * C^T of one p*p row-major block. Input and
// output are float64; accumulation is sequential over the contraction index,
// which keeps results reproducible across runs and thread counts.
void dct2(const DctBasis& basis, std::span<const double> input, std::span<double> output);

// Inverse transform X = C^T * Y * C.
void idct2(const DctBasis& basis, std::span<const double> input, std::span<double> output);

} // namespace ddc
