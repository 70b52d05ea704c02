// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "core/dtype.hpp"

namespace ddc {

// A dense row-major tensor. Values are float32 working precision regardless
// of the storage dtype; the tag remembers what to narrow back to on save.
struct Tensor {
    Dtype dtype = Dtype::F32;
    std::vector<int64_t> shape;
    std::vector<float> values;

    int64_t element_count() const;
    bool is_matrix() const { return shape.size() == 2; }
};

// Validates that the value count matches the shape product and that no
// dimension is negative or zero.
Tensor make_tensor(Dtype dtype, std::vector<int64_t> shape, std::vector<float> values);

// Ordered tensor-name map. Iteration follows insertion order, which for
// loaded checkpoints is the file's declared order.
class Checkpoint {
public:
    using Entry = std::pair<std::string, Tensor>;

    // Throws on empty or duplicate names.
    void add(std::string name, Tensor tensor);

    size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const Entry& entry(size_t index) const { return entries_.at(index); }

    const Tensor* find(std::string_view name) const;
    const Tensor& at(std::string_view name) const; // throws not_found

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, size_t> index_;
};

} // namespace ddc
