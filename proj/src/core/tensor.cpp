// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/tensor.hpp"

#include <fmt/format.h>

#include "core/error.hpp"

namespace ddc {

int64_t Tensor::element_count() const {
    int64_t count = 1;
    for (int64_t dim : shape) count *= dim;
    return count;
}

Tensor make_tensor(Dtype dtype, std::vector<int64_t> shape, std::vector<float> values) {
    int64_t count = 1;
    for (int64_t dim : shape) {
        if (dim <= 0) {
            fail(Errc::invalid_argument, fmt::format("tensor dimension {} is not positive", dim));
        }
        count *= dim;
    }
    if (count != int64_t(values.size())) {
        fail(Errc::invalid_argument,
             fmt::format("tensor shape implies {} elements but {} values were given",
                         count, values.size()));
    }
    return Tensor{dtype, std::move(shape), std::move(values)};
}

void Checkpoint::add(std::string name, Tensor tensor) {
    if (name.empty()) {
        fail(Errc::invalid_argument, "tensor name must not be empty");
    }
    if (index_.contains(name)) {
        fail(Errc::invalid_argument, fmt::format("duplicate tensor name '{}'", name));
    }
    index_.emplace(name, entries_.size());
    entries_.emplace_back(std::move(name), std::move(tensor));
}

const Tensor* Checkpoint::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &entries_[it->second].second;
}

const Tensor& Checkpoint::at(std::string_view name) const {
    const Tensor* tensor = find(name);
    if (tensor == nullptr) {
        fail(Errc::not_found, fmt::format("no tensor named '{}'", name));
    }
    return *tensor;
}

} // namespace ddc
