// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/delta.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "core/error.hpp"

namespace ddc {

bool glob_match(std::string_view pattern, std::string_view text) {
    size_t p = 0, t = 0;
    size_t star = std::string_view::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

std::vector<std::string> default_passthrough_patterns() {
    return {"*embed*", "*lm_head*", "*wte*", "*wpe*"};
}

DeltaSet compute_delta(const Checkpoint& finetuned, const Checkpoint& base,
                       const DeltaOptions& options) {
    for (const auto& [name, tensor] : base) {
        if (finetuned.find(name) == nullptr) {
            fail(Errc::mismatch,
                 fmt::format("tensor '{}' present in base checkpoint only", name));
        }
    }

    DeltaSet set;
    for (size_t i = 0; i < finetuned.size(); ++i) {
        const auto& [name, ft] = finetuned.entry(i);
        const Tensor* bt = base.find(name);
        if (bt == nullptr) {
            fail(Errc::mismatch,
                 fmt::format("tensor '{}' present in fine-tuned checkpoint only", name));
        }
        if (bt->shape != ft.shape) {
            fail(Errc::mismatch, fmt::format("shape mismatch for tensor '{}'", name));
        }
        if (bt->dtype != ft.dtype) {
            fail(Errc::mismatch,
                 fmt::format("dtype mismatch for tensor '{}' ({} vs {})", name,
                             dtype_name(ft.dtype), dtype_name(bt->dtype)));
        }

        const bool pattern_hit = std::any_of(
            options.passthrough_patterns.begin(), options.passthrough_patterns.end(),
            [&](const std::string& pattern) { return glob_match(pattern, name); });
        const bool compressible = ft.shape.size() == 2 &&
                                  std::min(ft.shape[0], ft.shape[1]) >= options.min_dim &&
                                  !pattern_hit;
        if (compressible) {
            DeltaMatrix delta;
            delta.name = name;
            delta.dtype = ft.dtype;
            delta.rows = ft.shape[0];
            delta.cols = ft.shape[1];
            delta.source_index = i;
            delta.values.resize(ft.values.size());
            for (size_t j = 0; j < ft.values.size(); ++j) {
                delta.values[j] = float(double(ft.values[j]) - double(bt->values[j]));
            }
            set.compressible.push_back(std::move(delta));
        } else {
            set.passthrough.push_back(PassthroughTensor{name, ft, i});
        }
    }
    return set;
}

} // namespace ddc
