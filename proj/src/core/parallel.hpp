// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>

namespace ddc {

// 0 -> hardware concurrency (at least 1).
uint32_t resolve_threads(uint32_t requested);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must
// write disjoint state; index dispatch order is unspecified, so results must
// not depend on it. The first exception thrown by any item is rethrown on
// the calling thread after all workers finish.
void parallel_for(uint32_t threads, int64_t n, const std::function<void(int64_t)>& fn);

} // namespace ddc
