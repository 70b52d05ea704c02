// Copyright 2026 The ddc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ddc {

// Error categories. They map 1:1 onto the C API status codes; the CLI turns
// invalid_argument into exit code 1 (usage) and everything else into 2 (data).
enum class Errc {
    invalid_argument,
    io,
    format,
    mismatch,
    not_found,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, std::string message) {
    throw Error(code, std::move(message));
}

} // namespace ddc
