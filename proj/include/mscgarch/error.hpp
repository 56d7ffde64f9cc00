#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mscgarch {

/// Broad failure classes. The CLI maps each one to its own exit code.
enum class ErrorCategory {
    invalid_argument,  // violated precondition or type invariant
    parse,             // malformed CSV / JSON
    io,                // missing or unwritable file
    numeric,           // underflow, singular system, divergence
};

inline std::string_view category_name(ErrorCategory c) noexcept {
    switch (c) {
        case ErrorCategory::invalid_argument: return "invalid_argument";
        case ErrorCategory::parse: return "parse";
        case ErrorCategory::io: return "io";
        case ErrorCategory::numeric: return "numeric";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorCategory::invalid_argument, what);
}

}  // namespace mscgarch
