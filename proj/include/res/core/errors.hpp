#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace res {

// Failure classes that a pipeline run can end with. The string forms are the
// failure_reason values persisted on a RunRecord.
enum class ErrorKind {
    PlanInvalid,
    SourceError,
    ProviderError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& detail) {
    throw Error(kind, detail);
}

}  // namespace res
