#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sketchsci {

enum class ErrorCode {
    validation,
    structural,
    conflict,
    io,
    invalid_arguments,
    exhausted,
    schema,
    inconsistency,
    infeasible,
    configuration,
    stale_reference,
    empty_selection,
    untrainable_target,
    insufficient_data,
    no_prediction,
    cycle,
    task_role,
    index,
    busy,
    not_found,
};

std::string_view to_string(ErrorCode code);

/// Every failure the engine reports carries a machine-readable code so the
/// CLI and HTTP layers can map it to exit codes and status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, std::string details = {})
        : std::runtime_error(std::move(message)), code_(code), details_(std::move(details))
    {
    }

    ErrorCode code() const noexcept { return code_; }
    const std::string& details() const noexcept { return details_; }

private:
    ErrorCode code_;
    std::string details_;
};

} // namespace sketchsci
