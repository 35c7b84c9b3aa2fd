#pragma once

#include <stdexcept>
#include <string>

namespace gamerecon {

enum class ErrorCode {
    no_history,
    shape_mismatch,
    all_missing,
    invalid_cutoff,
    underdetermined,
    invalid_merge,
    degenerate_track,
    invalid_window,
    insufficient_baseline,
    no_seed,
    insufficient_detections,
    missing_class,
    invalid_k,
    insufficient_track,
    invalid_config,
    bad_input,
    io_error,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace gamerecon
