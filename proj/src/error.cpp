#include "gamerecon/error.hpp"

namespace gamerecon {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::no_history: return "no_history";
        case ErrorCode::shape_mismatch: return "shape_mismatch";
        case ErrorCode::all_missing: return "all_missing";
        case ErrorCode::invalid_cutoff: return "invalid_cutoff";
        case ErrorCode::underdetermined: return "underdetermined";
        case ErrorCode::invalid_merge: return "invalid_merge";
        case ErrorCode::degenerate_track: return "degenerate_track";
        case ErrorCode::invalid_window: return "invalid_window";
        case ErrorCode::insufficient_baseline: return "insufficient_baseline";
        case ErrorCode::no_seed: return "no_seed";
        case ErrorCode::insufficient_detections: return "insufficient_detections";
        case ErrorCode::missing_class: return "missing_class";
        case ErrorCode::invalid_k: return "invalid_k";
        case ErrorCode::insufficient_track: return "insufficient_track";
        case ErrorCode::invalid_config: return "invalid_config";
        case ErrorCode::bad_input: return "bad_input";
        case ErrorCode::io_error: return "io_error";
    }
    return "unknown";
}

}  // namespace gamerecon
