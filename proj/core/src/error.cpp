#include "sriqa/error.hpp"

namespace sriqa {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_config: return "invalid-config";
        case ErrorKind::invalid_record: return "invalid-record";
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::invalid_scale: return "invalid-scale";
        case ErrorKind::invalid_split: return "invalid-split";
        case ErrorKind::cannot_split: return "cannot-split";
        case ErrorKind::too_small_image: return "too-small-image";
        case ErrorKind::zero_variance: return "zero-variance";
        case ErrorKind::insufficient_data: return "insufficient-data";
        case ErrorKind::degenerate_group: return "degenerate-group";
        case ErrorKind::wrong_framework: return "wrong-framework";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

} // namespace sriqa
