#pragma once

#include <stdexcept>
#include <string>

namespace sriqa {

/// Machine-parseable error categories. Every failure raised by the library
/// carries one of these; the CLI prints it as `error: <category>: <detail>`.
enum class ErrorKind {
    invalid_config,
    invalid_record,
    invalid_input,
    invalid_scale,
    invalid_split,
    cannot_split,
    too_small_image,
    zero_variance,
    insufficient_data,
    degenerate_group,
    wrong_framework,
    io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
          kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace sriqa
