#pragma once

namespace sriqa {

inline constexpr const char* kVersion = "0.1.0";

} // namespace sriqa
