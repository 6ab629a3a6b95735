#pragma once

namespace radepi {

inline constexpr const char* kToolName = "radepi";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace radepi
