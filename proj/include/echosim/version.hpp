#pragma once

namespace echosim {

inline constexpr const char* kToolName = "echosim";
inline constexpr const char* kVersion = "1.0.0";

}  // namespace echosim
