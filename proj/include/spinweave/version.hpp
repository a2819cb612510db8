#pragma once

namespace spinweave {

inline constexpr const char* kToolName = "spinweave";
inline constexpr const char* kVersion = "1.0.0";

}  // namespace spinweave
