#pragma once

namespace ats {

inline constexpr const char* kToolName = "atscli";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace ats
