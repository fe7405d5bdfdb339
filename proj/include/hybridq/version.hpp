#pragma once

namespace hybridq {
inline constexpr const char* kToolName = "hybridq";
inline constexpr const char* kVersion = "0.1.0";
}  // namespace hybridq
