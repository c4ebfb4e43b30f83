#pragma once

namespace wagner {

inline constexpr const char* kEngineName = "wagner";
inline constexpr const char* kEngineVersion = "1.0.0";

}  // namespace wagner
