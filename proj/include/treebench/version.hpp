#pragma once

namespace treebench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace treebench
