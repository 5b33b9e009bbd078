#pragma once

namespace spreach {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spreach
