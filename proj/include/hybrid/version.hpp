#pragma once

namespace hybrid {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hybrid
