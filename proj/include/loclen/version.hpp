#pragma once

namespace loclen {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace loclen
