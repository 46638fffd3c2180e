#pragma once

namespace rwlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rwlab
