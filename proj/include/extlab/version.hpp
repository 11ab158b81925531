#pragma once

namespace extlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace extlab
