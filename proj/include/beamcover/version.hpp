#pragma once

namespace beamcover {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace beamcover
