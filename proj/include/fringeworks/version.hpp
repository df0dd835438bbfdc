#pragma once

namespace fringeworks {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fringeworks
