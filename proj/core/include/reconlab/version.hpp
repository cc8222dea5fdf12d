#pragma once

namespace reconlab {

// Keep in sync with the package version exported from core/CMakeLists.txt.
inline constexpr char kVersion[] = "0.1.0";

}  // namespace reconlab
