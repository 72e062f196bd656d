#pragma once

namespace jdsse {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace jdsse
