#pragma once

namespace sdenet {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace sdenet
