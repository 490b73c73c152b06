#pragma once

namespace modica {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace modica
