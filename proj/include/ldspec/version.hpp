#pragma once

namespace ldspec {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ldspec
