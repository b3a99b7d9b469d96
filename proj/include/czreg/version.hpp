#pragma once

namespace czreg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace czreg
