#pragma once

namespace bivruin {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bivruin
