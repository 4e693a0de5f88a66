#pragma once

namespace kufs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kufs
