#pragma once

namespace hfbi {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace hfbi
