#pragma once

namespace nlsym {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nlsym
