#pragma once

namespace gripsim {
inline constexpr const char* kVersion = "0.1.0";
}
