#pragma once

namespace noisynn {
inline constexpr const char* kVersion = "0.1.0";
}
