#pragma once

namespace monoidx {

inline constexpr const char* version = "1.0.0";

}  // namespace monoidx
